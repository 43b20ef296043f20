"""Physical parameter sets for the dimer and the single Kerr mode.

All rates and energies are expressed in units of the loss rate ``gamma``,
which must be strictly positive.  The drive amplitude may be complex; the
default convention (matching all figures) is real positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _check_finite(name, value):
    if not math.isfinite(abs(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the driven-dissipative Bose-Hubbard dimer.

    Attributes
    ----------
    J : float
        Hopping amplitude between the two sites.
    Delta : float
        Drive-cavity detuning (drive frequency minus cavity frequency).
    U : float
        On-site Kerr interaction strength.
    F : complex
        Coherent drive amplitude, homogeneous over the two sites.
    gamma : float
        Loss rate; the unit of all other parameters.
    """

    J: float
    Delta: float
    U: float
    F: complex
    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        for name in ("J", "Delta", "U", "F", "gamma"):
            _check_finite(name, getattr(self, name))

    @property
    def j_plus_delta(self) -> float:
        """Effective detuning of the driven (bonding) mode."""
        return self.J + self.Delta

    def with_(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    def bonding_limit(self) -> "KerrParams":
        """Single-mode model that becomes exact for large hopping.

        For large J at fixed J + Delta the anti-bonding mode empties and
        the dimer reduces to a single Kerr mode with interaction U/2 and
        drive sqrt(2) F at detuning J + Delta.
        """
        return KerrParams(Delta=self.j_plus_delta, U=self.U / 2,
                          F=math.sqrt(2) * self.F, gamma=self.gamma)

    def site_limit(self) -> "KerrParams":
        """Single-mode model of one isolated site (the J = 0 limit)."""
        return KerrParams(Delta=self.Delta, U=self.U, F=self.F,
                          gamma=self.gamma)


@dataclass(frozen=True)
class KerrParams:
    """Parameters of the single-mode driven-dissipative Kerr model."""

    Delta: float
    U: float
    F: complex
    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        for name in ("Delta", "U", "F", "gamma"):
            _check_finite(name, getattr(self, name))

    def with_(self, **kwargs) -> "KerrParams":
        return replace(self, **kwargs)
