"""Truncated Fock spaces and dense bosonic mode operators.

Operators are plain complex ndarrays over the full (possibly two-mode)
space.  Two-mode operators act on the tensor product ordered as
``mode 1 (x) mode 2`` in the real basis, or ``bonding (x) anti-bonding``
when a Liouvillian is built in the reciprocal basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm


@dataclass(frozen=True)
class FockSpace:
    """Bosonic Hilbert space truncated at ``n_max`` photons per mode."""

    n_max: int
    modes: int = 1

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.modes not in (1, 2):
            raise ValueError(f"modes must be 1 or 2, got {self.modes}")

    @property
    def mode_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** self.modes


def destroy(dim: int) -> np.ndarray:
    """Single-mode annihilation operator: a|n> = sqrt(n)|n-1>."""
    a = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def build_mode_operators(space: FockSpace) -> dict[str, np.ndarray]:
    """Annihilation, creation and number operators for each mode.

    Returns a dict keyed ``a``/``ad``/``n`` for a single mode, or
    ``a1``/``a2`` etc. for the two-mode space.
    """
    d = space.mode_dim
    a = destroy(d)
    if space.modes == 1:
        return {"a": a, "ad": a.conj().T, "n": a.conj().T @ a}
    eye = np.eye(d, dtype=complex)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    ops = {"a1": a1, "a2": a2}
    for j in (1, 2):
        ops[f"ad{j}"] = ops[f"a{j}"].conj().T
        ops[f"n{j}"] = ops[f"ad{j}"] @ ops[f"a{j}"]
    return ops


def to_reciprocal(ops: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Bonding / anti-bonding combinations of the two site modes.

    a_B = (a2 + a1)/sqrt(2), a_AB = (a2 - a1)/sqrt(2).  Bosonic
    commutators hold on the subspace away from the cutoff.
    """
    if "a1" not in ops or "a2" not in ops:
        raise ValueError("reciprocal transform requires two-mode operators")
    a_b = (ops["a2"] + ops["a1"]) / np.sqrt(2)
    a_ab = (ops["a2"] - ops["a1"]) / np.sqrt(2)
    out = {"a_B": a_b, "a_AB": a_ab}
    for k in ("B", "AB"):
        out[f"ad_{k}"] = out[f"a_{k}"].conj().T
        out[f"n_{k}"] = out[f"ad_{k}"] @ out[f"a_{k}"]
    return out


def beamsplitter_unitary(space: FockSpace) -> np.ndarray:
    """Unitary relating the real-basis and reciprocal-basis descriptions.

    With V = exp[(pi/4)(a1^dag a2 - a2^dag a1)] one has
    V^dag (a (x) I) V = (a1 + a2)/sqrt(2), so a real-basis density matrix
    rho maps to the elementary-mode reciprocal description as V rho V^dag.
    Exact up to cutoff truncation (the transform mixes states within a
    total-photon-number shell; incomplete shells near the cutoff deviate).
    """
    if space.modes != 2:
        raise ValueError("beamsplitter transform requires a two-mode space")
    ops = build_mode_operators(space)
    g = ops["ad1"] @ ops["a2"] - ops["ad2"] @ ops["a1"]
    return expm((np.pi / 4) * g)


def real_to_reciprocal_dm(rho: np.ndarray, space: FockSpace) -> np.ndarray:
    """Re-express a real-basis two-mode density matrix in the B/AB basis."""
    v = beamsplitter_unitary(space)
    return v @ rho @ v.conj().T
