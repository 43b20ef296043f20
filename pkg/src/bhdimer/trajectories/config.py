"""Trajectory simulation configuration and ensemble containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TrajectoryConfig:
    """Timestep, horizon and ensemble-size settings.

    Times are in units of 1/gamma.  ``sample_every`` counts steps between
    state samples after the burn-in.  The jump probability per step
    should stay well below one; runs report the largest probability
    encountered so the dt choice can be audited.
    """

    dt: float = 0.01
    t_burn: float = 20.0
    t_total: float = 120.0
    sample_every: int = 50
    n_traj: int = 500
    seed: int = 0
    n_blocks: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_total <= self.t_burn:
            raise ValueError("t_total must exceed t_burn")
        if self.n_traj < 1 or self.sample_every < 1:
            raise ValueError("n_traj and sample_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_total / self.dt))

    @property
    def burn_steps(self) -> int:
        return int(round(self.t_burn / self.dt))


@dataclass
class TrajectoryEnsemble:
    """Averaged outcome of a batch of quantum trajectories.

    ``rho`` is the time-and-ensemble averaged density matrix;
    ``block_rhos`` holds per-block averages for jackknife error bars.
    ``nbar_series`` is the ensemble-mean photon number per mode at the
    sample times.
    """

    rho: np.ndarray
    block_rhos: np.ndarray
    n_samples: int
    jump_counts: np.ndarray
    nbar_series: np.ndarray
    sample_times: np.ndarray
    max_jump_probability: float
    config: TrajectoryConfig
    method: str
    warnings: list = field(default_factory=list)

    @property
    def n_traj(self) -> int:
        return self.config.n_traj

    def total_density(self, n_ops) -> tuple[float, float]:
        """Ensemble mean and jackknife standard error of sum_j <n_j>."""
        from ..states import expectation
        n_tot = sum(n_ops) if isinstance(n_ops, (list, tuple)) else n_ops
        full = expectation(n_tot, self.rho).real
        blocks = np.array([expectation(n_tot, b).real
                           for b in self.block_rhos])
        nb = len(blocks)
        jack = np.array([(full * nb - blocks[i]) / (nb - 1.0)
                         for i in range(nb)])
        se = np.sqrt((nb - 1.0) / nb * np.sum((jack - jack.mean()) ** 2))
        return full, float(se)
