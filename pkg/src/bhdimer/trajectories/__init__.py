"""Quantum-trajectory unravelings of the dimer master equation."""

from .backend import active_backend, numba_enabled
from .config import TrajectoryConfig, TrajectoryEnsemble
from .engine import (average_density_matrix, dimer_trajectory_run,
                     gaussian_ab_trajectory_run, gutzwiller_trajectory_run,
                     jackknife_distance, trajectory_run)

__all__ = [
    "TrajectoryConfig", "TrajectoryEnsemble", "active_backend",
    "numba_enabled", "trajectory_run", "dimer_trajectory_run",
    "gutzwiller_trajectory_run", "gaussian_ab_trajectory_run",
    "average_density_matrix", "jackknife_distance",
]
