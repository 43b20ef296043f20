"""Driven-dissipative Bose-Hubbard dimer: exact steady states,
closed-form Kerr solutions, mean-field decouplings, quantum
trajectories and entanglement witnesses."""

from .params import KerrParams, ModelParams

__version__ = "0.1.0"
__all__ = ["ModelParams", "KerrParams", "__version__"]
