"""Photon-number cutoff convergence ladder."""

from __future__ import annotations

from typing import Callable


class CutoffConvergenceError(RuntimeError):
    pass


def converge_cutoff(solve: Callable[[int], complex], tol: float = 1e-7,
                    n_start: int = 2, n_step: int = 2,
                    n_limit: int = 60) -> tuple[int, complex]:
    """Smallest cutoff at which an observable stops moving.

    Runs ``solve(n_max)`` on an increasing ladder of cutoffs and returns
    the first ``(n_max, value)`` whose value differs from the previous
    rung by less than ``tol`` in modulus.
    """
    prev = None
    n = n_start
    while n <= n_limit:
        val = solve(n)
        if prev is not None and abs(val - prev) < tol:
            return n, val
        prev = val
        n += n_step
    raise CutoffConvergenceError(
        f"observable still moving by more than {tol:g} at n_max={n_limit}")
