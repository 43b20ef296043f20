"""Closed-form steady state of the driven-dissipative Kerr mode.

Implements the hypergeometric-series correlators of the generalized
P-representation solution, quadrature variances derived from them, and
the Gaussian (quadratic-fluctuation) approximation around a
semiclassical field.  Serves as the exact oracle for the dimer limits
of vanishing and infinite hopping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import root
from scipy.special import loggamma

from .params import KerrParams

MAX_SERIES_TERMS = 100_000


class SeriesConvergenceError(RuntimeError):
    pass


def hypergeometric_f(c: complex, d: complex, z: float,
                     rtol: float = 1e-16,
                     max_terms: int = MAX_SERIES_TERMS) -> complex:
    """0F2-type series sum_n G(c)G(d)/(G(c+n)G(d+n)) z^n / n!.

    Terms are generated by the recurrence
    term_{n+1} = term_n * z / ((c+n)(d+n)(n+1)), which avoids forming
    gamma-function ratios.  Summation stops once |term| < rtol |sum| for
    three consecutive terms.
    """
    if z < 0:
        raise ValueError(f"series argument must be >= 0, got {z}")
    for name, val in (("c", c), ("d", d)):
        if val.real <= 0 and abs(val - round(val.real)) < 1e-14:
            raise ValueError(f"{name}={val} is a non-positive integer pole")
    total = term = 1.0 + 0.0j
    small = 0
    for n in range(max_terms):
        term = term * z / ((c + n) * (d + n) * (n + 1))
        total += term
        if abs(term) < rtol * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise SeriesConvergenceError(
        f"no convergence after {max_terms} terms (z={z:g})")


def correlation(n: int, m: int, p: KerrParams) -> complex:
    """Steady-state normally ordered moment <a^dag^n a^m>.

    Gamma-function ratios are evaluated through log-gamma differences;
    U = 0 is rejected (the formula is singular there; use the linear
    steady state instead).
    """
    if n < 0 or m < 0:
        raise ValueError("orders must be non-negative")
    if p.U == 0:
        raise ValueError("closed form is singular at U=0; "
                         "use the linear-cavity solution")
    if n == 0 and m == 0:
        return 1.0 + 0.0j
    if p.F == 0:
        return 0.0 + 0.0j
    c = 2.0 * (-p.Delta - 0.5j * p.gamma) / p.U
    z = 8.0 * abs(p.F / p.U) ** 2
    cc = np.conj(c)
    log_ratio = loggamma(c) + loggamma(cc) - loggamma(c + m) - loggamma(cc + n)
    pref = (-2.0 * p.F / p.U) ** (n + m)
    return complex(pref * np.exp(log_ratio)
                   * hypergeometric_f(c + m, cc + n, z)
                   / hypergeometric_f(c, cc, z))


@dataclass(frozen=True)
class GaussianMoments:
    """Single-mode state summarized by its first and second moments."""

    alpha: complex
    n: float
    m: complex

    def __post_init__(self):
        excess = self.n - abs(self.alpha) ** 2
        if excess < -1e-9:
            raise ValueError(
                f"occupation below |alpha|^2 by {-excess:.3e}")
        lhs = abs(self.m - self.alpha ** 2) ** 2
        rhs = excess * (excess + 1.0)
        if lhs > rhs + 1e-9:
            raise ValueError(
                f"anomalous moment unphysical: |m-a^2|^2={lhs:.3e} > "
                f"dn(dn+1)={rhs:.3e}")


def exact_moments(p: KerrParams) -> GaussianMoments:
    """First and second closed-form steady-state moments."""
    return GaussianMoments(alpha=correlation(0, 1, p),
                           n=correlation(1, 1, p).real,
                           m=correlation(0, 2, p))


def variance_from_moments(theta: float, g: GaussianMoments) -> float:
    """(Delta X^theta)^2 from (alpha, n, m)."""
    mm = g.m - g.alpha ** 2
    var = (np.exp(2j * theta) * np.conj(mm)).real \
        + g.n - abs(g.alpha) ** 2 + 0.5
    return float(var)


def quadrature_variance(theta: float, p: KerrParams) -> float:
    """Exact quadrature variance at angle theta.

    The analytic expression is manifestly real; the imaginary part left
    by roundoff is checked below 1e-12 and discarded.
    """
    g = exact_moments(p)
    mm = g.m - g.alpha ** 2
    val = (0.5 * np.exp(2j * theta) * np.conj(mm)
           + 0.5 * np.exp(-2j * theta) * mm
           + g.n - abs(g.alpha) ** 2 + 0.5)
    if abs(val.imag) > 1e-12:
        raise RuntimeError(f"variance picked up imaginary part {val.imag:.3e}")
    return float(val.real)


def min_variance_from_moments(g: GaussianMoments) -> tuple[float, float]:
    """Analytic minimizer of the quadrature variance over the angle.

    The variance is A + |M| cos(2 theta - arg M) with M = m - alpha^2,
    so the minimum sits at theta = (arg M + pi)/2.
    """
    mm = g.m - g.alpha ** 2
    base = g.n - abs(g.alpha) ** 2 + 0.5
    if mm == 0:
        return 0.0, float(base)
    theta = (np.angle(mm) + np.pi) / 2.0
    return float(theta), float(base - abs(mm))


def min_quadrature_variance(p: KerrParams) -> tuple[float, float]:
    """(theta*, minimal quadrature variance) for the exact steady state."""
    return min_variance_from_moments(exact_moments(p))


def gaussian_fluctuations(p: KerrParams, alpha: complex) -> GaussianMoments:
    """Quadratic-fluctuation steady state around a semiclassical field.

    Solves the coupled equations for the density and the anomalous
    moment with the field held fixed at the semiclassical value (its
    back-action from the quadratic correlators is neglected).
    """
    aa = abs(alpha) ** 2

    def residual(x):
        n, mr, mi = x
        m = mr + 1j * mi
        e1 = -p.gamma * (n - aa) - 2 * p.U * (np.conj(alpha) ** 2 * m).imag
        e2 = (2 * (-p.Delta - 0.5j * p.gamma) * (m - alpha ** 2)
              + p.U * m
              + 2 * p.U * (3 * n * m - aa * m - 2 * alpha ** 2 * n))
        return [e1, e2.real, e2.imag]

    x0 = [aa, (alpha ** 2).real, (alpha ** 2).imag]
    sol = root(residual, x0, method="hybr", tol=1e-13)
    # hybr may stall reporting "not making good progress" on weakly driven
    # states whose residual is already at roundoff; judge by the residual.
    scale = max(1.0, aa)
    if not sol.success and np.max(np.abs(sol.fun)) > 1e-10 * scale:
        raise RuntimeError(
            f"quadratic-fluctuation solve failed: {sol.message} "
            "(likely near the edge of the bistable window)")
    n, mr, mi = sol.x
    return GaussianMoments(alpha=alpha, n=float(n), m=complex(mr, mi))
