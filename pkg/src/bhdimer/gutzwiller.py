"""Density-matrix Gutzwiller decouplings of the dimer.

Real-space decoupling (RDC): each site obeys a Kerr master equation with
the drive shifted by the partner field, F_eff = F - J <a>.  Reciprocal
decoupling (KDC): the bonding and anti-bonding modes obey coupled Kerr
problems with mean-field cross-Kerr shifts and effective two-photon
drives.  A further Gaussian truncation replaces the anti-bonding factor
by its two quadratic moments, reconstructed as a squeezed thermal state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import destroy
from .liouvillian import kerr_liouvillian, steady_state
from .params import ModelParams
from .semiclassical import homogeneous_roots
from .states import distance, expectation, squeeze_op, thermal_dm

TOP_POPULATION_FLAG = 1e-6


class FixedPointError(RuntimeError):
    pass


class UnphysicalMomentsError(ValueError):
    pass


@dataclass
class FixedPointReport:
    """Outcome of a self-consistency iteration.

    ``solutions`` holds one product density matrix per distinct fixed
    point; ``meta`` carries per-solution diagnostics (effective drives,
    moments, iteration counts).
    """

    iterations: int
    residual: float
    converged: bool
    solutions: list = field(default_factory=list)
    meta: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass(frozen=True)
class SqueezedThermalParams:
    """Squeezing angle/magnitude and thermal occupation of a Gaussian
    zero-field state."""

    theta: float
    r: float
    n: float

    def __post_init__(self):
        if self.n < 0 or self.r < 0:
            raise ValueError("squeezed thermal state needs n >= 0 and r >= 0")


def moments_to_squeezed_thermal(n: float, m: complex) -> SqueezedThermalParams:
    """Invert (occupation, anomalous moment) to (theta, r, n_thermal).

    Physicality requires |m| <= sqrt(n (n+1)); violations raise with the
    offending inequality spelled out.
    """
    am = abs(m)
    bound = math.sqrt(max(n * (n + 1.0), 0.0))
    if n < -1e-12:
        raise UnphysicalMomentsError(f"occupation {n} < 0")
    if am > bound + 1e-9:
        raise UnphysicalMomentsError(
            f"|<aa>| = {am:.6e} exceeds sqrt(n(n+1)) = {bound:.6e}")
    am = min(am, bound)
    theta = float(np.angle(m)) if am > 0 else 0.0
    r = math.log((1 + 2 * n + 2 * am) / max(1 + 2 * n - 2 * am, 1e-300)) / 4.0
    nth = 0.5 * (math.sqrt(max((1 + 2 * n) ** 2 - 4 * am ** 2, 0.0)) - 1.0)
    return SqueezedThermalParams(theta=theta, r=r, n=max(nth, 0.0))


def squeezed_thermal_moments(p: SqueezedThermalParams) -> tuple[float, complex]:
    """Forward map: (theta, r, n_thermal) -> (occupation, anomalous moment)."""
    n = p.n * math.cosh(2 * p.r) + math.sinh(p.r) ** 2
    m = np.exp(1j * p.theta) * (p.n + 0.5) * math.sinh(2 * p.r)
    return float(n), complex(m)


def squeezed_thermal_dm(p: SqueezedThermalParams, dim: int) -> np.ndarray:
    """Squeezed thermal density matrix S(xi) rho_th(n) S(xi)^dag.

    The cutoff must hold both the thermal tail and the squeezing spread;
    the discarded tail is checked below 1e-10 aside from an optional
    flag.
    """
    ns = np.arange(dim)
    if p.n > 0:
        tail = (p.n / (1.0 + p.n)) ** dim
        # squeezing spreads the tail further; estimate with the total
        # occupation of the squeezed state instead of the bare thermal one
        n_eff, _ = squeezed_thermal_moments(p)
        tail_eff = (n_eff / (1.0 + n_eff)) ** dim if n_eff > 0 else 0.0
        if max(tail, tail_eff) > 1e-10:
            raise ValueError(
                f"cutoff {dim} too small for occupation {n_eff:.3g}")
    s = squeeze_op(p.r * np.exp(1j * p.theta), dim)
    return s @ thermal_dm(p.n, dim) @ s.conj().T


# ---------------------------------------------------------------------------
# real-space decoupling

def _kerr_field(p: ModelParams, feff: complex) -> complex:
    """<a> of the single-site Kerr steady state at drive ``feff``."""
    if p.U == 0:
        return feff / (p.Delta + 0.5j * p.gamma)
    from .kerr import correlation
    from .params import KerrParams
    return correlation(0, 1, KerrParams(Delta=p.Delta, U=p.U, F=feff,
                                        gamma=p.gamma))


def rdc_steady_state(params: ModelParams, n_max: int, seeds=None,
                     tol: float = 1e-10, max_iter: int = 500,
                     damping: float = 0.5) -> FixedPointReport:
    """Self-consistent single-site Kerr solution with F_eff = F - J <a>.

    The fixed-point condition F_eff = F - J <a>(F_eff) is solved by a
    Newton-type search in the complex drive (the closed-form Kerr field
    supplies <a>; ``damping`` only controls a fallback damped iteration
    used when the search fails).  The search runs from several seeds to
    expose coexisting fixed points; distinct solutions (product density
    matrices farther than 1e-6 apart) are all returned.
    """
    from scipy.optimize import root

    p = params
    dim = n_max + 1
    a_op = destroy(dim)
    if seeds is None:
        seeds = [0.0 + 0.0j]
        for b in homogeneous_roots(p):
            seeds.append(complex(b.alpha_site))
        # a few off-axis field seeds to catch basins the semiclassical
        # roots miss once quantum fluctuations shift the branches
        seeds.extend([0.5 + 0.0j, 1.0 - 0.5j, 0.5 + 0.5j, 1.5 - 1.0j])

    def residual(x):
        feff = x[0] + 1j * x[1]
        r = feff - p.F + p.J * _kerr_field(p, feff)
        return [r.real, r.imag]

    found = []
    feffs = []
    meta = []
    warnings = []
    total_iters = 0
    worst_residual = 0.0
    for seed in seeds:
        guess = p.F - p.J * complex(seed)
        sol = root(residual, [guess.real, guess.imag], method="hybr",
                   tol=1e-13)
        total_iters += sol.nfev
        res = float(max(abs(np.asarray(residual(sol.x)))))
        if not sol.success or res > tol:
            # fallback: damped Picard iteration from the same seed
            alpha = complex(seed)
            lam = damping
            prev = np.inf
            for _ in range(max_iter):
                feff = p.F - p.J * alpha
                new_alpha = _kerr_field(p, feff)
                res = abs((p.F - p.J * new_alpha) - feff)
                if res > prev:
                    lam = max(lam / 2.0, 1e-3)
                prev = res
                alpha = (1.0 - lam) * alpha + lam * new_alpha
                total_iters += 1
                if res < tol:
                    break
            if res > tol:
                worst_residual = max(worst_residual, res)
                warnings.append(
                    f"seed {seed}: no convergence, residual {res:.2e}")
                continue
            feff = p.F - p.J * alpha
        else:
            feff = sol.x[0] + 1j * sol.x[1]
        worst_residual = max(worst_residual, res)
        if any(abs(feff - f) < 1e-8 for f in feffs):
            continue
        feffs.append(feff)
        rho1 = steady_state(
            kerr_liouvillian(p.Delta, p.U, feff, p.gamma, dim))
        alpha = expectation(a_op, rho1)
        product = np.kron(rho1, rho1)
        if all(distance(product, s) > 1e-6 for s in found):
            found.append(product)
            meta.append({"seed": seed, "alpha": alpha, "F_eff": feff,
                         "top_population": float(rho1[-1, -1].real)})
            if rho1[-1, -1].real > TOP_POPULATION_FLAG:
                warnings.append("top Fock population above 1e-6; raise n_max")
    if not found:
        raise FixedPointError(
            f"no RDC fixed point converged; last residual {worst_residual:.2e}")
    return FixedPointReport(iterations=total_iters, residual=worst_residual,
                            converged=True, solutions=found,
                            meta=meta, warnings=warnings)


# ---------------------------------------------------------------------------
# reciprocal-space decoupling

def _bonding_liouvillian(p: ModelParams, dim, n_ab, m_ab):
    delta_eff = p.Delta + p.J - p.U * n_ab
    return kerr_liouvillian(delta_eff, p.U, math.sqrt(2) * p.F, p.gamma, dim,
                            kerr_scale=0.5, two_photon=(p.U / 4) * m_ab)


def _antibonding_liouvillian(p: ModelParams, dim, n_b, m_b):
    delta_eff = p.Delta - p.J - p.U * n_b
    return kerr_liouvillian(delta_eff, p.U, 0.0, p.gamma, dim,
                            kerr_scale=0.5, two_photon=(p.U / 4) * m_b)


def _mode_moments(rho, a_op):
    n = expectation(a_op.conj().T @ a_op, rho).real
    m = expectation(a_op @ a_op, rho)
    return n, m


def kdc_steady_state(params: ModelParams, n_max_B: int, n_max_AB: int,
                     tol: float = 1e-10, max_iter: int = 500,
                     damping: float = 0.5) -> FixedPointReport:
    """Coupled bonding / anti-bonding single-mode steady states.

    Each mode sees a Kerr term U/4 * a^dag^2 a^2, a cross-Kerr shift from
    the partner occupation and a two-photon drive (U/4) <a_partner^2>;
    only the bonding mode is driven linearly (amplitude sqrt(2) F).  The
    joint moment update is damped and iterated to ``tol``.
    """
    p = params
    dim_b, dim_ab = n_max_B + 1, n_max_AB + 1
    a_b, a_ab = destroy(dim_b), destroy(dim_ab)
    n_ab, m_ab = 0.0, 0.0 + 0.0j
    n_b, m_b = 0.0, 0.0 + 0.0j
    lam = damping
    prev_res = np.inf
    warnings = []
    rho_b = rho_ab = None
    for it in range(max_iter):
        rho_b = steady_state(_bonding_liouvillian(p, dim_b, n_ab, m_ab))
        nb_new, mb_new = _mode_moments(rho_b, a_b)
        rho_ab = steady_state(_antibonding_liouvillian(p, dim_ab, nb_new, mb_new))
        nab_new, mab_new = _mode_moments(rho_ab, a_ab)
        res = max(abs(nb_new - n_b), abs(mb_new - m_b),
                  abs(nab_new - n_ab), abs(mab_new - m_ab))
        if res > prev_res * 1.2:
            lam = max(lam / 2.0, 1e-3)
            warnings.append(f"iteration {it}: damping lowered to {lam:g}")
        prev_res = res
        n_b = (1 - lam) * n_b + lam * nb_new
        m_b = (1 - lam) * m_b + lam * mb_new
        n_ab = (1 - lam) * n_ab + lam * nab_new
        m_ab = (1 - lam) * m_ab + lam * mab_new
        if res < tol:
            break
    else:
        raise FixedPointError(
            f"KDC iteration did not converge; residual {prev_res:.2e}")
    for rho, name in ((rho_b, "bonding"), (rho_ab, "anti-bonding")):
        if rho[-1, -1].real > TOP_POPULATION_FLAG:
            warnings.append(f"{name} top Fock population above 1e-6")
    product = np.kron(rho_b, rho_ab)
    meta = [{"nB": n_b, "mB": m_b, "nAB": n_ab, "mAB": m_ab}]
    return FixedPointReport(iterations=it + 1, residual=prev_res,
                            converged=True, solutions=[product], meta=meta,
                            warnings=warnings)


def gaussian_ab_moments(p: ModelParams, n_b: float, m_b: complex
                        ) -> tuple[float, complex]:
    """Closed-form quadratic moments of the anti-bonding factor given the
    bonding moments (Gaussian closure of the decoupled master equation).

    The anomalous-moment equation is linear given the occupation and
    vice versa, so the pair solves in closed form.
    """
    if m_b == 0 or p.U == 0:
        return 0.0, 0.0 + 0.0j
    delta = -p.Delta + p.J + p.U * n_b
    k2 = -(p.U / 2) * m_b / (2.0 * (delta - 0.5j * p.gamma))
    t = (p.U / p.gamma) * (np.conj(m_b) * k2).imag
    n_ab = -t / (1.0 + 2.0 * t)
    if n_ab < 0:
        n_ab = max(n_ab, 0.0)
    m_ab = k2 * (2.0 * n_ab + 1.0)
    return float(n_ab), complex(m_ab)


def kdc_gaussian_ab(params: ModelParams, n_max_B: int, n_max_AB: int,
                    tol: float = 1e-10, max_iter: int = 500,
                    damping: float = 0.5) -> FixedPointReport:
    """KDC with the anti-bonding factor truncated to its Gaussian moments.

    The anti-bonding mode enters the loop only through (occupation,
    anomalous moment); its density matrix is reconstructed at the end as
    a squeezed thermal state.
    """
    p = params
    dim_b, dim_ab = n_max_B + 1, n_max_AB + 1
    a_b = destroy(dim_b)
    n_ab, m_ab = 0.0, 0.0 + 0.0j
    n_b, m_b = 0.0, 0.0 + 0.0j
    lam = damping
    prev_res = np.inf
    warnings = []
    rho_b = None
    for it in range(max_iter):
        rho_b = steady_state(_bonding_liouvillian(p, dim_b, n_ab, m_ab))
        nb_new, mb_new = _mode_moments(rho_b, a_b)
        nab_new, mab_new = gaussian_ab_moments(p, nb_new, mb_new)
        res = max(abs(nb_new - n_b), abs(mb_new - m_b),
                  abs(nab_new - n_ab), abs(mab_new - m_ab))
        if res > prev_res * 1.2:
            lam = max(lam / 2.0, 1e-3)
            warnings.append(f"iteration {it}: damping lowered to {lam:g}")
        prev_res = res
        n_b = (1 - lam) * n_b + lam * nb_new
        m_b = (1 - lam) * m_b + lam * mb_new
        n_ab = (1 - lam) * n_ab + lam * nab_new
        m_ab = (1 - lam) * m_ab + lam * mab_new
        if res < tol:
            break
    else:
        raise FixedPointError(
            f"Gaussian KDC iteration did not converge; residual {prev_res:.2e}")
    st = moments_to_squeezed_thermal(n_ab, m_ab)
    rho_ab = squeezed_thermal_dm(st, dim_ab)
    product = np.kron(rho_b, rho_ab)
    meta = [{"nB": n_b, "mB": m_b, "nAB": n_ab, "mAB": m_ab,
             "squeezed_thermal": st}]
    return FixedPointReport(iterations=it + 1, residual=prev_res,
                            converged=True, solutions=[product], meta=meta,
                            warnings=warnings)
