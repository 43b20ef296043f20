"""Semiclassical (Gross-Pitaevskii) steady states of the dimer.

The homogeneous on-site density solves a cubic, giving up to three
branches; dynamical stability is read off a 4x4 linearization covering
both the homogeneous (bonding-like) and the anti-bonding fluctuation
sectors.  The quadratic-fluctuation steady state of the full dimer
(occupations and anomalous moments of both reciprocal modes) is solved
here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from .params import KerrParams, ModelParams

ROOT_TOL = 1e-12


@dataclass(frozen=True)
class ScBranch:
    """One homogeneous semiclassical branch.

    ``stable`` reflects the full 4x4 linearization; the per-sector
    growth rates (largest real part of the bonding / anti-bonding
    fluctuation blocks) are kept so callers can distinguish the
    classic S-curve instability from a non-homogeneous one.
    """

    n: float
    alpha_B: complex
    stable: bool
    bonding_growth: float
    antibonding_growth: float

    @property
    def alpha_site(self) -> complex:
        """Per-site field (homogeneous): alpha = alpha_B / sqrt(2)."""
        return self.alpha_B / np.sqrt(2)


def _density_polynomial(jd: float, U: float, F: complex, gamma: float):
    """Coefficients of the cubic U^2 n^3 - 2 U jd n^2 + (jd^2+g^2/4) n - |F|^2."""
    return [U ** 2, -2.0 * U * jd, jd ** 2 + gamma ** 2 / 4.0, -abs(F) ** 2]


def _density_residual(n, jd, U, F, gamma):
    return n * ((-jd + U * n) ** 2 + gamma ** 2 / 4.0) - abs(F) ** 2


def _polish_root(n, jd, U, F, gamma):
    for _ in range(50):
        f = _density_residual(n, jd, U, F, gamma)
        df = (-jd + U * n) ** 2 + gamma ** 2 / 4.0 \
            + 2.0 * U * n * (-jd + U * n)
        if df == 0:
            break
        step = f / df
        n = n - step
        if abs(step) < 1e-16 * max(1.0, abs(n)):
            break
    return n


def _fluctuation_block(a_r: float, b: complex, gamma: float) -> np.ndarray:
    """Linearized drift matrix for (delta, delta*) in one sector."""
    A = a_r - 0.5j * gamma
    return -1j * np.array([[A, b], [-np.conj(b), -np.conj(A)]])


def stability_matrix(params: ModelParams, n: float,
                     alpha_site: complex) -> np.ndarray:
    """4x4 drift matrix of (bonding, anti-bonding) fluctuations around a
    homogeneous branch; stable iff all eigenvalues have Re < 0."""
    p = params
    b = p.U * alpha_site ** 2
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = _fluctuation_block(-p.Delta - p.J + 2 * p.U * n, b, p.gamma)
    m[2:, 2:] = _fluctuation_block(-p.Delta + p.J + 2 * p.U * n, b, p.gamma)
    return m


def homogeneous_roots(params: ModelParams) -> list[ScBranch]:
    """All homogeneous steady-state branches, sorted by density.

    Roots of the density cubic are taken from the companion matrix and
    polished by Newton; each is classified by the sign of the largest
    real part of the fluctuation matrix.
    """
    p = params
    jd = p.j_plus_delta
    if p.U == 0:
        roots = [abs(p.F) ** 2 / (jd ** 2 + p.gamma ** 2 / 4.0)]
    else:
        cand = np.roots(_density_polynomial(jd, p.U, p.F, p.gamma))
        roots = []
        for r in cand:
            if abs(r.imag) > 1e-7 * max(1.0, abs(r.real)):
                continue
            n = _polish_root(float(r.real), jd, p.U, p.F, p.gamma)
            if n >= -1e-12:
                roots.append(max(n, 0.0))
        # collapse numerically coincident roots (fold points)
        roots.sort()
        dedup: list[float] = []
        for n in roots:
            if not dedup or abs(n - dedup[-1]) > 1e-9 * max(1.0, n):
                dedup.append(n)
        roots = dedup
    branches = []
    for n in roots:
        denom = -jd - 0.5j * p.gamma + p.U * n
        alpha_b = -math.sqrt(2) * p.F / denom if denom != 0 else 0.0
        alpha_site = alpha_b / np.sqrt(2)
        mat = stability_matrix(p, n, alpha_site)
        eigs = np.linalg.eigvals(mat)
        growth_b = float(np.max(np.linalg.eigvals(mat[:2, :2]).real))
        growth_ab = float(np.max(np.linalg.eigvals(mat[2:, 2:]).real))
        branches.append(ScBranch(n=float(n), alpha_B=complex(alpha_b),
                                 stable=bool(np.max(eigs.real) < 0.0),
                                 bonding_growth=growth_b,
                                 antibonding_growth=growth_ab))
    return branches


def bistability_threshold_check(params: ModelParams) -> bool:
    """True when three branches are possible: J + Delta >= sqrt(3) gamma / 2."""
    return params.j_plus_delta >= math.sqrt(3.0) * params.gamma / 2.0


def jplusdelta_invariance_check(params: ModelParams, J_list,
                                tol: float = 1e-12) -> bool:
    """Check the branch densities depend on J and Delta only through J+Delta.

    Each entry of ``J_list`` is paired with Delta adjusted to keep the sum
    fixed; a mismatched sum is rejected outright.
    """
    jd = params.j_plus_delta
    base = [b.n for b in homogeneous_roots(params)]
    for j in J_list:
        trial = params.with_(J=j, Delta=jd - j)
        if abs(trial.j_plus_delta - jd) > 1e-12:
            raise ValueError("J list entry breaks the fixed J+Delta constraint")
        other = [b.n for b in homogeneous_roots(trial)]
        if len(other) != len(base):
            return False
        if any(abs(a - b) > tol * max(1.0, abs(a)) for a, b in zip(base, other)):
            return False
    return True


def kerr_semiclassical_fields(p: KerrParams) -> list[complex]:
    """Semiclassical fields of the single Kerr mode, sorted by density.

    Reuses the dimer cubic at J = 0, where the bonding combination
    reduces to sqrt(2) times the single-mode field.
    """
    dimer_like = ModelParams(J=0.0, Delta=p.Delta, U=p.U, F=p.F, gamma=p.gamma)
    return [complex(b.alpha_B) / math.sqrt(2)
            for b in homogeneous_roots(dimer_like)]


@dataclass(frozen=True)
class DimerGaussianMoments:
    """Quadratic-fluctuation steady state of the full dimer.

    The anti-bonding mode carries no field; bonding occupation and both
    anomalous moments obey the per-mode physicality bounds.
    """

    alpha_B: complex
    nB: float
    mB: complex
    nAB: float
    mAB: complex

    def __post_init__(self):
        if self.nB < abs(self.alpha_B) ** 2 - 1e-9:
            raise ValueError("bonding occupation below |alpha_B|^2")
        if self.nAB < -1e-9:
            raise ValueError("negative anti-bonding occupation")


def _dimer_gaussian_residual(x, p: ModelParams, alpha_b: complex):
    nB, mBr, mBi, nAB, mABr, mABi = x
    mB = mBr + 1j * mBi
    mAB = mABr + 1j * mABi
    aa = abs(alpha_b) ** 2
    msum = mAB + mB
    dnB = nB - aa
    e1 = p.gamma * dnB + p.U * (np.conj(msum) * (mB - alpha_b ** 2)).imag
    e2 = p.gamma * nAB + p.U * (np.conj(msum) * mAB).imag
    common = p.U * (nB + nAB) - 0.5j * p.gamma
    e3 = (2 * (-p.Delta - p.J + common) * (mB - alpha_b ** 2)
          + (p.U / 2) * msum * (1 + 2 * nB - 2 * aa))
    e4 = (2 * (-p.Delta + p.J + common) * mAB
          + (p.U / 2) * msum * (1 + 2 * nAB))
    return [e1, e2, e3.real, e3.imag, e4.real, e4.imag]


def dimer_gaussian_steady_state(params: ModelParams,
                                branch: ScBranch | None = None
                                ) -> DimerGaussianMoments:
    """Solve the four coupled moment equations of the dimer's Gaussian
    fluctuation theory around a homogeneous branch.

    Seeded at the coherent values (nB=|alpha_B|^2, mB=alpha_B^2, empty
    anti-bonding mode); the field's back-action from the quadratic
    moments is neglected.  Defaults to the lowest-density stable branch.
    """
    if branch is None:
        branches = homogeneous_roots(params)
        stable = [b for b in branches if b.stable]
        branch = (stable or branches)[0]
    ab = branch.alpha_B
    x0 = [abs(ab) ** 2, (ab ** 2).real, (ab ** 2).imag, 0.0, 0.0, 0.0]
    sol = root(_dimer_gaussian_residual, x0, args=(params, ab),
               method="hybr", tol=1e-13)
    res = np.max(np.abs(_dimer_gaussian_residual(sol.x, params, ab)))
    if not sol.success or res > 1e-10:
        raise RuntimeError(
            f"dimer Gaussian solve did not converge (residual {res:.3e}); "
            "likely near a semiclassical instability")
    nB, mBr, mBi, nAB, mABr, mABi = sol.x
    return DimerGaussianMoments(alpha_B=complex(ab), nB=float(nB),
                                mB=complex(mBr, mBi), nAB=float(nAB),
                                mAB=complex(mABr, mABi))


def integrate_fields(params: ModelParams, alpha1: complex, alpha2: complex,
                     t_final: float, rtol: float = 1e-10):
    """Time integration of the two-site semiclassical field equations
    (used to validate the stability classification)."""
    p = params

    def rhs(_, y):
        a1 = y[0] + 1j * y[1]
        a2 = y[2] + 1j * y[3]
        d1 = -1j * ((-p.Delta - 0.5j * p.gamma + p.U * abs(a1) ** 2) * a1
                    - p.J * a2 + p.F)
        d2 = -1j * ((-p.Delta - 0.5j * p.gamma + p.U * abs(a2) ** 2) * a2
                    - p.J * a1 + p.F)
        return [d1.real, d1.imag, d2.real, d2.imag]

    y0 = [alpha1.real, alpha1.imag, alpha2.real, alpha2.imag]
    out = solve_ivp(rhs, (0.0, t_final), y0, rtol=rtol, atol=1e-12,
                    dense_output=False)
    a1 = out.y[0, -1] + 1j * out.y[1, -1]
    a2 = out.y[2, -1] + 1j * out.y[3, -1]
    return a1, a2
