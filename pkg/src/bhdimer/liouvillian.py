"""Lindblad generators and steady-state solvers.

Density matrices are vectorized row-major, so vec(A X B) =
(A kron B^T) vec(X).  Generators are assembled sparse; small problems may
be solved by dense null-space extraction, large ones by a sparse LU solve
with the trace condition replacing one row.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import FockSpace, build_mode_operators, to_reciprocal
from .params import ModelParams
from .states import clean_density_matrix

#: Refuse to build superoperators beyond this Hilbert-space dimension
#: (dim^2 x dim^2 sparse matrix; ~500 keeps the LU factor in memory).
MAX_DIM = 700

RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-12


class SteadyStateError(RuntimeError):
    pass


class DegenerateSteadyStateError(SteadyStateError):
    """The generator has (numerically) more than one zero eigenvalue."""


def _dissipator(a: sp.spmatrix, rate: float) -> sp.spmatrix:
    ada = (a.conj().T @ a).tocsr()
    eye = sp.identity(a.shape[0], format="csr")
    return (rate / 2.0) * (2.0 * sp.kron(a, a.conj())
                           - sp.kron(ada, eye) - sp.kron(eye, ada.T))


def lindblad_superoperator(H: np.ndarray, jump_ops, rates) -> sp.csr_matrix:
    """Sparse generator of d rho/dt = -i[H, rho] + sum_k D[a_k] rho."""
    dim = H.shape[0]
    if dim > MAX_DIM:
        raise MemoryError(
            f"Hilbert dimension {dim} exceeds superoperator budget {MAX_DIM}")
    Hs = sp.csr_matrix(H)
    eye = sp.identity(dim, format="csr")
    L = -1j * (sp.kron(Hs, eye) - sp.kron(eye, Hs.T))
    for a, rate in zip(jump_ops, rates):
        L = L + _dissipator(sp.csr_matrix(a), rate)
    return L.tocsr()


def dimer_hamiltonian(params: ModelParams, space: FockSpace,
                      basis: str = "real") -> np.ndarray:
    """Two-mode dimer Hamiltonian in the site or bonding/anti-bonding basis.

    In the reciprocal basis the elementary factors of the tensor product
    are the bonding and anti-bonding modes themselves, with the quartic
    interaction expanded into self-Kerr, cross-Kerr and pair-exchange
    terms.
    """
    if space.modes != 2:
        raise ValueError("dimer Hamiltonian requires a two-mode space")
    p = params
    ops = build_mode_operators(space)
    if basis == "real":
        h = -p.J * (ops["ad1"] @ ops["a2"] + ops["ad2"] @ ops["a1"])
        for j in (1, 2):
            a, ad, n = ops[f"a{j}"], ops[f"ad{j}"], ops[f"n{j}"]
            h = h - p.Delta * n + (p.U / 2) * (ad @ ad @ a @ a)
            h = h + p.F * ad + np.conj(p.F) * a
        return h
    if basis == "reciprocal":
        d = space.mode_dim
        eye = np.eye(d, dtype=complex)
        from .fock import destroy
        a = destroy(d)
        a_b, a_ab = np.kron(a, eye), np.kron(eye, a)
        h = np.zeros((space.dim, space.dim), dtype=complex)
        for am, sign in ((a_b, -1.0), (a_ab, +1.0)):
            adm = am.conj().T
            h = h + (-p.Delta + sign * p.J) * (adm @ am)
            h = h + (p.U / 4) * (adm @ adm @ am @ am)
        ad_b, ad_ab = a_b.conj().T, a_ab.conj().T
        h = h + np.sqrt(2) * (p.F * ad_b + np.conj(p.F) * a_b)
        h = h + (p.U / 4) * (ad_b @ ad_b @ a_ab @ a_ab
                             + ad_ab @ ad_ab @ a_b @ a_b
                             + 4 * (ad_ab @ a_ab) @ (ad_b @ a_b))
        return h
    raise ValueError(f"unknown basis {basis!r}")


def build_liouvillian(params: ModelParams, space: FockSpace,
                      basis: str = "real") -> sp.csr_matrix:
    """Lindblad generator of the dimer master equation.

    Loss acts with rate gamma on each elementary mode; the Lindblad part
    has the same form in either basis.
    """
    h = dimer_hamiltonian(params, space, basis)
    d = space.mode_dim
    eye = np.eye(d, dtype=complex)
    from .fock import destroy
    a = destroy(d)
    jumps = [np.kron(a, eye), np.kron(eye, a)]
    return lindblad_superoperator(h, jumps, [params.gamma, params.gamma])


def kerr_hamiltonian(delta: float, U: float, F: complex, dim: int,
                     *, two_photon: complex = 0.0,
                     kerr_scale: float = 1.0) -> np.ndarray:
    """Single Kerr mode Hamiltonian -delta n + (U/2) K + drive (+ pair terms).

    ``two_photon`` adds tp * a^dag^2 + tp^* a^2, as generated by the
    reciprocal-space mean-field decoupling.  ``kerr_scale`` rescales the
    quartic coefficient (the reciprocal basis uses U/4 per mode).
    """
    from .fock import destroy
    a = destroy(dim)
    ad = a.conj().T
    h = -delta * (ad @ a) + kerr_scale * (U / 2) * (ad @ ad @ a @ a)
    h = h + F * ad + np.conj(F) * a
    if two_photon != 0.0:
        h = h + two_photon * (ad @ ad) + np.conj(two_photon) * (a @ a)
    return h


def kerr_liouvillian(delta: float, U: float, F: complex, gamma: float,
                     dim: int, **kwargs) -> sp.csr_matrix:
    from .fock import destroy
    h = kerr_hamiltonian(delta, U, F, dim, **kwargs)
    return lindblad_superoperator(h, [destroy(dim)], [gamma])


def liouvillian_residual(L: sp.spmatrix, rho: np.ndarray) -> float:
    """max |L[rho]| elementwise."""
    return float(np.max(np.abs(L @ rho.reshape(-1))))


@dataclass
class SpectralGap:
    smallest: float
    second: float


def null_space_gap(L: sp.spmatrix, k: int = 2) -> SpectralGap:
    """Moduli of the two eigenvalues of L closest to zero."""
    vals = spla.eigs(L.tocsc(), k=k, sigma=1e-12, which="LM",
                     return_eigenvectors=False)
    mags = np.sort(np.abs(vals))
    return SpectralGap(float(mags[0]), float(mags[1]))


def _solve_with_trace_row(M: sp.csc_matrix, b: np.ndarray,
                          L: sp.spmatrix) -> np.ndarray:
    """Solve the trace-constrained system, cheapest method first.

    An incomplete-LU preconditioned LGMRES solve is attempted before the
    full sparse LU (MMD ordering), which is several times slower on the
    dimer generators but unconditionally robust.
    """
    try:
        ilu = spla.spilu(M, drop_tol=1e-5, fill_factor=10)
        pre = spla.LinearOperator(M.shape, ilu.solve)
        # a working ILU converges in a handful of outer iterations; a
        # stagnating one (strong hopping) never recovers, so cap the
        # budget and hand stubborn systems to the exact LU instead
        x, info = spla.lgmres(M, b, M=pre, rtol=1e-13, atol=0.0, maxiter=40)
        if info == 0:
            dim = int(round(np.sqrt(len(x))))
            tr = np.trace(x.reshape(dim, dim))
            if np.max(np.abs(L @ x)) < RESIDUAL_TOL * abs(tr):
                return x
    except RuntimeError:
        pass  # singular ILU factor; fall through to the exact LU
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            lu = spla.splu(M, permc_spec="MMD_AT_PLUS_A")
        except (RuntimeError, spla.MatrixRankWarning) as exc:
            raise DegenerateSteadyStateError(
                "singular system: degenerate null space") from exc
    return lu.solve(b)


def steady_state(L: sp.spmatrix, *, check_unique: bool = False,
                 residual_tol: float = RESIDUAL_TOL,
                 method: str = "auto") -> np.ndarray:
    """Steady-state density matrix of a Lindblad generator.

    The default path replaces the first row of L with the trace
    functional and solves the sparse linear system; ``method='eig'``
    extracts the null vector from a dense eigendecomposition (small
    problems only).  The result is Hermitized, clipped to positive
    semidefinite and normalized; the raw residual max|L rho| is checked
    against ``residual_tol`` before cleanup.
    """
    n2 = L.shape[0]
    dim = int(round(np.sqrt(n2)))
    if dim * dim != n2:
        raise ValueError("superoperator dimension is not a perfect square")

    if method == "auto":
        method = "eig" if n2 <= 4096 else "solve"

    if check_unique:
        gap = null_space_gap(L)
        if gap.second < DEGENERACY_TOL:
            raise DegenerateSteadyStateError(
                f"second eigenvalue modulus {gap.second:.3e}: degenerate "
                "null space (raise the cutoff or perturb the parameters)")

    if method == "eig":
        vals, vecs = np.linalg.eig(L.toarray())
        order = np.argsort(np.abs(vals))
        if len(order) > 1 and np.abs(vals[order[1]]) < DEGENERACY_TOL:
            raise DegenerateSteadyStateError(
                f"second eigenvalue modulus {np.abs(vals[order[1]]):.3e}")
        vec = vecs[:, order[0]]
    elif method == "solve":
        M = L.tolil(copy=True)
        trace_row = np.zeros(n2, dtype=complex)
        trace_row[np.arange(dim) * dim + np.arange(dim)] = 1.0
        M[0, :] = trace_row
        M = M.tocsc()
        b = np.zeros(n2, dtype=complex)
        b[0] = 1.0
        vec = _solve_with_trace_row(M, b, L)
    else:
        raise ValueError(f"unknown method {method!r}")

    rho = vec.reshape(dim, dim)
    rho = rho / np.trace(rho)
    res = liouvillian_residual(L, rho)
    if res > residual_tol:
        raise SteadyStateError(
            f"steady-state residual {res:.3e} exceeds {residual_tol:.1e}")
    return clean_density_matrix(rho)


def propagate_to_steady_state(L: sp.spmatrix, rho0: np.ndarray,
                              t_final: float = 200.0,
                              residual_tol: float = 1e-8) -> np.ndarray:
    """Fallback long-time integration exp(L t) rho0 (flagged alternative
    to the algebraic solve)."""
    vec = spla.expm_multiply(L.tocsc() * t_final, rho0.reshape(-1))
    dim = rho0.shape[0]
    rho = vec.reshape(dim, dim)
    rho = rho / np.trace(rho)
    res = liouvillian_residual(L, rho)
    if res > residual_tol:
        raise SteadyStateError(
            f"propagation residual {res:.3e} after t={t_final}")
    return clean_density_matrix(rho)


def kerr_steady_state(delta: float, U: float, F: complex, gamma: float,
                      dim: int, **kwargs) -> np.ndarray:
    """Convenience: numeric steady state of a single Kerr mode."""
    return steady_state(kerr_liouvillian(delta, U, F, gamma, dim, **kwargs))
