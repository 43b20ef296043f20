"""Density matrices, pure states and the fidelity distance.

All states are dense complex ndarrays.  Validation tolerances follow the
conventions used throughout the package: trace and Hermiticity to 1e-10,
positivity to -1e-8 on the smallest eigenvalue.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .fock import destroy

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
PSD_TOL = 1e-8


class InvalidStateError(ValueError):
    """A matrix failed the density-matrix invariants."""


def validate_density_matrix(rho: np.ndarray, *, trace_tol: float = TRACE_TOL,
                            herm_tol: float = HERM_TOL,
                            psd_tol: float = PSD_TOL) -> None:
    """Raise InvalidStateError unless rho is trace-one, Hermitian and PSD."""
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise InvalidStateError(f"Hermiticity violation {herm:.3e}")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -psd_tol:
        raise InvalidStateError(f"negative eigenvalue {lo:.3e}")


def clean_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Hermitize, clip negative eigenvalues at zero and renormalize."""
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """Tr[op rho]."""
    if op.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {op.shape} vs {rho.shape}")
    return complex(np.einsum("ij,ji->", op, rho))


def variance(op: np.ndarray, rho: np.ndarray) -> float:
    """<op^2> - <op>^2 for a Hermitian operator."""
    m1 = expectation(op, rho)
    m2 = expectation(op @ op, rho)
    return (m2 - m1 * m1).real


def psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Matrix square root via Hermitian eigendecomposition, eigenvalues
    floored at zero."""
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Quantum fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma)), in [0, 1]."""
    if rho.shape != sigma.shape:
        raise ValueError("states live on different spaces")
    s = psd_sqrt(sigma)
    w = np.linalg.eigvalsh(s @ rho @ s)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity distance 1 - f(rho, sigma); zero iff the states coincide."""
    return 1.0 - fidelity(rho, sigma)


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced density matrix of one factor of a bipartite state.

    Parameters
    ----------
    dims : (d1, d2) factor dimensions, first factor leftmost in the kron.
    keep : 0 or 1, the factor to keep.
    """
    d1, d2 = dims
    r = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    if keep == 1:
        return np.einsum("kikj->ij", r)
    raise ValueError("keep must be 0 or 1")


# ---------------------------------------------------------------------------
# pure-state and standard-state constructors

def fock_state(n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise ValueError(f"occupation {n} outside truncated space of dim {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Coherent state vector, renormalized on the truncated space."""
    ns = np.arange(dim)
    from scipy.special import gammaln
    log_fact = gammaln(ns + 1.0)
    amp = np.exp(ns * np.log(complex(alpha)) - 0.5 * log_fact) if alpha != 0 \
        else np.eye(dim, 1, dtype=complex).ravel()
    psi = amp * np.exp(-0.5 * abs(alpha) ** 2) if alpha != 0 else amp
    return psi / np.linalg.norm(psi)


def displacement_op(alpha: complex, dim: int) -> np.ndarray:
    a = destroy(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_op(xi: complex, dim: int) -> np.ndarray:
    """Squeezing operator exp[(xi a^dag^2 - xi* a^2)/2]."""
    a = destroy(dim)
    ad = a.conj().T
    return expm(0.5 * (xi * ad @ ad - np.conj(xi) * a @ a))


def thermal_dm(nbar: float, dim: int) -> np.ndarray:
    """Diagonal geometric (thermal) state with mean occupation nbar."""
    if nbar < 0:
        raise ValueError(f"thermal occupation must be >= 0, got {nbar}")
    if nbar == 0:
        p = np.zeros(dim)
        p[0] = 1.0
    else:
        ns = np.arange(dim)
        p = np.exp(ns * np.log(nbar / (1.0 + nbar))) / (1.0 + nbar)
        p = p / p.sum()
    return np.diag(p).astype(complex)
