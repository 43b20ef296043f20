"""Mean-field decouplings: site-basis and mode-basis self-consistency."""

import numpy as np
import pytest

from bhdimer.fock import FockSpace, build_mode_operators, destroy
from bhdimer.gutzwiller import (SqueezedThermalParams, UnphysicalMomentsError,
                                kdc_gaussian_ab, kdc_steady_state,
                                moments_to_squeezed_thermal, rdc_steady_state,
                                squeezed_thermal_dm, squeezed_thermal_moments)
from bhdimer.kerr import correlation
from bhdimer.liouvillian import build_liouvillian, kerr_steady_state, steady_state
from bhdimer.params import KerrParams, ModelParams
from bhdimer.states import distance, expectation

N_MAX = 10


# ---------------------------------------------------------------------------
# squeezed thermal parametrization

def test_squeezed_thermal_round_trip(rng):
    """moments -> (theta, r, n_th) -> moments is the identity on 50
    random physical pairs."""
    for _ in range(50):
        n = float(rng.uniform(0.0, 3.0))
        bound = np.sqrt(n * (n + 1.0))
        m = (0.999 * bound * float(rng.uniform(0, 1))
             * np.exp(2j * np.pi * float(rng.uniform(0, 1))))
        st = moments_to_squeezed_thermal(n, m)
        n2, m2 = squeezed_thermal_moments(st)
        assert abs(n2 - n) < 1e-9
        assert abs(m2 - m) < 1e-9


def test_squeezed_thermal_rejects_unphysical():
    with pytest.raises(UnphysicalMomentsError):
        moments_to_squeezed_thermal(0.1, 1.0 + 0j)
    with pytest.raises(UnphysicalMomentsError):
        moments_to_squeezed_thermal(-0.5, 0.0 + 0j)


def test_squeezed_thermal_dm_reproduces_moments():
    st = SqueezedThermalParams(theta=0.7, r=0.3, n=0.4)
    dim = 40
    rho = squeezed_thermal_dm(st, dim)
    a = destroy(dim)
    n_exp = expectation(a.conj().T @ a, rho).real
    m_exp = expectation(a @ a, rho)
    n_ref, m_ref = squeezed_thermal_moments(st)
    assert abs(n_exp - n_ref) < 1e-8
    assert abs(m_exp - m_ref) < 1e-8


def test_squeezed_thermal_dm_cutoff_guard():
    with pytest.raises(ValueError):
        squeezed_thermal_dm(SqueezedThermalParams(theta=0.0, r=0.1, n=5.0), 8)


# ---------------------------------------------------------------------------
# site-basis decoupling

def test_rdc_zero_hopping_is_exact():
    """J=0 removes the mean-field coupling: the product of closed-form
    single-site states is the exact steady state."""
    p = ModelParams(J=0.0, Delta=1.0, U=1.0, F=0.4)
    rep = rdc_steady_state(p, N_MAX)
    assert rep.converged and len(rep.solutions) == 1
    k = KerrParams(Delta=1.0, U=1.0, F=0.4)
    assert abs(rep.meta[0]["alpha"] - correlation(0, 1, k)) < 1e-8
    assert abs(rep.meta[0]["F_eff"] - 0.4) < 1e-12

    s = FockSpace(n_max=N_MAX, modes=2)
    rho_exact = steady_state(build_liouvillian(p, s))
    assert distance(rep.solutions[0], rho_exact) < 1e-6


def test_rdc_field_is_self_consistent():
    p = ModelParams(J=0.3, Delta=1.0, U=1.0, F=0.5)
    rep = rdc_steady_state(p, N_MAX)
    for m in rep.meta:
        assert abs(m["F_eff"] - (p.F - p.J * m["alpha"])) < 1e-8


def test_rdc_multistability_at_strong_hopping():
    """Beyond the onset the decoupled theory carries coexisting
    solutions (the artifact probed by the density-difference order
    parameter)."""
    p = ModelParams(J=2.0, Delta=1.75 - 2.0 + 0.25, U=1.0, F=1.05)
    # keep J + Delta = 2.0 while raising J beyond the onset
    rep = rdc_steady_state(p, 12)
    assert len(rep.solutions) >= 2


def test_rdc_unique_at_weak_hopping():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=1.05)
    rep = rdc_steady_state(p, 12)
    assert len(rep.solutions) == 1


# ---------------------------------------------------------------------------
# mode-basis decoupling

def test_kdc_linear_model_matches_exact():
    """U=0 decouples the modes exactly: bonding is a displaced vacuum,
    anti-bonding empty."""
    p = ModelParams(J=0.4, Delta=1.0, U=0.0, F=0.4)
    rep = kdc_steady_state(p, n_max_B=N_MAX, n_max_AB=6)
    m = rep.meta[0]
    alpha_ref = np.sqrt(2) * p.F / (p.j_plus_delta + 0.5j * p.gamma)
    assert abs(m["nB"] - abs(alpha_ref) ** 2) < 1e-8
    assert abs(m["nAB"]) < 1e-10
    assert abs(m["mAB"]) < 1e-10


def test_kdc_moments_self_consistent():
    p = ModelParams(J=0.5, Delta=1.5, U=1.0, F=0.6)
    rep = kdc_steady_state(p, n_max_B=N_MAX, n_max_AB=8)
    rho = rep.solutions[0]
    dim_b, dim_ab = N_MAX + 1, 9
    a_b = np.kron(destroy(dim_b), np.eye(dim_ab))
    n_b = expectation(a_b.conj().T @ a_b, rho).real
    assert abs(n_b - rep.meta[0]["nB"]) < 1e-7


def test_kdc_beats_product_ansatz_at_large_hopping():
    """At strong hopping the mode-basis product is closer to the exact
    state than the site-basis product."""
    nm = 8
    p = ModelParams(J=2.0, Delta=0.0, U=1.0, F=1.05)
    s = FockSpace(n_max=nm, modes=2)
    from bhdimer.fock import real_to_reciprocal_dm
    rho_exact = steady_state(build_liouvillian(p, s))
    rho_exact_k = real_to_reciprocal_dm(rho_exact, s)
    rep_k = kdc_steady_state(p, n_max_B=nm, n_max_AB=nm)
    rep_r = rdc_steady_state(p, nm)
    d_k = distance(rep_k.solutions[0], rho_exact_k)
    d_r = min(distance(sol, rho_exact) for sol in rep_r.solutions)
    assert d_k < d_r


def test_gaussian_ab_matches_full_kdc_when_ab_nearly_gaussian():
    p = ModelParams(J=1.0, Delta=0.75, U=1.0, F=1.05)
    rep_full = kdc_steady_state(p, n_max_B=N_MAX, n_max_AB=8)
    rep_g = kdc_gaussian_ab(p, n_max_B=N_MAX, n_max_AB=8)
    mf, mg = rep_full.meta[0], rep_g.meta[0]
    assert abs(mf["nB"] - mg["nB"]) < 0.02 * max(1.0, mf["nB"])
    assert abs(mf["nAB"] - mg["nAB"]) < 0.02 * max(1.0, mf["nAB"])
    assert abs(mf["mAB"] - mg["mAB"]) < 0.05 * max(1.0, abs(mf["mAB"]))
