"""EPR-type entanglement witness on the bonding/anti-bonding pair."""

import numpy as np
import pytest
from conftest import random_density_matrix

from bhdimer.entanglement import (EprReport, epr_from_gaussian,
                                  epr_variance_sum, optimal_theta_at_large_J,
                                  quadrature_ops, single_mode_asymptote)
from bhdimer.fock import FockSpace, build_mode_operators, to_reciprocal
from bhdimer.params import ModelParams
from bhdimer.semiclassical import DimerGaussianMoments
from bhdimer.states import coherent_state, expectation, fock_state, squeeze_op


def test_report_properties():
    r = EprReport(theta=0.3, var_u=0.7, var_v=0.9)
    assert r.sum == pytest.approx(1.6)
    assert r.entangled
    assert not EprReport(theta=0.0, var_u=1.0, var_v=1.0).entangled
    with pytest.raises(ValueError):
        EprReport(theta=0.0, var_u=-0.1, var_v=1.0)


def test_quadratures_canonical_commutator():
    from bhdimer.fock import destroy
    a = destroy(10)
    for theta in (0.0, 0.5, 1.7):
        x, p = quadrature_ops(a, theta)
        comm = x @ p - p @ x
        assert np.max(np.abs(np.diag(comm)[:-1] - 1j)) < 1e-12


def test_vacuum_saturates_witness():
    s = FockSpace(n_max=4, modes=2)
    psi = np.kron(fock_state(0, s.mode_dim), fock_state(0, s.mode_dim))
    rho = np.outer(psi, psi.conj())
    for theta in (0.0, 0.8):
        r = epr_variance_sum(rho, s, theta)
        assert r.sum == pytest.approx(2.0, abs=1e-10)
        assert not r.entangled


def test_coherent_product_saturates_witness():
    s = FockSpace(n_max=16, modes=2)
    psi = np.kron(coherent_state(0.4 - 0.2j, s.mode_dim),
                  coherent_state(0.4 - 0.2j, s.mode_dim))
    rho = np.outer(psi, psi.conj())
    r = epr_variance_sum(rho, s, 0.6)
    assert r.sum == pytest.approx(2.0, abs=1e-8)


def test_separable_states_never_fire_witness(rng):
    """100 random product states in the mode basis stay at or above the
    separability bound."""
    s = FockSpace(n_max=3, modes=2)
    d = s.mode_dim
    from bhdimer.fock import beamsplitter_unitary
    u = beamsplitter_unitary(s)
    for _ in range(100):
        rho_modes = np.kron(random_density_matrix(rng, d, rank=2),
                            random_density_matrix(rng, d, rank=2))
        # rotate the mode-basis product into the site basis the witness
        # expects
        rho_sites = u.conj().T @ rho_modes @ u
        theta = float(rng.uniform(0, np.pi))
        r = epr_variance_sum(rho_sites, s, theta)
        assert r.sum >= 2.0 - 1e-8


def test_heisenberg_bound_each_mode(rng):
    """Var u * Var v per-mode products obey the uncertainty relation."""
    s = FockSpace(n_max=4, modes=2)
    ops = to_reciprocal(build_mode_operators(s))
    for _ in range(20):
        rho = random_density_matrix(rng, s.dim, rank=3)
        theta = float(rng.uniform(0, np.pi))
        x, p = quadrature_ops(ops["a_B"], theta)
        vx = (expectation(x @ x, rho) - expectation(x, rho) ** 2).real
        vp = (expectation(p @ p, rho) - expectation(p, rho) ** 2).real
        # truncation spoils the commutator only near the cutoff edge
        assert vx * vp >= 0.20


def test_squeezed_bonding_mode_fires_witness():
    """A squeezed bonding mode with empty anti-bonding partner reaches
    sum = e^{-2r} + 1 at the right angle."""
    r = 0.4
    s = FockSpace(n_max=20, modes=2)
    d = s.mode_dim
    psi_b = squeeze_op(r, d) @ fock_state(0, d)
    rho_modes = np.kron(np.outer(psi_b, psi_b.conj()),
                        np.outer(fock_state(0, d), fock_state(0, d)))
    from bhdimer.fock import beamsplitter_unitary
    u = beamsplitter_unitary(s)
    rho_sites = u.conj().T @ rho_modes @ u
    rep = epr_variance_sum(rho_sites, s, np.pi / 2)
    assert rep.sum == pytest.approx(np.exp(-2 * r) + 1.0, abs=1e-6)
    assert rep.entangled


def test_gaussian_moment_route_agrees_with_operator_route():
    s = FockSpace(n_max=20, modes=2)
    d = s.mode_dim
    r = 0.3
    psi_b = squeeze_op(r, d) @ fock_state(0, d)
    rho_modes = np.kron(np.outer(psi_b, psi_b.conj()),
                        np.outer(fock_state(0, d), fock_state(0, d)))
    from bhdimer.fock import beamsplitter_unitary, destroy
    u = beamsplitter_unitary(s)
    rho_sites = u.conj().T @ rho_modes @ u
    a = destroy(d)
    n_b = expectation(a.conj().T @ a, np.outer(psi_b, psi_b.conj())).real
    m_b = expectation(a @ a, np.outer(psi_b, psi_b.conj()))
    g = DimerGaussianMoments(alpha_B=0j, nB=n_b, mB=m_b, nAB=0.0, mAB=0j)
    for theta in (0.2, np.pi / 2):
        r1 = epr_variance_sum(rho_sites, s, theta)
        r2 = epr_from_gaussian(g, theta)
        assert abs(r1.var_u - r2.var_u) < 1e-6
        assert abs(r1.var_v - r2.var_v) < 1e-6


def test_single_mode_asymptote_linear_model():
    p = ModelParams(J=10.0, Delta=-9.0, U=0.0, F=0.5)
    assert single_mode_asymptote(p) == 2.0
    assert optimal_theta_at_large_J(p) == 0.0


def test_single_mode_asymptote_from_bonding_variance():
    from bhdimer.kerr import min_quadrature_variance
    p = ModelParams(J=10.0, Delta=-8.0, U=1.0, F=0.5)
    _, v = min_quadrature_variance(p.bonding_limit())
    assert single_mode_asymptote(p) == pytest.approx(2 * v + 1, abs=1e-12)
    # squeezing below vacuum pushes the asymptote below the bound
    assert single_mode_asymptote(p) < 2.0
