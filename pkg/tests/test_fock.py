"""Fock-space operators and the site <-> bonding/anti-bonding map."""

import numpy as np
import pytest

from bhdimer.fock import (FockSpace, beamsplitter_unitary,
                          build_mode_operators, destroy, number,
                          real_to_reciprocal_dm, to_reciprocal)
from bhdimer.states import coherent_state, fock_state


def test_space_validation():
    with pytest.raises(ValueError):
        FockSpace(n_max=0)
    with pytest.raises(ValueError):
        FockSpace(n_max=3, modes=3)
    s = FockSpace(n_max=4, modes=2)
    assert s.mode_dim == 5 and s.dim == 25


def test_destroy_matrix_elements():
    a = destroy(5)
    n = fock_state(3, 5)
    out = a @ n
    assert np.allclose(out, np.sqrt(3) * fock_state(2, 5))
    assert np.allclose(a @ fock_state(0, 5), 0)


def test_number_is_ada():
    a = destroy(6)
    assert np.allclose(number(6), a.conj().T @ a)


def test_commutator_truncation():
    # [a, a^dag] = 1 except in the highest Fock state
    a = destroy(8)
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert comm[-1, -1] == pytest.approx(-(8 - 1))


def test_two_mode_operators_commute_across_modes():
    s = FockSpace(n_max=3, modes=2)
    ops = build_mode_operators(s)
    c = ops["a1"] @ ops["ad2"] - ops["ad2"] @ ops["a1"]
    assert np.max(np.abs(c)) < 1e-14
    assert np.allclose(ops["n1"], ops["ad1"] @ ops["a1"])


def test_reciprocal_modes_are_canonical_combinations():
    s = FockSpace(n_max=4, modes=2)
    ops = build_mode_operators(s)
    rec = to_reciprocal(ops)
    assert np.allclose(rec["a_B"], (ops["a1"] + ops["a2"]) / np.sqrt(2))
    assert np.allclose(rec["a_AB"], (ops["a2"] - ops["a1"]) / np.sqrt(2))
    assert np.allclose(rec["n_B"], rec["ad_B"] @ rec["a_B"])


def test_total_number_is_basis_independent():
    s = FockSpace(n_max=5, modes=2)
    ops = build_mode_operators(s)
    rec = to_reciprocal(ops)
    n_sites = ops["n1"] + ops["n2"]
    n_modes = rec["n_B"] + rec["n_AB"]
    assert np.max(np.abs(n_sites - n_modes)) < 1e-12


def test_beamsplitter_is_unitary():
    s = FockSpace(n_max=5, modes=2)
    u = beamsplitter_unitary(s)
    assert np.max(np.abs(u @ u.conj().T - np.eye(s.dim))) < 1e-10


def test_beamsplitter_maps_site_to_mode_operators():
    """U a_B U^dag acts like a_1-style lowering in the rotated frame."""
    s = FockSpace(n_max=6, modes=2)
    ops = build_mode_operators(s)
    rec = to_reciprocal(ops)
    u = beamsplitter_unitary(s)
    d = s.mode_dim
    a_first = np.kron(destroy(d), np.eye(d))
    # restrict to the subspace of total occupation <= n_max where the
    # truncated rotation is exact
    ns = np.add.outer(np.arange(d), np.arange(d)).ravel()
    keep = ns <= s.n_max
    lhs = (u @ rec["a_B"] @ u.conj().T)[np.ix_(keep, keep)]
    rhs = a_first[np.ix_(keep, keep)]
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_dm_rotation_of_equal_coherent_product():
    """|alpha,alpha> rotates to |sqrt(2) alpha, 0> in the mode basis."""
    s = FockSpace(n_max=16, modes=2)
    alpha = 0.5 - 0.3j
    psi = np.kron(coherent_state(alpha, s.mode_dim),
                  coherent_state(alpha, s.mode_dim))
    rho = np.outer(psi, psi.conj())
    rho_k = real_to_reciprocal_dm(rho, s)
    target = np.kron(coherent_state(np.sqrt(2) * alpha, s.mode_dim),
                     coherent_state(0.0, s.mode_dim))
    rho_t = np.outer(target, target.conj())
    assert np.max(np.abs(rho_k - rho_t)) < 1e-8


def test_dm_rotation_preserves_trace_and_hermiticity(rng):
    from conftest import random_density_matrix
    s = FockSpace(n_max=3, modes=2)
    rho = random_density_matrix(rng, s.dim, rank=4)
    rho_k = real_to_reciprocal_dm(rho, s)
    assert abs(np.trace(rho_k) - 1.0) < 1e-12
    assert np.max(np.abs(rho_k - rho_k.conj().T)) < 1e-12
