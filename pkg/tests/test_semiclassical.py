"""Semiclassical branches, stability, and dimer Gaussian moments."""

import numpy as np
import pytest

from bhdimer.params import KerrParams, ModelParams
from bhdimer.semiclassical import (DimerGaussianMoments,
                                   bistability_threshold_check,
                                   dimer_gaussian_steady_state,
                                   homogeneous_roots, integrate_fields,
                                   jplusdelta_invariance_check,
                                   kerr_semiclassical_fields)


def _residual(p, n):
    """n |J+Delta+i gamma/2 - U n|^2 = |F|^2 on a homogeneous branch."""
    jd = p.j_plus_delta
    return abs(-jd - 0.5j * p.gamma + p.U * n) ** 2 * n - abs(p.F) ** 2


def test_roots_satisfy_density_cubic():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=1.0)
    branches = homogeneous_roots(p)
    for b in branches:
        assert abs(_residual(p, b.n)) < 1e-9
        # field and density are consistent
        assert abs(abs(b.alpha_B) ** 2 - 2 * b.n) < 1e-9


def test_linear_limit_single_root():
    p = ModelParams(J=0.25, Delta=0.75, U=0.0, F=0.6)
    branches = homogeneous_roots(p)
    assert len(branches) == 1
    expected = abs(p.F) ** 2 / (p.j_plus_delta ** 2 + 0.25)
    assert branches[0].n == pytest.approx(expected, rel=1e-10)
    assert branches[0].stable


def test_bistable_window_three_branches():
    """S-curve: three roots inside the window, middle one unstable."""
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.9)
    branches = homogeneous_roots(p)
    assert len(branches) == 3
    ns = [b.n for b in branches]
    assert ns == sorted(ns)
    assert branches[0].stable
    assert not branches[1].stable  # middle branch
    assert branches[1].bonding_growth > 0


def test_single_branch_outside_window():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.2)
    assert len(homogeneous_roots(p)) == 1
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=1.6)
    assert len(homogeneous_roots(p)) == 1


def test_threshold_condition():
    assert bistability_threshold_check(
        ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.5))
    assert not bistability_threshold_check(
        ModelParams(J=0.1, Delta=0.2, U=1.0, F=0.5))


def test_branch_structure_depends_on_sum_only():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.9)
    assert jplusdelta_invariance_check(p, [0.02, 0.5, 1.0, 1.9])


def test_kerr_fields_reduce_to_dimer_at_zero_hopping():
    k = KerrParams(Delta=2.0, U=1.0, F=0.9 / np.sqrt(1.0))
    fields = kerr_semiclassical_fields(k)
    p = ModelParams(J=0.0, Delta=2.0, U=1.0, F=0.9)
    site_fields = [b.alpha_site for b in homogeneous_roots(p)]
    assert len(fields) == len(site_fields)
    for f, s in zip(sorted(fields, key=abs), sorted(site_fields, key=abs)):
        assert abs(f - s) < 1e-9


def test_fields_are_fixed_points_of_the_flow():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.9)
    for b in homogeneous_roots(p):
        a = b.alpha_site
        traj = integrate_fields(p, a, a, t_final=5.0)
        assert abs(traj[0] - a) < 1e-6
        assert abs(traj[1] - a) < 1e-6


def test_flow_relaxes_to_stable_branch():
    p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.4)
    (b,) = homogeneous_roots(p)
    traj = integrate_fields(p, 0.0, 0.0, t_final=80.0)
    assert abs(traj[0] - b.alpha_site) < 1e-6


def test_gaussian_moment_container_validation():
    with pytest.raises(ValueError):
        DimerGaussianMoments(alpha_B=1.0 + 0j, nB=0.2, mB=0j, nAB=0.0, mAB=0j)


def test_dimer_gaussian_reduces_to_single_mode():
    """Quadratic fluctuation theory around the dimer branch matches the
    single-mode version applied to the bonding mode."""
    from bhdimer.kerr import gaussian_fluctuations
    p = ModelParams(J=1.0, Delta=0.0, U=0.04, F=0.25 / 0.2)
    g = dimer_gaussian_steady_state(p)
    k = p.bonding_limit()
    fields = kerr_semiclassical_fields(k)
    alpha = min(fields, key=lambda a: abs(a - g.alpha_B))
    gk = gaussian_fluctuations(k, alpha)
    assert abs(g.nB - gk.n) < 5e-3 * max(1.0, gk.n)
    assert abs(g.mB - gk.m) < 5e-3 * max(1.0, abs(gk.m))


def test_dimer_gaussian_antibonding_nearly_empty():
    p = ModelParams(J=1.0, Delta=0.0, U=0.02, F=0.5)
    g = dimer_gaussian_steady_state(p)
    assert g.nAB < 0.05
