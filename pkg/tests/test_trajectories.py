"""Stochastic wavefunction unravelings: exactness, determinism, limits."""

import os
import subprocess
import sys

import numpy as np
import pytest

from bhdimer.fock import FockSpace, build_mode_operators
from bhdimer.kerr import correlation
from bhdimer.liouvillian import build_liouvillian, steady_state
from bhdimer.params import KerrParams, ModelParams
from bhdimer.states import expectation, validate_density_matrix
from bhdimer.trajectories import (TrajectoryConfig, dimer_trajectory_run,
                                  gaussian_ab_trajectory_run,
                                  gutzwiller_trajectory_run,
                                  jackknife_distance, trajectory_run)
from bhdimer.trajectories.backend import active_backend
from bhdimer.trajectories.kernels import expm_apply

PARAMS = ModelParams(J=0.25, Delta=1.75, U=1.0, F=1.05)
FAST = TrajectoryConfig(dt=0.01, t_burn=15.0, t_total=60.0,
                        sample_every=50, n_traj=40, seed=7)


def test_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(dt=0.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(t_burn=50.0, t_total=40.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(n_traj=0)
    cfg = TrajectoryConfig(dt=0.01, t_total=120.0)
    assert cfg.n_steps == 12000


def test_expm_apply_matches_dense_expm():
    from scipy.linalg import expm
    rng = np.random.default_rng(3)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    ref = expm(g) @ v
    assert np.max(np.abs(expm_apply(g, v) - ref)) < 1e-12 * np.max(np.abs(ref))


def test_undriven_trajectory_stays_in_vacuum():
    """F=0 from vacuum: no jumps ever fire and the state is stationary."""
    s = FockSpace(n_max=3, modes=2)
    p = PARAMS.with_(F=0.0)
    ens = dimer_trajectory_run(p, s, FAST)
    assert np.all(ens.jump_counts == 0)
    assert abs(ens.rho[0, 0] - 1.0) < 1e-12


def test_linear_model_matches_coherent_steady_state():
    """U=0: every trajectory collapses onto the same coherent state, so
    even a tiny ensemble reproduces the exact state."""
    s = FockSpace(n_max=8, modes=2)
    p = ModelParams(J=0.25, Delta=0.75, U=0.0, F=0.4)
    cfg = TrajectoryConfig(dt=0.005, t_burn=25.0, t_total=40.0,
                           sample_every=100, n_traj=10, seed=1)
    ens = dimer_trajectory_run(p, s, cfg)
    ops = build_mode_operators(s)
    alpha_ref = p.F / (p.j_plus_delta + 0.5j * p.gamma)
    assert abs(expectation(ops["a1"], ens.rho) - alpha_ref) < 1e-3
    assert abs(expectation(ops["n1"], ens.rho) - abs(alpha_ref) ** 2) < 1e-3


def test_full_unraveling_converges_to_exact_steady_state():
    s = FockSpace(n_max=6, modes=2)
    ens = dimer_trajectory_run(PARAMS.with_(F=0.6), s, FAST)
    validate_density_matrix(ens.rho)
    rho_ref = steady_state(build_liouvillian(PARAMS.with_(F=0.6), s))
    d, se = jackknife_distance(ens, rho_ref)
    assert d < max(0.05, 3 * se + 0.03)


def test_determinism_same_seed():
    s = FockSpace(n_max=4, modes=2)
    e1 = dimer_trajectory_run(PARAMS.with_(F=0.5), s, FAST)
    e2 = dimer_trajectory_run(PARAMS.with_(F=0.5), s, FAST)
    assert np.array_equal(e1.rho, e2.rho)
    assert np.array_equal(e1.jump_counts, e2.jump_counts)


def test_different_seed_differs():
    s = FockSpace(n_max=4, modes=2)
    e1 = dimer_trajectory_run(PARAMS.with_(F=0.5), s, FAST)
    cfg2 = TrajectoryConfig(dt=0.01, t_burn=15.0, t_total=60.0,
                            sample_every=50, n_traj=40, seed=8)
    e2 = dimer_trajectory_run(PARAMS.with_(F=0.5), s, cfg2)
    assert not np.array_equal(e1.rho, e2.rho)


def test_counting_bases_agree_in_mean():
    """Jump operators (a1, a2) vs their bonding/anti-bonding rotations
    unravel the same master equation."""
    s = FockSpace(n_max=5, modes=2)
    p = PARAMS.with_(F=0.6)
    e_r = dimer_trajectory_run(p, s, FAST, counting_basis="real")
    e_k = dimer_trajectory_run(p, s, FAST, counting_basis="reciprocal")
    ops = build_mode_operators(s)
    n_ops = ops["n1"] + ops["n2"]
    n_r, se_r = e_r.total_density([ops["n1"], ops["n2"]])
    n_k, se_k = e_k.total_density([ops["n1"], ops["n2"]])
    assert abs(n_r - n_k) < 3 * np.hypot(se_r, se_k) + 0.01
    del n_ops


def test_jump_rate_matches_photon_flux():
    """Mean number of jumps per unit time equals gamma <n_T>."""
    s = FockSpace(n_max=6, modes=2)
    p = PARAMS.with_(F=0.6)
    cfg = TrajectoryConfig(dt=0.01, t_burn=20.0, t_total=120.0,
                           sample_every=50, n_traj=60, seed=3)
    ens = dimer_trajectory_run(p, s, cfg)
    ops = build_mode_operators(s)
    n_tot, _ = ens.total_density([ops["n1"], ops["n2"]])
    # jumps are counted over the whole run, burn-in included; the short
    # vacuum transient only biases the rate slightly downward
    rate = ens.jump_counts.sum() / (cfg.n_traj * cfg.t_total)
    assert rate == pytest.approx(p.gamma * n_tot, rel=0.15)


def test_gutzwiller_real_zero_hopping_is_exact_in_mean():
    """J=0 decouples the sites; the wavefunction Gutzwiller unraveling
    then samples the exact single-site physics."""
    p = ModelParams(J=0.0, Delta=1.0, U=1.0, F=0.5)
    cfg = TrajectoryConfig(dt=0.01, t_burn=20.0, t_total=140.0,
                           sample_every=50, n_traj=60, seed=5)
    ens = gutzwiller_trajectory_run(p, cfg, n_max=8, basis="real")
    dim = 9
    from bhdimer.fock import number
    n1 = np.kron(number(dim), np.eye(dim))
    n_est = expectation(n1, ens.rho).real
    n_ref = correlation(1, 1, KerrParams(Delta=1.0, U=1.0, F=0.5)).real
    assert abs(n_est - n_ref) < 0.1 * max(1.0, n_ref)


def test_gutzwiller_reciprocal_runs_and_is_valid():
    ens = gutzwiller_trajectory_run(PARAMS, FAST, n_max=7,
                                    basis="reciprocal")
    validate_density_matrix(ens.rho)
    assert ens.max_jump_probability < 0.1


def test_gaussian_ab_runs_and_is_valid():
    ens = gaussian_ab_trajectory_run(PARAMS, FAST, n_max_b=8, n_max_ab=6)
    validate_density_matrix(ens.rho)
    assert ens.n_samples > 0


def test_dt_halving_consistency():
    """Halving dt moves the density estimate by less than the
    statistical resolution."""
    s = FockSpace(n_max=5, modes=2)
    p = PARAMS.with_(F=0.6)
    cfg1 = TrajectoryConfig(dt=0.01, t_burn=15.0, t_total=75.0,
                            sample_every=50, n_traj=60, seed=2)
    cfg2 = TrajectoryConfig(dt=0.005, t_burn=15.0, t_total=75.0,
                            sample_every=100, n_traj=60, seed=2)
    ops = build_mode_operators(s)
    n_ops = [ops["n1"], ops["n2"]]
    n1, se1 = dimer_trajectory_run(p, s, cfg1).total_density(n_ops)
    n2, se2 = dimer_trajectory_run(p, s, cfg2).total_density(n_ops)
    assert abs(n1 - n2) < 2 * np.hypot(se1, se2) + 0.01


def test_large_step_probability_warns():
    s = FockSpace(n_max=8, modes=2)
    p = ModelParams(J=0.25, Delta=0.0, U=0.0, F=2.0)
    cfg = TrajectoryConfig(dt=0.2, t_burn=4.0, t_total=20.0,
                           sample_every=5, n_traj=4, seed=0)
    ens = dimer_trajectory_run(p, s, cfg)
    assert ens.max_jump_probability > 0.1
    assert any("probability" in w for w in ens.warnings)


def test_backend_equivalence():
    """Numba and pure-numpy backends consume the same random streams and
    produce the same ensemble density matrix."""
    code = (
        "import numpy as np\n"
        "from bhdimer.params import ModelParams\n"
        "from bhdimer.fock import FockSpace\n"
        "from bhdimer.trajectories import TrajectoryConfig, "
        "dimer_trajectory_run\n"
        "p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=0.6)\n"
        "cfg = TrajectoryConfig(dt=0.01, t_burn=5.0, t_total=25.0, "
        "sample_every=50, n_traj=10, seed=11)\n"
        "e = dimer_trajectory_run(p, FockSpace(n_max=4, modes=2), cfg)\n"
        "np.save('OUT', e.rho)\n"
    )
    outs = {}
    for backend, env_val in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, BHDIMER_DISABLE_NUMBA=env_val)
        out = f"/tmp/backend_{backend}.npy"
        subprocess.run([sys.executable, "-c", code.replace("OUT", out)],
                       check=True, env=env, timeout=300)
        outs[backend] = np.load(out)
    assert np.max(np.abs(outs["numba"] - outs["numpy"])) < 1e-12


def test_active_backend_reports_a_backend():
    assert active_backend() in ("numba", "numpy")
