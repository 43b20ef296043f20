"""Drivers assembling trajectory ensembles from the jitted kernels."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from ..fock import FockSpace, build_mode_operators, destroy, number
from ..liouvillian import dimer_hamiltonian, kerr_hamiltonian
from ..params import ModelParams
from ..states import clean_density_matrix, fock_state
from . import kernels
from .config import TrajectoryConfig, TrajectoryEnsemble

MAX_STEP_PROBABILITY = 0.1


def _spawn_uniforms(cfg: TrajectoryConfig):
    """Per-trajectory uniform streams from one spawning seed sequence."""
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_traj)
    for child in children:
        rng = np.random.Generator(np.random.PCG64(child))
        yield rng.random(cfg.n_steps)


def _assemble(cfg, per_traj, n_modes, dim, method):
    """Run the per-trajectory callable over the ensemble and average."""
    n_blocks = min(cfg.n_blocks, cfg.n_traj)
    block_sums = np.zeros((n_blocks, dim, dim), np.complex128)
    block_counts = np.zeros(n_blocks, np.int64)
    nbar_sum = None
    jump_counts = np.zeros((cfg.n_traj, n_modes), np.int64)
    total_samples = 0
    pmax = 0.0
    for t, uniforms in enumerate(_spawn_uniforms(cfg)):
        rho, nbar, jumps, n_samp, pm = per_traj(uniforms)
        b = t * n_blocks // cfg.n_traj
        block_sums[b] += rho
        block_counts[b] += n_samp
        nbar_sum = nbar if nbar_sum is None else nbar_sum + nbar
        jump_counts[t] = jumps
        total_samples += n_samp
        pmax = max(pmax, pm)
    warnings = []
    if pmax > MAX_STEP_PROBABILITY:
        warnings.append(
            f"max jump probability per step {pmax:.3f} exceeds "
            f"{MAX_STEP_PROBABILITY}; decrease dt")
    rho = clean_density_matrix(block_sums.sum(axis=0) / total_samples)
    block_rhos = np.array([
        clean_density_matrix(block_sums[b] / block_counts[b])
        for b in range(n_blocks) if block_counts[b] > 0])
    n_slots = nbar_sum.shape[0]
    sample_times = cfg.t_burn + cfg.dt * cfg.sample_every * np.arange(n_slots)
    return TrajectoryEnsemble(
        rho=rho, block_rhos=block_rhos, n_samples=total_samples,
        jump_counts=jump_counts, nbar_series=nbar_sum / cfg.n_traj,
        sample_times=sample_times, max_jump_probability=pmax,
        config=cfg, method=method, warnings=warnings)


def trajectory_run(h_eff: np.ndarray, jump_ops, cfg: TrajectoryConfig,
                   *, gamma: float = 1.0, psi0: np.ndarray | None = None,
                   method: str = "full") -> TrajectoryEnsemble:
    """Ensemble of trajectories for a fixed effective Hamiltonian.

    ``h_eff`` must already contain the anti-Hermitian loss term
    -i gamma/2 sum_j a_j^dag a_j.  The one-step propagator
    exp(-i h_eff dt) is computed once.
    """
    d = h_eff.shape[0]
    prop = expm(-1j * cfg.dt * np.asarray(h_eff, np.complex128))
    jumps = np.ascontiguousarray(
        np.array([np.asarray(j, np.complex128) for j in jump_ops]))
    if psi0 is None:
        psi0 = np.zeros(d, np.complex128)
        psi0[0] = 1.0
    psi0 = np.asarray(psi0, np.complex128)

    def per_traj(uniforms):
        return kernels.run_fixed_propagator(
            prop, jumps, gamma, cfg.dt, cfg.n_steps, cfg.burn_steps,
            cfg.sample_every, uniforms, psi0)

    return _assemble(cfg, per_traj, len(jump_ops), d, method)


def dimer_trajectory_run(params: ModelParams, space: FockSpace,
                         cfg: TrajectoryConfig,
                         counting_basis: str = "real") -> TrajectoryEnsemble:
    """Full-Hilbert-space unraveling of the dimer master equation.

    The drift is basis-independent (n_1 + n_2 = n_B + n_AB); the
    counting basis only selects which jump operators fire.
    """
    ops = build_mode_operators(space)
    h = dimer_hamiltonian(params, space, basis="real")
    h_eff = h - 0.5j * params.gamma * (ops["n1"] + ops["n2"])
    if counting_basis == "real":
        jump_ops = [ops["a1"], ops["a2"]]
    elif counting_basis == "reciprocal":
        s = 1.0 / np.sqrt(2.0)
        jump_ops = [s * (ops["a2"] + ops["a1"]), s * (ops["a2"] - ops["a1"])]
    else:
        raise ValueError(f"unknown counting basis {counting_basis!r}")
    return trajectory_run(h_eff, jump_ops, cfg, gamma=params.gamma,
                          method=f"full-{counting_basis}")


def _factor_operators(n_max: int):
    d = n_max + 1
    a = destroy(d)
    return a, a.conj().T, a @ a, (a @ a).conj().T, np.asarray(number(d),
                                                             np.complex128)


def gutzwiller_trajectory_run(params: ModelParams, cfg: TrajectoryConfig,
                              n_max: int,
                              basis: str = "real") -> TrajectoryEnsemble:
    """Product-wavefunction unraveling (two Fock-space factors).

    In the real basis each site sees the Kerr Hamiltonian with a
    self-consistent drive F - J<a>_partner; in the reciprocal basis the
    bonding/anti-bonding factors couple through mean-field cross-Kerr
    and pair terms, with the coherent drive sqrt(2) F on bonding only.
    """
    a, ad, a2, ad2, nd = _factor_operators(n_max)
    d = n_max + 1
    g = params.gamma
    loss = -0.5j * g * nd
    if basis == "real":
        h1 = kerr_hamiltonian(params.Delta, params.U, 0.0, d) + loss
        h2 = h1.copy()
        flag = 0
        psi0 = fock_state(0, d)
        label = "gutzwiller-real"
    elif basis == "reciprocal":
        h1 = kerr_hamiltonian(params.Delta + params.J, params.U,
                              np.sqrt(2.0) * params.F, d,
                              kerr_scale=0.5) + loss
        h2 = kerr_hamiltonian(params.Delta - params.J, params.U, 0.0, d,
                              kerr_scale=0.5) + loss
        flag = 1
        psi0 = fock_state(0, d)
        label = "gutzwiller-reciprocal"
    else:
        raise ValueError(f"unknown basis {basis!r}")
    h1 = np.ascontiguousarray(h1, np.complex128)
    h2 = np.ascontiguousarray(h2, np.complex128)
    psi0 = np.asarray(psi0, np.complex128)

    def per_traj(uniforms):
        return kernels.run_gutzwiller(
            h1, h2, a, ad, a2, ad2, nd, flag, params.J, params.U, params.F,
            g, cfg.dt, cfg.n_steps, cfg.burn_steps, cfg.sample_every,
            uniforms, psi0, psi0)

    return _assemble(cfg, per_traj, 2, d * d, label)


def gaussian_ab_trajectory_run(params: ModelParams, cfg: TrajectoryConfig,
                               n_max_b: int,
                               n_max_ab: int) -> TrajectoryEnsemble:
    """Bonding factor in Fock space, anti-bonding factor tracked by its
    displaced-Gaussian moments; samples rebuild the anti-bonding state
    as a displaced squeezed vacuum in a dim-(n_max_ab+1) Fock space.
    """
    a, ad, a2, ad2, nd = _factor_operators(n_max_b)
    d_b = n_max_b + 1
    d_ab = n_max_ab + 1
    g = params.gamma
    hb = kerr_hamiltonian(params.Delta + params.J, params.U,
                          np.sqrt(2.0) * params.F, d_b,
                          kerr_scale=0.5) - 0.5j * g * nd
    hb = np.ascontiguousarray(hb, np.complex128)
    a_ab = np.asarray(destroy(d_ab), np.complex128)
    ad_ab = a_ab.conj().T.copy()
    psi0 = np.asarray(fock_state(0, d_b), np.complex128)

    def per_traj(uniforms):
        return kernels.run_gaussian_ab(
            hb, a, a2, ad2, nd, a_ab, ad_ab, params.J, params.Delta,
            params.U, params.F, g, cfg.dt, cfg.n_steps, cfg.burn_steps,
            cfg.sample_every, uniforms, psi0,
            0.0 + 0.0j, 0.0 + 0.0j, 0.0)

    return _assemble(cfg, per_traj, 2, d_b * d_ab, "gutzwiller-gaussian-ab")


def average_density_matrix(samples) -> tuple[np.ndarray, float]:
    """Mean projector of normalized pure-state samples, with the
    standard error of the total photon number across samples."""
    samples = [np.asarray(s, np.complex128) for s in samples]
    if not samples:
        raise ValueError("need at least one sample")
    d = samples[0].shape[0]
    rho = np.zeros((d, d), np.complex128)
    ns = np.empty(len(samples))
    n_diag = np.arange(d)
    for i, psi in enumerate(samples):
        rho += np.outer(psi, psi.conj())
        ns[i] = float(np.sum(n_diag * np.abs(psi) ** 2))
    rho = clean_density_matrix(rho / len(samples))
    se = float(np.std(ns, ddof=1) / np.sqrt(len(ns))) if len(ns) > 1 else 0.0
    return rho, se


def jackknife_distance(ensemble: TrajectoryEnsemble,
                       rho_ref: np.ndarray) -> tuple[float, float]:
    """Distance of the ensemble average to a reference state, with a
    leave-one-block-out jackknife standard error."""
    from ..states import distance
    blocks = ensemble.block_rhos
    nb = len(blocks)
    d_full = distance(ensemble.rho, rho_ref)
    if nb < 2:
        return d_full, 0.0
    jack = np.empty(nb)
    for i in range(nb):
        rest = clean_density_matrix(
            (blocks.sum(axis=0) - blocks[i]) / (nb - 1))
        jack[i] = distance(rest, rho_ref)
    se = np.sqrt((nb - 1) / nb * np.sum((jack - jack.mean()) ** 2))
    return float(d_full), float(se)
