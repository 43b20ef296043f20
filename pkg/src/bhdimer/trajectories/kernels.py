"""Hot loops for quantum-trajectory propagation.

Every function here is written in nopython-compatible style so the same
source runs under numba (default) or plain numpy (set
``BHDIMER_DISABLE_NUMBA=1``).  Randomness enters only through
pre-generated uniform arrays, so a given seed yields the same
trajectory regardless of backend.

The jump algorithm: propagate with the non-Hermitian drift for one
step, renormalize, compute p_j = gamma <n_j> dt for each decay channel,
partition a single uniform draw among the channels (at most one jump
per step), then record the state on the sampling grid.
"""

from __future__ import annotations

import numpy as np

from .backend import maybe_jit


@maybe_jit
def _vnorm(psi):
    s = 0.0
    for i in range(psi.shape[0]):
        s += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    return np.sqrt(s)


@maybe_jit
def expm_apply(g, v):
    """y = exp(g) @ v via a scaled-and-squared Taylor series."""
    gn = 0.0
    for i in range(g.shape[0]):
        s = 0.0
        for j in range(g.shape[1]):
            s += abs(g[i, j])
        if s > gn:
            gn = s
    n_sub = 1 + int(gn / 4.0)
    y = v.copy()
    for _ in range(n_sub):
        term = y.copy()
        acc = y.copy()
        for k in range(1, 120):
            term = np.dot(g, term) * (1.0 / (n_sub * k))
            acc = acc + term
            if _vnorm(term) < 1e-16 * _vnorm(acc):
                break
        y = acc
    return y


@maybe_jit
def _accumulate_outer(rho, psi):
    d = psi.shape[0]
    for i in range(d):
        ci = psi[i].conjugate()
        for j in range(d):
            rho[j, i] += psi[j] * ci


@maybe_jit
def _kron2(p1, p2):
    d1 = p1.shape[0]
    d2 = p2.shape[0]
    out = np.empty(d1 * d2, np.complex128)
    for i in range(d1):
        for j in range(d2):
            out[i * d2 + j] = p1[i] * p2[j]
    return out


@maybe_jit
def run_fixed_propagator(prop, jumps, gamma, dt, n_steps, burn_steps,
                         sample_every, uniforms, psi0):
    """One trajectory with a precomputed one-step drift propagator.

    ``jumps`` has shape (n_channels, d, d).  Returns the accumulated
    projector sum, per-slot mode densities, jump counts, sample count
    and the largest single-step jump probability seen.
    """
    d = psi0.shape[0]
    nm = jumps.shape[0]
    rho = np.zeros((d, d), np.complex128)
    n_slots = (n_steps - 1 - burn_steps) // sample_every + 1
    nbar = np.zeros((n_slots, nm))
    jump_counts = np.zeros(nm, np.int64)
    n_samples = 0
    pmax = 0.0
    psi = psi0.copy()
    phis = np.empty((nm, d), np.complex128)
    nks = np.empty(nm)
    for step in range(n_steps):
        psi = np.dot(prop, psi)
        nr = _vnorm(psi)
        psi = psi / nr
        for k in range(nm):
            phi = np.dot(jumps[k], psi)
            phis[k] = phi
            nks[k] = _vnorm(phi) ** 2
        r = uniforms[step]
        ptot = 0.0
        for k in range(nm):
            ptot += gamma * nks[k] * dt
        if ptot > pmax:
            pmax = ptot
        acc = 0.0
        for k in range(nm):
            pk = gamma * nks[k] * dt
            if r < acc + pk:
                psi = phis[k] / np.sqrt(nks[k])
                jump_counts[k] += 1
                for kk in range(nm):
                    phi = np.dot(jumps[kk], psi)
                    nks[kk] = _vnorm(phi) ** 2
                break
            acc += pk
        if step >= burn_steps and (step - burn_steps) % sample_every == 0:
            slot = (step - burn_steps) // sample_every
            _accumulate_outer(rho, psi)
            for k in range(nm):
                nbar[slot, k] += nks[k]
            n_samples += 1
    return rho, nbar, jump_counts, n_samples, pmax


@maybe_jit
def _mode_moments(psi, a_op, a2_op):
    """(<a>, <a^2>, <n>) of a normalized single-mode state."""
    d = psi.shape[0]
    av = 0.0 + 0.0j
    av2 = 0.0 + 0.0j
    nv = 0.0
    for i in range(d):
        ci = psi[i].conjugate()
        nv += float(i) * (psi[i].real ** 2 + psi[i].imag ** 2)
        for j in range(d):
            if a_op[i, j] != 0.0:
                av += ci * a_op[i, j] * psi[j]
            if a2_op[i, j] != 0.0:
                av2 += ci * a2_op[i, j] * psi[j]
    return av, av2, nv


@maybe_jit
def _apply_lowering(psi):
    """a|psi> followed by normalization; returns (new_psi, <n>_old)."""
    d = psi.shape[0]
    out = np.zeros(d, np.complex128)
    for i in range(d - 1):
        out[i] = np.sqrt(i + 1.0) * psi[i + 1]
    nr = _vnorm(out)
    return out / nr, nr * nr


@maybe_jit
def run_gutzwiller(h_base1, h_base2, a_op, ad_op, a2_op, ad2_op, n_diag,
                   basis_flag, J, U, F, gamma, dt, n_steps, burn_steps,
                   sample_every, uniforms, psi1_0, psi2_0):
    """One product-state (Gutzwiller) trajectory with two factors.

    ``basis_flag`` 0: real-space factors, each driven by
    F_eff = F - J <a>_partner.  1: reciprocal factors (bonding first),
    coupled through cross-Kerr shifts U <n>_partner and pair terms
    (U/4) <a^2>_partner a^dag a^dag + h.c.; the static parts (including
    the bonding drive) live in ``h_base``.
    """
    d = psi1_0.shape[0]
    rho = np.zeros((d * d, d * d), np.complex128)
    n_slots = (n_steps - 1 - burn_steps) // sample_every + 1
    nbar = np.zeros((n_slots, 2))
    jump_counts = np.zeros(2, np.int64)
    n_samples = 0
    pmax = 0.0
    psi1 = psi1_0.copy()
    psi2 = psi2_0.copy()
    h1 = np.empty((d, d), np.complex128)
    h2 = np.empty((d, d), np.complex128)
    for step in range(n_steps):
        a1v, a1v2, n1v = _mode_moments(psi1, a_op, a2_op)
        a2v, a2v2, n2v = _mode_moments(psi2, a_op, a2_op)
        if basis_flag == 0:
            c1 = F - J * a2v
            c2 = F - J * a1v
            for i in range(d):
                for j in range(d):
                    h1[i, j] = (h_base1[i, j] + c1 * ad_op[i, j]
                                + c1.conjugate() * a_op[i, j])
                    h2[i, j] = (h_base2[i, j] + c2 * ad_op[i, j]
                                + c2.conjugate() * a_op[i, j])
        else:
            p1 = 0.25 * U * a2v2
            p2 = 0.25 * U * a1v2
            for i in range(d):
                for j in range(d):
                    h1[i, j] = (h_base1[i, j] + U * n2v * n_diag[i, j]
                                + p1 * ad2_op[i, j]
                                + p1.conjugate() * a2_op[i, j])
                    h2[i, j] = (h_base2[i, j] + U * n1v * n_diag[i, j]
                                + p2 * ad2_op[i, j]
                                + p2.conjugate() * a2_op[i, j])
        psi1 = expm_apply(-1j * dt * h1, psi1)
        psi2 = expm_apply(-1j * dt * h2, psi2)
        psi1 = psi1 / _vnorm(psi1)
        psi2 = psi2 / _vnorm(psi2)
        _, _, n1v = _mode_moments(psi1, a_op, a2_op)
        _, _, n2v = _mode_moments(psi2, a_op, a2_op)
        p_1 = gamma * n1v * dt
        p_2 = gamma * n2v * dt
        if p_1 + p_2 > pmax:
            pmax = p_1 + p_2
        r = uniforms[step]
        if r < p_1:
            psi1, _ = _apply_lowering(psi1)
            jump_counts[0] += 1
            _, _, n1v = _mode_moments(psi1, a_op, a2_op)
        elif r < p_1 + p_2:
            psi2, _ = _apply_lowering(psi2)
            jump_counts[1] += 1
            _, _, n2v = _mode_moments(psi2, a_op, a2_op)
        if step >= burn_steps and (step - burn_steps) % sample_every == 0:
            slot = (step - burn_steps) // sample_every
            _accumulate_outer(rho, _kron2(psi1, psi2))
            nbar[slot, 0] += n1v
            nbar[slot, 1] += n2v
            n_samples += 1
    return rho, nbar, jump_counts, n_samples, pmax


@maybe_jit
def _gab_derivs(A, M, N, W, delta, U, gamma, mB):
    """Time derivatives of the unnormalized anti-bonding moments.

    Third and fourth moments are closed with Wick's theorem for a
    displaced Gaussian state.
    """
    Ac = A.conjugate()
    T3 = (Ac * M + 2.0 * N * A) / W - 2.0 * Ac * A * A / (W * W)
    Q1 = 3.0 * N * M / W - 2.0 * Ac * A * A * A / (W * W)
    Q2 = (2.0 * N * N + M.real * M.real + M.imag * M.imag) / W \
        - 2.0 * (A.real ** 2 + A.imag ** 2) ** 2 / (W * W * W)
    dA = -1j * ((delta - 0.5j * gamma) * A + (0.5 * U - 1j * gamma) * T3
                + 0.5 * U * Ac * mB)
    dM = -1j * (2.0 * (delta - 0.5 * U - 0.5j * gamma) * M
                + (U - 1j * gamma) * Q1 + 0.5 * U * (2.0 * N + W) * mB)
    dN = -gamma * (N + Q2) + U * (M.conjugate() * mB).imag
    dW = -gamma * N
    return dA, dM, dN, dW


@maybe_jit
def _gab_rk4(A, M, N, W, delta, U, gamma, mB, dt, n_sub):
    h = dt / n_sub
    for _ in range(n_sub):
        k1 = _gab_derivs(A, M, N, W, delta, U, gamma, mB)
        k2 = _gab_derivs(A + 0.5 * h * k1[0], M + 0.5 * h * k1[1],
                         N + 0.5 * h * k1[2], W + 0.5 * h * k1[3],
                         delta, U, gamma, mB)
        k3 = _gab_derivs(A + 0.5 * h * k2[0], M + 0.5 * h * k2[1],
                         N + 0.5 * h * k2[2], W + 0.5 * h * k2[3],
                         delta, U, gamma, mB)
        k4 = _gab_derivs(A + h * k3[0], M + h * k3[1],
                         N + h * k3[2], W + h * k3[3],
                         delta, U, gamma, mB)
        A = A + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        M = M + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        N = N + (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        W = W + (h / 6.0) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    return A, M, N.real, W.real


@maybe_jit
def gab_jump_update(A, M, N):
    """Gaussian-closure moment map after a quantum jump a|psi>.

    Normalized update of (field, anomalous moment, occupation); at zero
    field the anomalous moment triples, and with zero anomalous moment
    and zero field the occupation doubles.
    """
    Ac = A.conjugate()
    A_new = (Ac * M + 2.0 * N * A - 2.0 * Ac * A * A) / N
    M_new = (3.0 * N * M - 2.0 * Ac * A * A * A) / N
    N_new = (2.0 * N * N + M.real ** 2 + M.imag ** 2
             - 2.0 * (A.real ** 2 + A.imag ** 2) ** 2) / N
    return A_new, M_new, N_new


@maybe_jit
def _gab_reconstruct(A, M, N, a_op, ad_op, d_ab):
    """Displaced squeezed vacuum with the given normalized moments."""
    nfl = N - (A.real ** 2 + A.imag ** 2)
    if nfl < 0.0:
        nfl = 0.0
    r = np.arcsinh(np.sqrt(nfl))
    mfl = A * A - M
    th = np.arctan2(mfl.imag, mfl.real)
    xi = r * np.exp(1j * th)
    gen_s = np.empty((d_ab, d_ab), np.complex128)
    gen_d = np.empty((d_ab, d_ab), np.complex128)
    ad2 = np.dot(ad_op, ad_op)
    a2 = np.dot(a_op, a_op)
    for i in range(d_ab):
        for j in range(d_ab):
            gen_s[i, j] = 0.5 * (xi * ad2[i, j] - xi.conjugate() * a2[i, j])
            gen_d[i, j] = A * ad_op[i, j] - A.conjugate() * a_op[i, j]
    psi = np.zeros(d_ab, np.complex128)
    psi[0] = 1.0
    psi = expm_apply(gen_s, psi)
    psi = expm_apply(gen_d, psi)
    return psi / _vnorm(psi)


@maybe_jit
def run_gaussian_ab(h_base_b, a_op, a2_op, ad2_op, n_diag,
                    a_ab, ad_ab, J, Delta, U, F, gamma, dt, n_steps,
                    burn_steps, sample_every, uniforms, psi_b0,
                    A0, M0, N0):
    """One trajectory with a Fock-space bonding factor and a Gaussian
    anti-bonding factor tracked through (<a>, <aa>, <a^dag a>, norm).

    Samples reconstruct the anti-bonding state as a displaced squeezed
    vacuum in a truncated Fock space of dimension ``a_ab.shape[0]``.
    """
    d_b = psi_b0.shape[0]
    d_ab = a_ab.shape[0]
    d = d_b * d_ab
    rho = np.zeros((d, d), np.complex128)
    n_slots = (n_steps - 1 - burn_steps) // sample_every + 1
    nbar = np.zeros((n_slots, 2))
    jump_counts = np.zeros(2, np.int64)
    n_samples = 0
    pmax = 0.0
    psi_b = psi_b0.copy()
    A = A0
    M = M0
    N = N0
    hb = np.empty((d_b, d_b), np.complex128)
    delta_ab = -Delta + J
    for step in range(n_steps):
        _, mB, nB = _mode_moments(psi_b, a_op, a2_op)
        pair = 0.25 * U * M
        for i in range(d_b):
            for j in range(d_b):
                hb[i, j] = (h_base_b[i, j] + U * N * n_diag[i, j]
                            + pair * ad2_op[i, j]
                            + pair.conjugate() * a2_op[i, j])
        psi_b = expm_apply(-1j * dt * hb, psi_b)
        psi_b = psi_b / _vnorm(psi_b)
        delta = delta_ab + U * nB
        An, Mn, Nn, Wn = _gab_rk4(A + 0j, M + 0j, N + 0j, 1.0 + 0j,
                                  delta, U, gamma, mB, dt, 1)
        if Nn / Wn < (An.real ** 2 + An.imag ** 2) / (Wn * Wn) - 1e-9:
            An, Mn, Nn, Wn = _gab_rk4(A + 0j, M + 0j, N + 0j, 1.0 + 0j,
                                      delta, U, gamma, mB, dt, 8)
        A = An / Wn
        M = Mn / Wn
        N = Nn / Wn
        if N < A.real ** 2 + A.imag ** 2:
            N = A.real ** 2 + A.imag ** 2
        _, _, nB = _mode_moments(psi_b, a_op, a2_op)
        p_b = gamma * nB * dt
        p_ab = gamma * N * dt
        if p_b + p_ab > pmax:
            pmax = p_b + p_ab
        r = uniforms[step]
        if r < p_b:
            psi_b, _ = _apply_lowering(psi_b)
            jump_counts[0] += 1
            _, _, nB = _mode_moments(psi_b, a_op, a2_op)
        elif r < p_b + p_ab and N > 1e-12:
            A, M, N = gab_jump_update(A, M, N)
            jump_counts[1] += 1
        if step >= burn_steps and (step - burn_steps) % sample_every == 0:
            slot = (step - burn_steps) // sample_every
            psi_ab = _gab_reconstruct(A, M, N, a_ab, ad_ab, d_ab)
            _accumulate_outer(rho, _kron2(psi_b, psi_ab))
            nbar[slot, 0] += nB
            nbar[slot, 1] += N
            n_samples += 1
    return rho, nbar, jump_counts, n_samples, pmax
