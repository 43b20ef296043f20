"""Command-line interface: figure-reproduction data, sweeps, checks.

Subcommands emit machine-readable data (CSV with a '#' metadata header,
or JSON via --format json); plotting is left to external tools.  Every
output embeds the full parameter set, cutoffs and seed needed to
reproduce it.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .params import KerrParams, ModelParams

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# configuration plumbing

DEFAULTS = {
    "model": {"J": "0.25", "Delta": "1.75", "U": "1.0", "F": "1.05",
              "gamma": "1.0"},
    "cutoff": {"n_max": "11", "n_max_factor": "13", "n_max_ab": "9"},
    "trajectory": {"dt": "0.01", "t_burn": "20", "t_total": "120",
                   "sample_every": "50", "n_traj": "200"},
    "fig1": {"f_max": "1.6", "n_points": "81", "j_ed": "0.25"},
    "fig2": {"j_min": "0.02", "j_max": "10", "n_points": "17",
             "traj_points": "0.1,0.3,0.5,1,2"},
    "fig3": {"x_min": "0.01", "x_max": "0.65", "n_points": "200",
             "u_list": "1,0.1,0.01"},
    "fig4": {"j_min": "0.02", "j_max": "50", "n_points": "25"},
    "sweep": {"method": "ed", "variable": "F", "grid": "0:1.5:16",
              "observables": "n_T"},
}


def load_config(path: str | None, overrides: list[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    cfg.read_dict(DEFAULTS)
    if path:
        read = cfg.read(path)
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"--set needs section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        if "." not in key:
            raise ValueError(f"--set key must be section.key, got {key!r}")
        section, option = (s.strip() for s in key.split(".", 1))
        if section not in DEFAULTS or option not in DEFAULTS[section]:
            known = ", ".join(f"{s}.{k}" for s in DEFAULTS for k in DEFAULTS[s])
            raise ValueError(
                f"unknown option {section}.{option}; known options: {known}")
        cfg.set(section, option, value.strip())
    return cfg


def model_params(cfg, **kw) -> ModelParams:
    m = cfg["model"]
    base = dict(J=m.getfloat("J"), Delta=m.getfloat("Delta"),
                U=m.getfloat("U"), F=m.getfloat("F"),
                gamma=m.getfloat("gamma"))
    base.update(kw)
    return ModelParams(**base)


def trajectory_config(cfg, seed: int):
    from .trajectories import TrajectoryConfig
    t = cfg["trajectory"]
    return TrajectoryConfig(dt=t.getfloat("dt"), t_burn=t.getfloat("t_burn"),
                            t_total=t.getfloat("t_total"),
                            sample_every=t.getint("sample_every"),
                            n_traj=t.getint("n_traj"), seed=seed)


def write_output(path, fmt, columns, rows, metadata):
    """CSV with '#' header lines, or a structured JSON mirror."""
    metadata = {"tool": "bhdimer", "version": __version__, **metadata}
    if fmt == "json":
        text = json.dumps({"metadata": metadata, "columns": columns,
                           "rows": rows}, indent=2, default=str) + "\n"
    else:
        buf = io.StringIO()
        for key, value in metadata.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf)
        writer.writerow(columns)
        writer.writerows(rows)
        text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return x


def _grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"grid must be start:stop:num[:log], got {spec!r}")
    start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
    if len(parts) == 4 and parts[3] == "log":
        return np.geomspace(start, stop, num)
    return np.linspace(start, stop, num)


def _pmap(func, items, threads):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# shared physics helpers

def _ed_steady_state(params: ModelParams, n_max: int):
    from .fock import FockSpace
    from .liouvillian import build_liouvillian, steady_state
    space = FockSpace(n_max=n_max, modes=2)
    return steady_state(build_liouvillian(params, space, basis="real")), space


def _ed_total_density(params: ModelParams, n_max: int) -> float:
    from .fock import build_mode_operators
    from .states import expectation
    rho, space = _ed_steady_state(params, n_max)
    ops = build_mode_operators(space)
    return expectation(ops["n1"] + ops["n2"], rho).real


def _kerr_density(p: KerrParams) -> float:
    from .kerr import correlation
    if p.F == 0:
        return 0.0
    return correlation(1, 1, p).real


# ---------------------------------------------------------------------------
# figure subcommands

def cmd_fig1(cfg, args):
    """Total density vs drive: semiclassical branches, the two
    decoupled-limit closed forms, and ED at intermediate hopping."""
    from .semiclassical import homogeneous_roots

    sec = cfg["fig1"]
    j_ed = sec.getfloat("j_ed")
    u = cfg["model"].getfloat("U")
    gamma = cfg["model"].getfloat("gamma")
    jd = 2.0 * gamma  # J + Delta kept fixed
    fs = np.linspace(0.0, sec.getfloat("f_max"), sec.getint("n_points"))
    n_max = cfg["cutoff"].getint("n_max")
    rows = []
    failures = []

    def point(f):
        out = []
        p_ed = ModelParams(J=j_ed, Delta=jd - j_ed, U=u, F=f, gamma=gamma)
        for branch in homogeneous_roots(p_ed):
            out.append((f, "semiclassical", int(branch.stable),
                        2.0 * abs(branch.alpha_site) ** 2))
        site = KerrParams(Delta=jd, U=u, F=f, gamma=gamma)
        bonding = KerrParams(Delta=jd, U=u / 2.0, F=np.sqrt(2.0) * f,
                             gamma=gamma)
        out.append((f, "dw-j0", 0, 2.0 * _kerr_density(site)))
        out.append((f, "dw-jinf", 0, _kerr_density(bonding)))
        try:
            out.append((f, "ed", 0, 0.0 if f == 0 else
                        _ed_total_density(p_ed, n_max)))
        except Exception as exc:  # pragma: no cover - solver failure path
            failures.append(f"F={f}: {exc}")
            out.append((f, "ed", -1, np.nan))
        return out

    for chunk in _pmap(point, fs, args.threads):
        rows.extend(chunk)
    meta = {"figure": "fig1", "J+Delta": jd, "U": u, "gamma": gamma,
            "J_ed": j_ed, "n_max": n_max, "seed": args.seed,
            "failures": len(failures)}
    write_output(args.out, args.format, ["F", "method", "branch", "n_T"],
                 [[_fmt(v) for v in r] for r in rows], meta)
    return EXIT_FAILURES if failures else EXIT_OK


def cmd_fig2(cfg, args):
    """Distance of each decoupling to the exact steady state vs hopping,
    with small-J / large-J power-law fits in the metadata."""
    from .fock import FockSpace, real_to_reciprocal_dm
    from .gutzwiller import kdc_gaussian_ab, kdc_steady_state, rdc_steady_state
    from .states import distance
    from .trajectories import (gaussian_ab_trajectory_run,
                               gutzwiller_trajectory_run, jackknife_distance)

    sec = cfg["fig2"]
    u = cfg["model"].getfloat("U")
    f = cfg["model"].getfloat("F")
    gamma = cfg["model"].getfloat("gamma")
    jd = 2.0 * gamma
    n_max = cfg["cutoff"].getint("n_max")
    n_fac = cfg["cutoff"].getint("n_max_factor")
    n_ab = cfg["cutoff"].getint("n_max_ab")
    js = np.geomspace(sec.getfloat("j_min"), sec.getfloat("j_max"),
                      sec.getint("n_points"))
    traj_js = [float(x) for x in sec.get("traj_points").split(",") if x]
    rows = []
    failures = []

    def dm_point(j):
        p = ModelParams(J=j, Delta=jd - j, U=u, F=f, gamma=gamma)
        out = []
        try:
            rho, space = _ed_steady_state(p, n_max)
            rho_k = real_to_reciprocal_dm(rho, space)
            rep = rdc_steady_state(p, n_max=n_max)
            out.append((j, "rdc", min(distance(s, rho)
                                      for s in rep.solutions), 0.0))
            rep = kdc_steady_state(p, n_max_B=n_max, n_max_AB=n_max)
            out.append((j, "kdc", distance(rep.solutions[0], rho_k), 0.0))
            rep = kdc_gaussian_ab(p, n_max_B=n_max, n_max_AB=n_max)
            out.append((j, "kdc-gauss", distance(rep.solutions[0], rho_k),
                        0.0))
        except Exception as exc:
            failures.append(f"J={j}: {exc}")
            out.append((j, "failed", np.nan, np.nan))
        return out

    for chunk in _pmap(dm_point, js, args.threads):
        rows.extend(chunk)

    tcfg = trajectory_config(cfg, args.seed)
    for j in traj_js:
        p = ModelParams(J=j, Delta=jd - j, U=u, F=f, gamma=gamma)
        try:
            rho, space = _ed_steady_state(p, n_fac)
            rho_k = real_to_reciprocal_dm(rho, space)
            ens = gutzwiller_trajectory_run(p, tcfg, n_fac, basis="real")
            d, se = jackknife_distance(ens, rho)
            rows.append((j, "traj-gutz-real", d, se))
            ens = gutzwiller_trajectory_run(p, tcfg, n_fac, basis="reciprocal")
            d, se = jackknife_distance(ens, rho_k)
            rows.append((j, "traj-gutz-k", d, se))
            ens = gaussian_ab_trajectory_run(p, tcfg, n_max_b=n_fac,
                                             n_max_ab=n_ab)
            dims = (n_fac + 1, n_ab + 1)
            full = n_fac + 1
            rk = rho_k.reshape(full, full, full, full)
            rk = rk[:, :dims[1], :, :dims[1]].reshape(full * dims[1],
                                                      full * dims[1])
            rk = rk / np.trace(rk).real
            d, se = jackknife_distance(ens, rk)
            rows.append((j, "traj-gauss-ab", d, se))
        except Exception as exc:
            failures.append(f"J={j} (trajectory): {exc}")
            rows.append((j, "failed", np.nan, np.nan))

    def fit(method, lo, hi):
        pts = [(r[0], r[2]) for r in rows
               if r[1] == method and lo <= r[0] <= hi and np.isfinite(r[2])]
        if len(pts) < 2:
            return None, None
        x, y = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
        slope, intercept = np.polyfit(x, y, 1)
        return float(slope), float(np.exp(intercept))

    rdc_exp, rdc_pre = fit("rdc", 0.0, 0.2 * gamma)
    kdc_exp, kdc_pre = fit("kdc", 2.0 * gamma, 10.0 * gamma)
    meta = {"figure": "fig2", "J+Delta": jd, "U": u, "F": f, "gamma": gamma,
            "n_max": n_max, "n_max_factor": n_fac, "n_max_ab": n_ab,
            "trajectories": tcfg.n_traj, "seed": args.seed,
            "rdc_fit_exponent": rdc_exp, "rdc_fit_prefactor": rdc_pre,
            "kdc_fit_exponent": kdc_exp, "kdc_fit_prefactor": kdc_pre,
            "failures": len(failures)}
    write_output(args.out, args.format, ["J", "method", "distance", "stderr"],
                 [[_fmt(v) for v in r] for r in rows], meta)
    return EXIT_FAILURES if failures else EXIT_OK


def cmd_fig3(cfg, args):
    """Minimal quadrature variance of the Kerr mode vs rescaled drive,
    exact and Gaussian, with the semiclassical bistability flag."""
    from .kerr import (exact_moments, gaussian_fluctuations,
                      min_variance_from_moments)
    from .semiclassical import kerr_semiclassical_fields

    sec = cfg["fig3"]
    gamma = cfg["model"].getfloat("gamma")
    delta = gamma  # paper's Fig. 3 detuning
    us = [float(x) for x in sec.get("u_list").split(",")]
    xs = np.linspace(sec.getfloat("x_min"), sec.getfloat("x_max"),
                     sec.getint("n_points"))
    rows = []
    failures = []
    for u in us:
        for x in xs:
            f = x * gamma ** 1.5 / np.sqrt(u)
            p = KerrParams(Delta=delta, U=u, F=f, gamma=gamma)
            fields = kerr_semiclassical_fields(p)
            bistable = int(len(fields) > 1)
            try:
                _, mv = min_variance_from_moments(exact_moments(p))
            except Exception as exc:
                failures.append(f"U={u} x={x} exact: {exc}")
                mv = np.nan
            try:
                alpha = min(fields, key=abs)
                _, mv_g = min_variance_from_moments(
                    gaussian_fluctuations(p, alpha))
            except Exception as exc:
                failures.append(f"U={u} x={x} gaussian: {exc}")
                mv_g = np.nan
            rows.append((x, u, mv, mv_g, bistable))
    meta = {"figure": "fig3", "Delta": delta, "gamma": gamma,
            "u_list": us, "seed": args.seed, "failures": len(failures),
            "note": "x = F sqrt(U) / gamma^{3/2}; gaussian follows the "
                    "lowest semiclassical branch"}
    write_output(args.out, args.format,
                 ["F_sqrtU", "U", "minvar_exact", "minvar_gaussian",
                  "bistable"],
                 [[_fmt(v) for v in r] for r in rows], meta)
    return EXIT_FAILURES if failures else EXIT_OK


def cmd_fig4(cfg, args):
    """EPR variance sum vs hopping at fixed Delta + J: exact panel and
    Gaussian-fluctuation panel, each with its large-J asymptote."""
    from .entanglement import (epr_from_gaussian, epr_variance_sum,
                               optimal_theta_at_large_J,
                               single_mode_asymptote)
    from .semiclassical import dimer_gaussian_steady_state

    sec = cfg["fig4"]
    gamma = cfg["model"].getfloat("gamma")
    jd = gamma  # Delta + J = gamma for this figure
    n_max = cfg["cutoff"].getint("n_max")
    js = np.geomspace(sec.getfloat("j_min"), sec.getfloat("j_max"),
                      sec.getint("n_points"))
    panels = [("exact", 1.0 * gamma, 0.33), ("gaussian", 0.01 * gamma, 0.48)]
    rows = []
    failures = []
    for panel, u, fsu in panels:
        f = fsu * gamma ** 1.5 / np.sqrt(u)
        p_ref = ModelParams(J=js[-1], Delta=jd - js[-1], U=u, F=f,
                            gamma=gamma)
        theta = optimal_theta_at_large_J(p_ref)
        asym = single_mode_asymptote(p_ref)

        def point(j, panel=panel, u=u, f=f, theta=theta, asym=asym):
            p = ModelParams(J=j, Delta=jd - j, U=u, F=f, gamma=gamma)
            try:
                if panel == "exact":
                    rho, space = _ed_steady_state(p, n_max)
                    rep = epr_variance_sum(rho, space, theta)
                else:
                    rep = epr_from_gaussian(dimer_gaussian_steady_state(p),
                                            theta)
                return (j, panel, rep.sum, asym, int(rep.entangled))
            except Exception as exc:
                failures.append(f"{panel} J={j}: {exc}")
                return (j, panel, np.nan, asym, -1)

        rows.extend(_pmap(point, js, args.threads))
    meta = {"figure": "fig4", "J+Delta": jd, "gamma": gamma, "n_max": n_max,
            "panels": {p: {"U": u, "F_sqrtU": fsu} for p, u, fsu in panels},
            "seed": args.seed, "failures": len(failures)}
    write_output(args.out, args.format,
                 ["J", "panel", "epr_sum", "asymptote", "entangled"],
                 [[_fmt(v) for v in r] for r in rows], meta)
    return EXIT_FAILURES if failures else EXIT_OK


# ---------------------------------------------------------------------------
# generic sweep

METHODS = ("ed", "dw", "semiclassical", "rdc", "kdc", "kdc-gauss",
           "gauss-dimer", "traj-full", "traj-gutz-real", "traj-gutz-k",
           "traj-gauss-ab")


def _observables(rho, space, names):
    from .fock import build_mode_operators, to_reciprocal
    from .states import expectation
    ops = build_mode_operators(space)
    if space.modes == 2:
        ops.update(to_reciprocal(ops))
        n_tot = ops["n1"] + ops["n2"]
    else:
        n_tot = ops["n"]
    table = {"n_T": lambda: expectation(n_tot, rho).real,
             "purity": lambda: np.trace(rho @ rho).real}
    if space.modes == 2:
        table.update(
            n1=lambda: expectation(ops["n1"], rho).real,
            n2=lambda: expectation(ops["n2"], rho).real,
            nB=lambda: expectation(ops["n_B"], rho).real,
            nAB=lambda: expectation(ops["n_AB"], rho).real)
    out = []
    for name in names:
        if name not in table:
            raise ValueError(f"unknown observable {name!r}; "
                             f"choose from {sorted(table)}")
        out.append(table[name]())
    return out


def _sweep_point(method, p, cfg, seed, names):
    from .fock import FockSpace
    n_max = cfg["cutoff"].getint("n_max")
    n_fac = cfg["cutoff"].getint("n_max_factor")
    space2 = FockSpace(n_max=n_max, modes=2)
    if method == "ed":
        rho, space = _ed_steady_state(p, n_max)
        return _observables(rho, space, names)
    if method == "dw":
        if "n_T" not in names or len(names) > 1:
            raise ValueError("method dw supports only observable n_T")
        site = p.site_limit()
        bonding = p.bonding_limit()
        if p.J == 0:
            return [2.0 * _kerr_density(site)]
        return [_kerr_density(bonding)]
    if method == "semiclassical":
        from .semiclassical import homogeneous_roots
        if "n_T" not in names or len(names) > 1:
            raise ValueError("semiclassical supports only observable n_T")
        roots = [b for b in homogeneous_roots(p) if b.stable]
        return [2.0 * abs(roots[0].alpha_site) ** 2]
    if method in ("rdc", "kdc", "kdc-gauss"):
        from .gutzwiller import (kdc_gaussian_ab, kdc_steady_state,
                                 rdc_steady_state)
        if method == "rdc":
            rep = rdc_steady_state(p, n_max=n_max)
        elif method == "kdc":
            rep = kdc_steady_state(p, n_max_B=n_max, n_max_AB=n_max)
        else:
            rep = kdc_gaussian_ab(p, n_max_B=n_max, n_max_AB=n_max)
        return _observables(rep.solutions[0], space2, names)
    if method == "gauss-dimer":
        from .semiclassical import dimer_gaussian_steady_state
        if set(names) - {"n_T", "nB", "nAB"}:
            raise ValueError("gauss-dimer supports n_T, nB, nAB")
        g = dimer_gaussian_steady_state(p)
        vals = {"n_T": g.nB + g.nAB, "nB": g.nB, "nAB": g.nAB}
        return [vals[n] for n in names]
    # trajectory methods
    from .trajectories import (dimer_trajectory_run,
                               gaussian_ab_trajectory_run,
                               gutzwiller_trajectory_run)
    tcfg = trajectory_config(cfg, seed)
    if method == "traj-full":
        ens = dimer_trajectory_run(p, space2, tcfg)
        return _observables(ens.rho, space2, names)
    if method in ("traj-gutz-real", "traj-gutz-k"):
        basis = "real" if method.endswith("real") else "reciprocal"
        ens = gutzwiller_trajectory_run(p, tcfg, n_fac, basis=basis)
        space = FockSpace(n_max=n_fac, modes=2)
        return _observables(ens.rho, space, names)
    if method == "traj-gauss-ab":
        n_ab = cfg["cutoff"].getint("n_max_ab")
        ens = gaussian_ab_trajectory_run(p, tcfg, n_max_b=n_fac,
                                         n_max_ab=n_ab)
        if "n_T" not in names or len(names) > 1:
            raise ValueError("traj-gauss-ab supports only observable n_T")
        series = ens.nbar_series
        return [float(series[:, 0].mean() + series[:, 1].mean())]
    raise ValueError(f"unknown method {method!r}")


def cmd_sweep(cfg, args):
    """Long-format sweep of one parameter for one method."""
    sec = cfg["sweep"]
    method = sec.get("method")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    variable = sec.get("variable")
    if variable not in ("J", "Delta", "U", "F"):
        raise ValueError("sweep variable must be J, Delta, U or F")
    names = [x.strip() for x in sec.get("observables").split(",") if x]
    grid = _grid(sec.get("grid"))
    rows = []
    failures = []

    def point(idx_value):
        idx, value = idx_value
        p = model_params(cfg, **{variable: float(value)})
        seed = args.seed + idx
        try:
            vals = _sweep_point(method, p, cfg, seed, names)
            return [(value, method, name, v, "ok")
                    for name, v in zip(names, vals)]
        except Exception as exc:
            failures.append(f"{variable}={value}: {exc}")
            return [(value, method, name, np.nan, "failed")
                    for name in names]

    for chunk in _pmap(point, list(enumerate(grid)), args.threads):
        rows.extend(chunk)
    meta = {"command": "sweep", "method": method, "variable": variable,
            "grid": sec.get("grid"), "observables": names,
            "model": dict(cfg["model"]), "cutoff": dict(cfg["cutoff"]),
            "trajectory": dict(cfg["trajectory"]), "seed": args.seed,
            "failures": len(failures)}
    write_output(args.out, args.format,
                 [variable, "method", "observable", "value", "status"],
                 [[_fmt(v) for v in r] for r in rows], meta)
    return EXIT_FAILURES if failures else EXIT_OK


# ---------------------------------------------------------------------------
# invariant checks

def cmd_check(cfg, args):
    """Fast invariant suite; prints one pass/fail line per check."""
    import math

    from .fock import (FockSpace, beamsplitter_unitary, build_mode_operators,
                       real_to_reciprocal_dm, to_reciprocal)
    from .kerr import correlation, exact_moments, min_variance_from_moments
    from .liouvillian import build_liouvillian, steady_state
    from .semiclassical import bistability_threshold_check
    from .states import distance, expectation
    from .entanglement import epr_variance_sum
    from .gutzwiller import (moments_to_squeezed_thermal,
                             squeezed_thermal_moments)

    checks = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"raised {exc!r}"
        checks.append((name, ok))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    def linear_cavity():
        from .fock import number
        from .liouvillian import kerr_steady_state
        rho = kerr_steady_state(0.0, 0.0, 1.0, 1.0, 23)
        n = expectation(number(23), rho).real
        return abs(n - 4.0) < 1e-8, f"<n> = {n:.10f} (expect 4)"

    def dw_vs_ed():
        p = KerrParams(Delta=1.0, U=1.0, F=0.35)
        n_dw = correlation(1, 1, p).real
        from .liouvillian import kerr_steady_state
        from .fock import number
        rho = kerr_steady_state(1.0, 1.0, 0.35, 1.0, 20)
        n_ed = expectation(number(20), rho).real
        return abs(n_dw - n_ed) < 1e-8, f"|diff| = {abs(n_dw-n_ed):.2e}"

    def basis_identity():
        p = model_params(cfg)
        space = FockSpace(n_max=9, modes=2)
        rho = steady_state(build_liouvillian(p, space, basis="real"))
        ops = build_mode_operators(space)
        kops = to_reciprocal(ops)
        n_r = expectation(ops["n1"] + ops["n2"], rho).real
        n_k = expectation(kops["n_B"] + kops["n_AB"], rho).real
        return abs(n_r - n_k) < 1e-9, f"|n_real - n_recip| = {abs(n_r-n_k):.2e}"

    def beamsplitter_unitarity():
        space = FockSpace(n_max=8, modes=2)
        v = beamsplitter_unitary(space)
        err = np.max(np.abs(v @ v.conj().T - np.eye(space.dim)))
        return err < 1e-10, f"max |V V^dag - 1| = {err:.2e}"

    def separable_epr():
        rng = np.random.default_rng(args.seed)
        from .states import coherent_state
        space = FockSpace(n_max=10, modes=2)
        worst = np.inf
        for _ in range(20):
            al = rng.normal(scale=0.5) + 1j * rng.normal(scale=0.5)
            be = rng.normal(scale=0.5) + 1j * rng.normal(scale=0.5)
            psi = np.kron(coherent_state(al, 11), coherent_state(be, 11))
            rho = np.outer(psi, psi.conj())
            rep = epr_variance_sum(rho, space, rng.uniform(0, math.pi))
            worst = min(worst, rep.sum)
        return worst >= 2.0 - 1e-8, f"min sum over products = {worst:.10f}"

    def squeezed_thermal_roundtrip():
        rng = np.random.default_rng(args.seed + 1)
        worst = 0.0
        for _ in range(20):
            n = rng.uniform(0, 3)
            mmax = math.sqrt(n * (n + 1))
            m = rng.uniform(0, mmax) * np.exp(2j * np.pi * rng.uniform())
            st = moments_to_squeezed_thermal(n, m)
            n2, m2 = squeezed_thermal_moments(st)
            worst = max(worst, abs(n - n2), abs(m - m2))
        return worst < 1e-8, f"max round-trip error = {worst:.2e}"

    def squeezing_dip():
        p = KerrParams(Delta=1.0, U=1.0, F=0.2)
        _, mv = min_variance_from_moments(exact_moments(p))
        return mv < 0.5, f"min variance = {mv:.4f} (< 0.5 expected)"

    def bistability_threshold():
        return bistability_threshold_check(model_params(cfg)), \
            "cubic-discriminant threshold matches sqrt(3)/2 rule"

    check("linear-cavity density", linear_cavity)
    check("closed-form vs ED Kerr density", dw_vs_ed)
    check("total-density basis identity", basis_identity)
    check("beamsplitter unitarity", beamsplitter_unitarity)
    check("separable states satisfy EPR bound", separable_epr)
    check("squeezed-thermal moment round-trip", squeezed_thermal_roundtrip)
    check("quadrature squeezing below vacuum", squeezing_dip)
    check("semiclassical bistability threshold", bistability_threshold)

    failed = [name for name, ok in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAILURES if failed else EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhdimer",
        description="Driven-dissipative Bose-Hubbard dimer toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {"fig1": cmd_fig1, "fig2": cmd_fig2, "fig3": cmd_fig3,
                "fig4": cmd_fig4, "sweep": cmd_sweep, "check": cmd_check}
    for name, func in commands.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0]
                           if func.__doc__ else None)
        p.add_argument("--config", help="INI-style config file")
        p.add_argument("--set", action="append", default=[],
                       metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")
        p.add_argument("--out", default=None,
                       help="output path ('-' or omitted: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        return args.func(cfg, args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
