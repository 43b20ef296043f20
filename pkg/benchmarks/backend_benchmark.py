"""Compare the numba and pure-numpy trajectory backends.

Runs the same seeded ensemble through both code paths in subprocesses
(the backend is chosen at import time from BHDIMER_DISABLE_NUMBA) and
reports wall time and agreement of the averaged density matrices.

Usage: python benchmarks/backend_benchmark.py [n_traj]
"""

import json
import os
import subprocess
import sys
import tempfile

WORKER = r"""
import json, sys, time
import numpy as np
from bhdimer.params import ModelParams
from bhdimer.fock import FockSpace
from bhdimer.trajectories import (TrajectoryConfig, dimer_trajectory_run,
                                  gutzwiller_trajectory_run, active_backend)

n_traj = int(sys.argv[1])
out = sys.argv[2]
p = ModelParams(J=0.25, Delta=1.75, U=1.0, F=1.05)
cfg = TrajectoryConfig(dt=0.01, t_burn=10, t_total=40, sample_every=25,
                       n_traj=n_traj, seed=11)
results = {"backend": active_backend()}

t0 = time.perf_counter()
ens = dimer_trajectory_run(p, FockSpace(n_max=8, modes=2), cfg)
results["full_warm"] = time.perf_counter() - t0  # includes jit compile
t0 = time.perf_counter()
ens = dimer_trajectory_run(p, FockSpace(n_max=8, modes=2), cfg)
results["full"] = time.perf_counter() - t0
np.save(out + ".full.npy", ens.rho)

t0 = time.perf_counter()
ens = gutzwiller_trajectory_run(p, cfg, 10, basis="real")
results["gutzwiller_warm"] = time.perf_counter() - t0
t0 = time.perf_counter()
ens = gutzwiller_trajectory_run(p, cfg, 10, basis="real")
results["gutzwiller"] = time.perf_counter() - t0
np.save(out + ".gutz.npy", ens.rho)

with open(out, "w") as fh:
    json.dump(results, fh)
"""


def run(disable_numba: bool, n_traj: int, out: str):
    env = dict(os.environ, BHDIMER_DISABLE_NUMBA="1" if disable_numba else "0")
    subprocess.run([sys.executable, "-c", WORKER, str(n_traj), out],
                   env=env, check=True)
    with open(out) as fh:
        return json.load(fh)


def main():
    import numpy as np

    n_traj = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    with tempfile.TemporaryDirectory() as tmp:
        res_nb = run(False, n_traj, os.path.join(tmp, "numba.json"))
        res_np = run(True, n_traj, os.path.join(tmp, "numpy.json"))
        diffs = {}
        for kind in ("full", "gutz"):
            a = np.load(os.path.join(tmp, f"numba.json.{kind}.npy"))
            b = np.load(os.path.join(tmp, f"numpy.json.{kind}.npy"))
            diffs[kind] = float(np.max(np.abs(a - b)))

    print(f"{n_traj} trajectories per run")
    print(f"{'kernel':<12} {'numba [s]':>10} {'numpy [s]':>10} "
          f"{'speedup':>8} {'max |drho|':>12}")
    for kind, key in (("full", "full"), ("gutzwiller", "gutz")):
        t_nb, t_np = res_nb[kind], res_np[kind]
        print(f"{kind:<12} {t_nb:>10.2f} {t_np:>10.2f} "
              f"{t_np / t_nb:>8.1f} {diffs[key]:>12.2e}")
    print(f"(numba jit compile overhead, first call: "
          f"{res_nb['full_warm'] - res_nb['full']:.1f}s full, "
          f"{res_nb['gutzwiller_warm'] - res_nb['gutzwiller']:.1f}s "
          f"gutzwiller)")


if __name__ == "__main__":
    main()
