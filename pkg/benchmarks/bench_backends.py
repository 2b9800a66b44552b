"""Time the numba kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_backends.py [--drops N] [--repeat R]

Each backend runs in its own interpreter (the switch is read at import):
``HETNET_FFR_NUMBA=1`` and ``HETNET_FFR_NUMBA=0``. The first call of each task
is reported separately, since it includes numba cache loading or compilation.
"""

import argparse
import json
import os
import subprocess
import sys
import time

CHILD = r"""
import json, sys, time
import numpy as np
t0 = time.perf_counter()
from hetnet_ffr import BACKEND, closed_access as ca, kernels as kn, montecarlo as mcm, open_access as oa
from hetnet_ffr.discrepancy import reference_network, reference_open_scenario
from hetnet_ffr.model import ThresholdGrid
import_s = time.perf_counter() - t0
drops, repeat = int(sys.argv[1]), int(sys.argv[2])
grid = ThresholdGrid(-10, 20, 1)
z = np.logspace(-2, 2, 200)
noisy = reference_network(noise=0.3)
scen = reference_open_scenario()

tasks = {
    "kernels (200 rho + 200 xi, alpha=3.5)": lambda: [kn.rho(v, 3.5) + kn.xi_closed(v, 1.26, 3.5, 3) for v in z],
    "closed SFR curve, quadrature path, noisy": lambda: ca.ccdf_curve("sfr", noisy, grid),
    "open strict FFR curve (ray)": lambda: oa.open_ccdf_curve("strict_ffr", scen, grid),
    f"MC strict FFR, {drops} drops": lambda: mcm.simulate_closed_access(
        reference_network(), "strict_ffr", mcm.McConfig(drops, 1, workers=1), grid),
}
out = {"backend": BACKEND, "import_s": import_s, "tasks": {}}
for name, fn in tasks.items():
    t = time.perf_counter(); fn(); first = time.perf_counter() - t
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    out["tasks"][name] = {"first_s": first, "best_s": best}
print(json.dumps(out))
"""


def run(flag, drops, repeat):
    env = dict(os.environ, HETNET_FFR_NUMBA=flag)
    r = subprocess.run([sys.executable, "-c", CHILD, str(drops), str(repeat)], env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(r.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--drops", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    res = {flag: run(flag, args.drops, args.repeat) for flag in ("1", "0")}
    nb, np_ = res["1"], res["0"]
    print(f"import: numba {nb['import_s']:.2f}s, numpy {np_['import_s']:.2f}s")
    w = max(len(k) for k in nb["tasks"])
    print(f"{'task':<{w}}  {'numba first':>11}  {'numba best':>10}  {'numpy best':>10}  {'speedup':>7}")
    for name, t in nb["tasks"].items():
        o = np_["tasks"][name]
        print(f"{name:<{w}}  {t['first_s']:>10.3f}s  {t['best_s']:>9.3f}s  {o['best_s']:>9.3f}s  "
              f"{o['best_s'] / t['best_s']:>6.1f}x")


if __name__ == "__main__":
    main()
