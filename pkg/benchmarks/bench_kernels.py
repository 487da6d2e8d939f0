"""Time the numeric kernels with numba and with the interpreter fallback.

Each path runs in its own subprocess so the ``PYTH2COLOR_NO_JIT`` switch is
read fresh. The JIT timings exclude compilation (one warm-up call first).

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from pyth2color.triples import enumerate_triples
from pyth2color.hypergraph import build, remove_pendants
from pyth2color.structure import check_sum_property
from pyth2color.cnf import encode
from pyth2color.solver import solve
from pyth2color._accel import HAS_JIT

repeat = int(sys.argv[1])
cases = {
    "dickson N=3000": lambda: enumerate_triples(3000),
    "sum property N=1000": lambda: check_sum_property(build(enumerate_triples(1000))),
    "cdcl N=3000 reduced": lambda: solve(encode(remove_pendants(build(enumerate_triples(3000)))[0])[0]),
}
out = {"jit": HAS_JIT}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run_path(no_jit: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("PYTH2COLOR_NO_JIT", None)
    if no_jit:
        env["PYTH2COLOR_NO_JIT"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    jit = run_path(False, args.repeat)
    pure = run_path(True, args.repeat)
    if not jit["jit"]:
        print("numba unavailable: both columns use the interpreter", file=sys.stderr)
    rows = [k for k in jit if k != "jit"]
    print(f"{'kernel':<24}{'numba s':>12}{'python s':>12}{'speedup':>10}")
    for k in rows:
        print(f"{k:<24}{jit[k]:>12.4f}{pure[k]:>12.4f}{pure[k] / jit[k]:>9.1f}x")
    if args.json:
        with open(args.json, "w") as f:
            json.dump({"numba": jit, "python": pure}, f, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
