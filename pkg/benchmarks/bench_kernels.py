"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import sys
import timeit

import numpy as np

from eulerwave._kernels import available_backends
from eulerwave.fan_construction import _perturbed_params, baseline_family
from eulerwave.weak_verification import PiecewiseFan, TestFunctionSet, balance_fluxes


def cases():
    rng = np.random.default_rng(0)
    etas = rng.uniform(-0.9, 0.0, 20_000)
    params = _perturbed_params(etas, rng.uniform(1.0, 20.0, 20_000))
    a = np.column_stack([rng.uniform(0.1, 5, 100_000), rng.uniform(-3, 3, (100_000, 2))])
    b = np.column_stack([rng.uniform(0.1, 5, 100_000), rng.uniform(-3, 3, (100_000, 2))])
    fan = PiecewiseFan.from_subsolution(baseline_family(6.0))
    tests = TestFunctionSet.random(40, seed=1)
    values = balance_fluxes(fan.stacked())
    nodes, weights = tests.gauss_rule()
    rows = tests.kernel_rows()
    s = np.linspace(-1.2, 1.2, 1_000_000)
    return {
        "fan_conditions[20k]": lambda k: k.fan_conditions(params, False),
        "det_factored[100k]": lambda k: k.det_factored(a, b),
        "bump[1M]": lambda k: k.bump(s),
        "sector_weak_integrals[40 tests]": lambda k: k.sector_weak_integrals(
            fan.speeds, values, rows, tests.resolution, nodes, weights),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="also write results as JSON")
    args = p.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the numpy fallback only", file=sys.stderr)
    results = {}
    print(f"{'kernel':34s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, fn in cases().items():
        row = {}
        for name, module in backends.items():
            fn(module)  # warm-up
            row[name] = min(timeit.repeat(lambda: fn(module), number=1, repeat=args.repeat))
        results[label] = row
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{label:34s}" + "".join(f"{row[n] * 1e3:10.2f}ms" for n in backends)
              + f"  {speed:8.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
