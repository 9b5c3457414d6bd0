"""Compare the compiled and pure-Python quadrature backends.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import statistics
import time

from postwidder import _backend, harness
from postwidder.catalog import make_spec
from postwidder.opeval import OperatorParams, eval_operator

CASES = {
    "exp grid (108 evals)": [(f"exp:A={A}", n, b, x) for A, x, b, n in harness.OPEVAL_GRID],
    "sin/cos, beta=2.5": [(f, n, 2.5, 3.0) for f in ("sin", "cos") for n in (5, 20, 100, 256)],
    "cutout localization": [("cutout:base=exp:A=1,delta=0.5", n, 1.0, 1.0) for n in (20, 40, 80, 160, 320, 640)],
}


def run(cases, backend):
    t0 = time.perf_counter()
    values = [eval_operator(make_spec(f), OperatorParams(n, b, x), backend=backend).value for f, n, b, x in cases]
    return time.perf_counter() - t0, values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _backend.available()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup   max rel diff" if len(backends) > 1 else ""))
    for label, cases in CASES.items():
        times, vals = {}, {}
        for b in backends:
            runs = [run(cases, b) for _ in range(args.repeat)]
            times[b] = statistics.median(t for t, _ in runs)
            vals[b] = runs[0][1]
        line = f"{label:<24}" + "".join(f"{times[b]:>11.3f}s" for b in backends)
        if len(backends) > 1:
            diff = max(abs(p - c) / max(abs(p), 1e-300) for p, c in zip(vals["python"], vals["cython"]))
            line += f"{times['python'] / times['cython']:>11.1f}x   {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
