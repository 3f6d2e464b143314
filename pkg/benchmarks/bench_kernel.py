"""Time the compiled and pure-Python integration kernels on the same problems.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--json out.json]
"""
import argparse
import json
import sys
import time

import numpy as np

from bifront import fisher_burgers, power_model
from bifront.kernel import available_backends
from bifront.reduction import FrontProblem, integrate_backward
from bifront.speed import critical_speed

CASES = [
    ("fisher-burgers a=1", fisher_burgers(1.0, 1.0), 2e-3, 0.08),
    ("fisher-burgers a=-0.5", fisher_burgers(1.0, -0.5), 2e-3, 0.7),
    ("power p=1 q=1.5", power_model(1.0, 1.5), 1e-2, 0.13),
    ("power p=2 q=2", power_model(2.0, 2.0), 1e-1, 0.05),
]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write raw timings here")
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
    rows = []
    for name, model, eps, c in CASES:
        problem = FrontProblem(model, eps, c)
        row = {"case": name}
        trajs = {}
        for b in backends:
            t, traj = best_time(lambda: integrate_backward(problem, backend=b), args.repeat)
            row[f"{b}_s"] = t
            row[f"{b}_steps"] = traj.n_steps
            trajs[b] = traj
        if len(trajs) == 2:
            a, b = trajs["cython"], trajs["python"]
            row["max_abs_diff"] = float(np.max(np.abs(a.y_values - b.y_values))) \
                if a.y_values.shape == b.y_values.shape else float("nan")
            row["speedup"] = row["python_s"] / row["cython_s"]
        rows.append(row)

    print(f"{'case':<24}" + "".join(f"{b + ' [s]':>14}" for b in backends) + f"{'speedup':>10}{'max|dy|':>11}")
    for row in rows:
        line = f"{row['case']:<24}" + "".join(f"{row[b + '_s']:>14.4f}" for b in backends)
        if "speedup" in row:
            line += f"{row['speedup']:>10.1f}{row['max_abs_diff']:>11.1e}"
        print(line)

    # one end-to-end bisection with the default backend for context
    t0 = time.perf_counter()
    res = critical_speed(fisher_burgers(1.0, 1.0), 2e-3)
    print(f"critical_speed(a=1, eps=2e-3) = {res.c_star:.6f} in {time.perf_counter() - t0:.3f} s")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
