"""Benchmark: compiled simplex kernel vs the pure-python fallback.

Times two-phase solves on random dense standard-form programs and on the
biconjugate-style programs the library actually generates, checks that
both kernels return identical results, and prints a table.

Usage: python benchmarks/bench_simplex.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from geomoment import LpProblem, LpStatus, solve_lp
from geomoment import _kernel


def random_problems(rng, k, m, count):
    problems = []
    for _ in range(count):
        A = rng.normal(size=(k, m))
        t0 = np.abs(rng.normal(size=m))
        problems.append(LpProblem(np.abs(rng.normal(size=m)), A, A @ t0))
    return problems


def envelope_problems(rng, n, atoms, count):
    """min sum t_i(-|x_i|^2) with unit mass and a fixed interior mean."""
    problems = []
    for _ in range(count):
        P = rng.normal(size=(atoms, n))
        x = rng.dirichlet(np.ones(atoms)) @ P
        A = np.vstack([P.T, np.ones((1, atoms))])
        b = np.concatenate([x, [1.0]])
        problems.append(LpProblem(-(P * P).sum(axis=1), A, b))
    return problems


def time_kernel(name, problems, repeats):
    _kernel.set_kernel(name)
    best = np.inf
    solutions = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        solutions = [solve_lp(p) for p in problems]
        best = min(best, time.perf_counter() - t0)
    return best, solutions


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if "cython" not in _kernel.available_kernels():
        raise SystemExit("compiled kernel not built; run pip install -e . first")

    rng = np.random.default_rng(0)
    suites = [
        ("dense 10x30", random_problems(rng, 10, 30, 40)),
        ("dense 40x120", random_problems(rng, 40, 120, 15)),
        ("dense 120x360", random_problems(rng, 120, 360, 4)),
        ("envelope n=2, 256 atoms", envelope_problems(rng, 2, 256, 20)),
        ("envelope n=5, 512 atoms", envelope_problems(rng, 5, 512, 8)),
    ]

    print(f"{'suite':<26}{'python':>10}{'cython':>10}{'speedup':>9}  agree")
    print("-" * 62)
    for name, problems in suites:
        t_py, sols_py = time_kernel("python", problems, args.repeats)
        t_cy, sols_cy = time_kernel("cython", problems, args.repeats)
        agree = all(
            a.status is b.status
            and a.iterations == b.iterations
            and (a.status is not LpStatus.OPTIMAL
                 or np.array_equal(a.solution, b.solution))
            for a, b in zip(sols_py, sols_cy)
        )
        print(f"{name:<26}{t_py:>9.3f}s{t_cy:>9.3f}s{t_py / t_cy:>8.1f}x"
              f"  {'yes' if agree else 'NO'}")
    _kernel.set_kernel("cython")


if __name__ == "__main__":
    main()
