"""Dense two-phase simplex for small standard-form linear programs.

Everything in this package that needs optimization reduces to programs of
the form ``min c.t`` subject to ``A t = b, t >= 0`` with at most a few
thousand variables, so a dense tableau with Bland's anti-cycling rule is
all the machinery required.  The pivot loop runs in a compiled kernel with
a pure-python fallback (see :mod:`geomoment._kernel`).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernel
from ._kernel import ITERATION_LIMIT, OPTIMAL, UNBOUNDED
from ._simplex_py import pivot as _pivot
from .errors import NoConvergenceError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """Standard form: minimize objective . t over A t = rhs, t >= 0."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.objective, dtype=float)
        A = np.ascontiguousarray(self.constraint_matrix, dtype=float)
        b = np.ascontiguousarray(self.rhs, dtype=float)
        if c.ndim != 1 or b.ndim != 1 or A.ndim != 2:
            raise ValueError("objective and rhs must be vectors, constraint_matrix a matrix")
        if A.shape != (b.size, c.size):
            raise ValueError(
                f"inconsistent dimensions: constraint_matrix is {A.shape}, "
                f"expected ({b.size}, {c.size})"
            )
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "rhs", b)

    @property
    def n_constraints(self):
        return self.rhs.size

    @property
    def n_variables(self):
        return self.objective.size


@dataclass(frozen=True)
class LpSolution:
    """Certified outcome of :func:`solve_lp`.

    ``certificate`` carries the phase-1 dual vector (a Farkas certificate
    of infeasibility) when status is INFEASIBLE.
    """

    status: LpStatus
    value: float | None
    solution: np.ndarray | None
    iterations: int
    certificate: np.ndarray | None = None


def _refresh_objective(T, basis, cost_full):
    """Recompute the reduced-cost row exactly from the current basis.

    The maintained row drifts under long degenerate pivot sequences;
    verdicts are only accepted once they are stable under this refresh.
    """
    k = T.shape[0] - 1
    cb = cost_full[basis]
    T[k, :-1] = cost_full - cb @ T[:k, :-1]
    T[k, -1] = -(cb @ T[:k, -1])


def _run_phase(T, basis, cost_full, pivot_tol, max_iters, stall):
    total = 0
    status = OPTIMAL
    for _ in range(4):
        status, it = _kernel.simplex_iterate(
            T, basis, pivot_tol, max(max_iters - total, 1), stall
        )
        total += it
        if status == ITERATION_LIMIT:
            return status, total
        row = T[-1, :].copy()
        _refresh_objective(T, basis, cost_full)
        drift = np.max(np.abs(row - T[-1, :]))
        if drift <= 0.5 * pivot_tol * (1.0 + np.max(np.abs(row))):
            return status, total
    return status, total


def solve_lp(problem, feas_tol=FEAS_TOL, max_iters=None, pivot_tol=PIVOT_TOL):
    """Two-phase dense simplex on a standard-form problem.

    Phase-1 optimum above ``feas_tol`` yields INFEASIBLE with a Farkas
    certificate; an unbounded ray in phase 2 yields UNBOUNDED.  Bland's
    rule engages after 10*(k+m) pivots without improvement; exceeding the
    iteration cap (default 50*(k+m)) raises NoConvergenceError.
    """
    if feas_tol <= 0:
        raise ValueError("feas_tol must be positive")
    c = problem.objective
    A = problem.constraint_matrix
    b = problem.rhs
    k, m = A.shape
    if max_iters is None:
        max_iters = 50 * (k + m)
    stall = 10 * (k + m)

    # phase 1: nonnegative rhs, artificial basis
    flip = b < 0
    A1 = np.where(flip[:, None], -A, A)
    b1 = np.where(flip, -b, b)
    T = np.zeros((k + 1, m + k + 1))
    T[:k, :m] = A1
    T[:k, m:m + k] = np.eye(k)
    T[:k, -1] = b1
    T[k, :m] = -A1.sum(axis=0)
    T[k, -1] = -b1.sum()
    basis = np.arange(m, m + k, dtype=np.int64)
    cost1 = np.concatenate([np.zeros(m), np.ones(k)])

    status, it1 = _run_phase(T, basis, cost1, pivot_tol, max_iters, stall)
    if status == ITERATION_LIMIT:
        raise NoConvergenceError(
            f"simplex phase 1 exceeded the iteration cap of {max_iters}", cap=max_iters
        )
    if status == UNBOUNDED:  # sum of artificials is bounded below by 0
        raise AssertionError("phase 1 reported unbounded; tableau is corrupt")
    phase1 = -T[k, -1]
    if phase1 > feas_tol:
        y = 1.0 - T[k, m:m + k]
        y = np.where(flip, -y, y)
        return LpSolution(LpStatus.INFEASIBLE, None, None, it1, certificate=y)

    # drive leftover artificials out of the basis; drop redundant rows
    keep = np.ones(k, dtype=bool)
    for i in range(k):
        if basis[i] >= m:
            row = T[i, :m]
            cand = np.nonzero(np.abs(row) > pivot_tol)[0]
            if cand.size:
                _pivot(T, i, int(cand[0]))
                basis[i] = int(cand[0])
            else:
                keep[i] = False
    if not keep.all():
        T = np.vstack([T[:k][keep], T[k:]])
        basis = basis[keep]
        k = basis.size

    T2 = np.ascontiguousarray(np.concatenate([T[:, :m], T[:, -1:]], axis=1))
    _refresh_objective(T2, basis, c)

    status, it2 = _run_phase(T2, basis, c, pivot_tol, max(max_iters - it1, 1), stall)
    iters = it1 + it2
    if status == ITERATION_LIMIT:
        raise NoConvergenceError(
            f"simplex phase 2 exceeded the iteration cap of {max_iters}", cap=max_iters
        )
    if status == UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, None, None, iters)

    t = np.zeros(m)
    t[basis] = T2[:k, m]
    return LpSolution(LpStatus.OPTIMAL, float(c @ t), t, iters)


def hull_membership(points, target, feas_tol=FEAS_TOL):
    """Convex-combination weights expressing ``target`` over ``points``.

    Returns weights w >= 0 with sum 1 and ``w @ points = target`` within
    ``feas_tol``, or None when target is outside the convex hull (phase-1
    infeasibility).  ``points`` is an (N, n) array-like.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    tgt = np.atleast_1d(np.asarray(target, dtype=float))
    if X.shape[1] != tgt.size:
        raise ValueError(f"target has dimension {tgt.size}, points have {X.shape[1]}")
    N = X.shape[0]
    A = np.vstack([X.T, np.ones((1, N))])
    b = np.concatenate([tgt, [1.0]])
    sol = solve_lp(LpProblem(np.zeros(N), A, b), feas_tol=feas_tol)
    if sol.status is not LpStatus.OPTIMAL:
        return None
    w = np.clip(sol.solution, 0.0, None)
    return w / w.sum()
