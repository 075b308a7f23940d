"""Generalized variances: radial convex costs, the recentered moment
functional, its minimizing center, and the minimax level it never exceeds.

The minimax (smallest sublevel set covering the cloud, after translation)
is computed by cutting planes on the radial reach max_i |x_i - z| and
mapped through the cost profile, which brackets the level two-sidedly; the
inner minimization behind the generalized variance uses the closed form
for the quadratic cost, a damped Weiszfeld iteration for the first-power
cost, and the same cutting-plane engine for everything else.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergenceError, ParseError
from .geometry import diameter
from .lp import LpProblem, LpStatus, solve_lp

DEFAULT_TOL_CLOSED = 1e-8
DEFAULT_TOL_ITER = 1e-6
MAX_CUTS = 120


class RadialCost:
    """Convex increasing radial profile v; the cost is V(x) = v(|x|).

    Either a power t^p with p >= 1 or a piecewise-linear profile given by
    knots [(t, v(t)), ...] with nondecreasing, nonnegative slopes and a
    positive final slope (so sublevel sets stay compact).
    """

    def __init__(self, kind, p=None, knots=None):
        self.kind = kind
        if kind == "power":
            if p is None or p < 1:
                raise ValueError("power cost requires p >= 1")
            self.p = float(p)
        elif kind == "pwl":
            k = np.asarray(knots, dtype=float)
            if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
                raise ValueError("pwl cost requires at least two (t, v) knots")
            t, v = k[:, 0], k[:, 1]
            if t[0] != 0.0:
                raise ValueError("first knot abscissa must be 0")
            if not (np.diff(t) > 0).all():
                raise ValueError("knot abscissae must be strictly increasing")
            if v[0] < 0:
                raise ValueError("v(0) must be nonnegative")
            slopes = np.diff(v) / np.diff(t)
            if (slopes < 0).any():
                raise ValueError("slopes must be nonnegative (v must be increasing)")
            if (np.diff(slopes) < -1e-15).any():
                raise ValueError("slopes must be nondecreasing (v must be convex)")
            if slopes[-1] <= 0:
                raise ValueError("final slope must be positive (coercivity)")
            self.knots = k
            self._slopes = slopes
        else:
            raise ValueError(f"unknown cost kind {kind!r}")

    @classmethod
    def power(cls, p):
        return cls("power", p=p)

    @classmethod
    def piecewise_linear(cls, knots):
        return cls("pwl", knots=knots)

    @property
    def strictly_convex(self):
        return self.kind == "power" and self.p > 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            out = t ** self.p
        else:
            kt, kv = self.knots[:, 0], self.knots[:, 1]
            out = np.interp(t, kt, kv)
            over = t > kt[-1]
            if np.any(over):
                out = np.where(over, kv[-1] + self._slopes[-1] * (t - kt[-1]), out)
        return float(out) if out.ndim == 0 else out

    def slope(self, t):
        """Subgradient selection v'(t); right derivative at the knots."""
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            if self.p == 1:
                out = np.ones_like(t)
            else:
                out = self.p * t ** (self.p - 1.0)
        else:
            kt = self.knots[:, 0]
            idx = np.clip(np.searchsorted(kt, t, side="right") - 1, 0, len(self._slopes) - 1)
            out = self._slopes[idx]
        return float(out) if out.ndim == 0 else out

    def to_spec(self):
        if self.kind == "power":
            return {"kind": "power", "p": self.p}
        return {"kind": "pwl", "knots": self.knots.tolist()}

    @classmethod
    def from_spec(cls, spec):
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ValueError("cost spec must be an object with a 'kind' field")
        if spec["kind"] == "power":
            return cls.power(spec["p"])
        if spec["kind"] == "pwl":
            return cls.piecewise_linear(spec["knots"])
        raise ValueError(f"unknown cost kind {spec['kind']!r}")

    def __repr__(self):
        if self.kind == "power":
            return f"RadialCost.power({self.p})"
        return f"RadialCost.piecewise_linear({self.knots.tolist()})"


def read_cost_json(path_or_text):
    """Parse a cost from a JSON file path or an inline JSON string."""
    text = path_or_text
    if not path_or_text.lstrip().startswith("{"):
        with open(path_or_text) as fh:
            text = fh.read()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"cost spec: {exc}") from None
    try:
        return RadialCost.from_spec(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"cost spec: {exc}") from None


@dataclass(frozen=True)
class GenVarResult:
    value: float
    center: np.ndarray
    converged: bool
    inner_gap: float
    unique: bool


@dataclass(frozen=True)
class SaddleReport:
    """Optimality verdict for a candidate maximizing measure."""

    is_maximizer: bool
    support_on_level: bool
    value_attained: bool
    level: float
    center: np.ndarray
    genvar: float


def _cut_lp(cuts_g, cuts_c, lo, hi):
    """min h s.t. h >= c_j + g_j . z over the box [lo, hi].

    Returns (z, lower_bound).  Variables: box slack pair (s, t) with
    z = lo + s, the free epigraph value h as h+ - h-, one surplus per cut.
    """
    n = lo.size
    ncuts = len(cuts_c)
    G = np.asarray(cuts_g)
    c0 = np.asarray(cuts_c)
    rng_box = hi - lo
    k = n + ncuts
    m = 2 * n + 2 + ncuts
    A = np.zeros((k, m))
    b = np.zeros(k)
    A[:n, :n] = np.eye(n)
    A[:n, n:2 * n] = np.eye(n)
    b[:n] = rng_box
    A[n:, :n] = -G
    A[n:, 2 * n] = 1.0
    A[n:, 2 * n + 1] = -1.0
    A[n:, 2 * n + 2:] = -np.eye(ncuts)
    b[n:] = c0 + G @ lo
    c = np.zeros(m)
    c[2 * n] = 1.0
    c[2 * n + 1] = -1.0
    sol = solve_lp(LpProblem(c, A, b))
    if sol.status is not LpStatus.OPTIMAL:
        raise AssertionError("cut relaxation must be feasible and bounded on a box")
    z = lo + sol.solution[:n]
    return z, sol.value


def _minimize_convex(oracle, lo, hi, tol, max_iters=300, init_points=()):
    """Kelley cutting planes over a box.

    ``oracle(z) -> (f, g)`` returns the value and a subgradient.  Returns
    (best value, best point, certified gap, converged).  A midpoint cut is
    added each round to damp zigzagging, and stale cuts are dropped beyond
    MAX_CUTS (which keeps the lower bound valid, merely looser).
    """
    cuts_g, cuts_c = [], []
    best_f = math.inf
    best_z = None

    def add_cut(z):
        nonlocal best_f, best_z
        f, g = oracle(z)
        cuts_g.append(g)
        cuts_c.append(f - float(g @ z))
        if f < best_f:
            best_f = f
            best_z = z
        return f

    for z in init_points:
        add_cut(np.clip(np.asarray(z, dtype=float), lo, hi))
    if best_z is None:
        add_cut(0.5 * (lo + hi))

    scale = 1.0 + float(np.abs(hi - lo).max())
    gap = math.inf
    for _ in range(max_iters):
        z_lp, lower = _cut_lp(cuts_g, cuts_c, lo, hi)
        gap = best_f - lower
        if gap <= tol:
            return best_f, best_z, max(gap, 0.0), True
        mid = 0.5 * (z_lp + best_z)
        add_cut(z_lp)
        if np.linalg.norm(mid - z_lp) > 1e-12 * scale:
            add_cut(mid)
        if len(cuts_c) > MAX_CUTS:
            del cuts_g[:2], cuts_c[:2]
    return best_f, best_z, max(gap, 0.0), False


def _radial_reach(P, z):
    """max_i |x_i - z| and a subgradient of that max."""
    d = np.linalg.norm(P - z, axis=1)
    i = int(np.argmax(d))
    if d[i] < 1e-300:
        return 0.0, np.zeros(P.shape[1])
    return float(d[i]), (z - P[i]) / d[i]


def chebyshev_level(cloud, cost, tol=None, max_iters=400):
    """Smallest level lambda such that some translate of the cloud fits in
    the cost's lambda-sublevel set, with the attaining center.

    Solves min_z max_i v(|x_i - z|) by cutting planes on the radial reach
    max_i |x_i - z|; since v is increasing, the reach bracket [L, U] maps
    to the certified level bracket [v(L), v(U)].
    """
    if tol is None:
        tol = DEFAULT_TOL_ITER
    P = cloud.points
    N, n = P.shape
    if N == 1:
        return float(cost(0.0)), P[0].copy()
    diam = diameter(cloud)
    if diam == 0.0:
        return float(cost(0.0)), P[0].copy()
    lo = P.min(axis=0) - diam
    hi = P.max(axis=0) + diam

    cuts_g, cuts_c = [], []
    best_u = math.inf
    best_z = None

    def add_cut(z):
        nonlocal best_u, best_z
        f, g = _radial_reach(P, z)
        cuts_g.append(g)
        cuts_c.append(f - float(g @ z))
        if f < best_u:
            best_u = f
            best_z = z
        return f

    add_cut(P.mean(axis=0))
    for _ in range(max_iters):
        z_lp, lower = _cut_lp(cuts_g, cuts_c, lo, hi)
        lower = max(lower, 0.0)
        if float(cost(best_u)) - float(cost(lower)) <= tol:
            return float(cost(best_u)), best_z
        mid = 0.5 * (z_lp + best_z)
        add_cut(z_lp)
        if np.linalg.norm(mid - z_lp) > 1e-12 * (1.0 + diam):
            add_cut(mid)
        if len(cuts_c) > MAX_CUTS:
            del cuts_g[:2], cuts_c[:2]
    raise NoConvergenceError(
        f"minimax level not certified within {max_iters} cutting-plane rounds",
        cap=max_iters, best=(float(cost(best_u)), best_z),
    )


def _weiszfeld(P, w, tol, max_iters=5000):
    """Damped Weiszfeld iteration for the weighted first-power center.

    Certificate: at z the objective exceeds the optimum by at most
    (norm of the minimal subgradient) * (largest atom distance).
    """
    z = w @ P
    for _ in range(max_iters):
        d = np.linalg.norm(P - z, axis=1)
        j = int(np.argmin(d))
        scale = 1.0 + float(np.abs(P).max())
        if d[j] < 1e-13 * scale:
            mask = np.arange(P.shape[0]) != j
            dm = d[mask]
            if not mask.any() or not (dm > 0).all():
                return z, 0.0, True  # all mass at one location
            g_other = ((z - P[mask]) / dm[:, None] * w[mask, None]).sum(axis=0)
            r = float(np.linalg.norm(g_other))
            residual = max(0.0, r - w[j])
            gap = residual * float(d.max())
            if gap <= tol:
                return z, gap, True
            inv = w[mask] / dm
            t_other = (inv @ P[mask]) / inv.sum()
            z = (1.0 - w[j] / r) * t_other + (w[j] / r) * z
            continue
        g = ((z - P) / d[:, None] * w[:, None]).sum(axis=0)
        gap = float(np.linalg.norm(g)) * float(d.max())
        if gap <= tol:
            return z, gap, True
        inv = w / d
        z = (inv @ P) / inv.sum()
    return z, gap, False


def generalized_variance(measure, cost, tol=None):
    """Recentered moment functional: inf over centers z of the weighted
    cost sum, with the attaining center.

    Quadratic cost: exact (center is the mean, value the variance).
    First-power cost: Weiszfeld with an atom-collision safeguard.  Other
    costs: cutting planes with a two-sided certificate.
    """
    if tol is None:
        tol = DEFAULT_TOL_CLOSED if (cost.kind == "power" and cost.p == 2) else DEFAULT_TOL_ITER
    if tol <= 0:
        raise ValueError("tol must be positive")
    P, w = measure.support()
    n = P.shape[1]
    unique = cost.strictly_convex or P.shape[0] == 1

    if cost.kind == "power" and cost.p == 2:
        z = w @ P
        d = P - z
        val = float(w @ (d * d).sum(axis=1))
        return GenVarResult(val, z, True, 0.0, True)

    if P.shape[0] == 1:
        return GenVarResult(float(cost(0.0)), P[0].copy(), True, 0.0, unique)

    if cost.kind == "power" and cost.p == 1:
        z, gap, ok = _weiszfeld(P, w, tol)
        if ok:
            d = np.linalg.norm(P - z, axis=1)
            return GenVarResult(float(w @ d), z, True, gap, unique)
        # fall through to the cutting-plane engine from the best iterate
        init = [z]
    else:
        init = [w @ P]

    def oracle(z):
        d = np.linalg.norm(P - z, axis=1)
        f = float(w @ cost(d))
        safe = d > 1e-300
        g = np.zeros(n)
        if safe.any():
            coef = w[safe] * cost.slope(d[safe]) / d[safe]
            g = (coef[:, None] * (z - P[safe])).sum(axis=0)
        return f, g

    lo = P.min(axis=0)
    hi = P.max(axis=0)
    pad = 1e-9 * (1.0 + np.abs(P).max())
    val, z, gap, ok = _minimize_convex(oracle, lo - pad, hi + pad, tol,
                                       init_points=init + [p for p in P[:8]])
    if not ok:
        raise NoConvergenceError(
            "inner minimization not certified within the cutting-plane budget",
            best=GenVarResult(val, z, False, gap, unique),
        )
    return GenVarResult(val, z, True, gap, unique)


def sup_genvar(cloud, cost, tol=None):
    """Largest generalized variance over measures on the cloud: the
    minimax level of :func:`chebyshev_level`."""
    lam, _ = chebyshev_level(cloud, cost, tol=tol)
    return lam


def verify_saddle(measure, cloud, cost, tol=None):
    """Check the saddle-point characterization of a maximizing measure:
    every positive-mass atom must sit on the level set of the minimax
    level (after recentering by the measure's own center), and the
    measure's generalized variance must attain that level."""
    if tol is None:
        tol = DEFAULT_TOL_ITER
    inner = min(DEFAULT_TOL_ITER, tol / 4)
    lam, _ = chebyshev_level(cloud, cost, tol=inner)
    gv = generalized_variance(measure, cost, tol=inner)
    P, _ = measure.support()
    levels = cost(np.linalg.norm(P - gv.center, axis=1))
    on_level = bool(np.abs(np.atleast_1d(levels) - lam).max() <= tol)
    value_ok = gv.value >= lam - tol
    return SaddleReport(on_level and value_ok, on_level, value_ok,
                        lam, gv.center, gv.value)
