"""Moment maximization under a diameter constraint: the sharp simplex
bound, its extremal measures, a multi-restart local search that recovers
them, and checkers for the sphere-support tension statement and for the
enclosing-ball/diameter ratio bound.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import AtomicMeasure, max_variance
from .errors import DomainError, NoConvergenceError
from .genvar import RadialCost, generalized_variance
from .geometry import (PointCloud, diameter, jung_radius, meb_support,
                       min_enclosing_ball, regular_simplex)
from .lp import hull_membership

WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    n: int
    d: float
    atom_count: int
    restarts: int = 50
    max_iters: int = 400
    step: float | None = None
    seed: int = 0
    cost: RadialCost = field(default_factory=lambda: RadialCost.power(2))

    def __post_init__(self):
        if self.atom_count < self.n + 1:
            raise ValueError("need at least n+1 atoms")
        if self.d <= 0:
            raise ValueError("diameter bound must be positive")
        if self.restarts < 1:
            raise ValueError("need at least one restart")


@dataclass(frozen=True)
class SearchResult:
    best_measure: AtomicMeasure
    best_value: float
    per_restart_values: list
    diameter_residual: float
    converged_restarts: int
    wall_clock: float

    def to_report(self, config):
        return {
            "config": {
                "n": config.n, "d": config.d, "atom_count": config.atom_count,
                "restarts": config.restarts, "max_iters": config.max_iters,
                "step": config.step, "seed": config.seed,
                "cost": config.cost.to_spec(),
            },
            "per_restart_values": self.per_restart_values,
            "best_value": self.best_value,
            "bound": isodiametric_bound(config.n, config.d, config.cost),
            "diameter_residual": self.diameter_residual,
            "converged_restarts": self.converged_restarts,
            "wall_clock": self.wall_clock,
            "best_measure": {
                "atoms": self.best_measure.atoms.points,
                "weights": self.best_measure.weights,
            },
        }


@dataclass(frozen=True)
class TensionReport:
    classification: str
    origin_in_hull: bool
    simplex_vertices: bool
    violation: bool
    radius: float
    threshold_radius: float


@dataclass(frozen=True)
class JungReport:
    radius: float
    bound: float
    ok: bool
    tight: bool
    simplex_points: np.ndarray | None
    extraction_ok: bool | None


def isodiametric_bound(n, d, cost=None):
    """Sharp upper bound v(r_n * d) on the recentered moment of any
    measure whose support has diameter at most d."""
    if cost is None:
        cost = RadialCost.power(2)
    return float(cost(jung_radius(n) * d))


def simplex_maximizer(n, d):
    """The extremal measure: mass 1/(n+1) on each vertex of a regular
    n-simplex of diameter d centered at the origin."""
    spec = regular_simplex(n, d)
    return AtomicMeasure(spec.vertices, np.full(n + 1, 1.0 / (n + 1)))


def _project_diameter(atoms, w, d):
    """Restore diameter <= d by pulling the worst-separated pair together
    along its chord, repeatedly; this rearranges angles and is what lets
    atoms coalesce into clusters.  A global contraction toward the
    weighted centroid is the fallback if pair repair cycles."""
    atoms = atoms.copy()
    for _ in range(10 * atoms.shape[0] + 20):
        D = np.linalg.norm(atoms[:, None, :] - atoms[None, :, :], axis=2)
        i, j = np.unravel_index(int(np.argmax(D)), D.shape)
        if D[i, j] <= d:
            return atoms - (w @ atoms)
        u = (atoms[j] - atoms[i]) / D[i, j]
        excess = D[i, j] - d
        atoms[i] += 0.5 * excess * u
        atoms[j] -= 0.5 * excess * u
    dia = diameter(atoms)
    if dia > d:
        centroid = w @ atoms
        atoms = centroid + (atoms - centroid) * (d / dia)
    return atoms - (w @ atoms)


def _weights_at_atoms(atoms, cost, inner_tol):
    """Best weights at fixed atoms, with the certified value they attain.

    Quadratic cost: exactly the variance-maximizing measure over the atom
    cloud.  Other costs: weights supported on the atoms at the top cost
    level around the enclosing-ball center, chosen by a feasibility LP so
    the center is stationary for the recentered moment (the saddle
    conditions); Frank-Wolfe ascent is the fallback when no such weights
    exist at this configuration.
    """
    if cost.kind == "power" and cost.p == 2:
        rep = max_variance(PointCloud(atoms))
        return rep.maximizer.weights, rep.primal_value
    ball = min_enclosing_ball(PointCloud(atoms))
    dist = np.linalg.norm(atoms - ball.center, axis=1)
    lam = float(cost(ball.radius))
    lvl_tol = max(1e-7 * (1.0 + ball.radius), 10 * inner_tol * (1 + ball.radius))
    on_level = np.abs(dist - ball.radius) <= lvl_tol
    idx = np.nonzero(on_level)[0]
    w = None
    if idx.size and (dist[idx] > 1e-300).all():
        grads = (cost.slope(dist[idx])[:, None]
                 * (ball.center - atoms[idx]) / dist[idx][:, None])
        w_lvl = hull_membership(grads, np.zeros(atoms.shape[1]))
        if w_lvl is not None:
            w = np.zeros(atoms.shape[0])
            w[idx] = w_lvl
    if w is None:
        w = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
        w = _frank_wolfe_weights(atoms, w, cost, inner_tol)
    val = generalized_variance(AtomicMeasure(atoms, w), cost, tol=inner_tol).value
    return w, val


def _frank_wolfe_weights(atoms, w, cost, inner_tol, rounds=12):
    """Vertex steps with backtracking line search on the true value."""
    def value(wts):
        return generalized_variance(AtomicMeasure(atoms, wts), cost, tol=inner_tol).value

    val = value(w)
    for _ in range(rounds):
        gv = generalized_variance(AtomicMeasure(atoms, w), cost, tol=inner_tol)
        scores = cost(np.linalg.norm(atoms - gv.center, axis=1))
        vertex = np.zeros_like(w)
        vertex[int(np.argmax(scores))] = 1.0
        for gamma in (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125):
            w_try = (1.0 - gamma) * w + gamma * vertex
            v_try = value(w_try)
            if v_try > val:
                w, val = w_try, v_try
                break
        else:
            break
    return w


def _search_one(config, restart):
    """One restart: ascend the enclosing-ball radius of the configuration
    under the diameter cap (boundary atoms step outward, worst pairs get
    pulled back together), then solve for the best weights at the final
    atoms.  The radius level v(R) is exactly the largest recentered moment
    any measure on the atoms can achieve, so it is the search objective.
    """
    rng = np.random.default_rng(config.seed + restart)
    n, N, d, cost = config.n, config.atom_count, config.d, config.cost
    quadratic = cost.kind == "power" and cost.p == 2
    inner_tol = 1e-8 if quadratic else 1e-6

    w0 = np.full(N, 1.0 / N)
    atoms = _project_diameter(rng.uniform(-0.5 * d, 0.5 * d, (N, n)), w0, d)
    ball = min_enclosing_ball(PointCloud(atoms))
    step = config.step if config.step is not None else 0.25 * d
    step_floor = 1e-9 * d
    converged = False
    for _ in range(config.max_iters):
        offs = atoms - ball.center
        norms = np.linalg.norm(offs, axis=1)
        on_bdry = np.abs(norms - ball.radius) <= 1e-7 * (1.0 + ball.radius)
        movable = on_bdry & (norms > 1e-12 * d)
        dirs = np.zeros((N, n))
        dirs[movable] = offs[movable] / norms[movable, None]
        cand = _project_diameter(atoms + step * dirs, w0, d)
        cand_ball = min_enclosing_ball(PointCloud(cand))
        if cand_ball.radius > ball.radius + 1e-15:
            atoms, ball = cand, cand_ball
        else:
            step *= 0.5
            if step < step_floor:
                converged = True
                break
    w, val = _weights_at_atoms(atoms, cost, inner_tol)
    return atoms, w, val, converged


def search_max(config):
    """Multi-restart alternating ascent over (atoms, weights) under the
    diameter cap.  Deterministic for a fixed seed; restarts use derived
    seeds and the best restart wins.  Restarts that exhaust the iteration
    budget are recorded, not fatal; only all of them failing is an error.
    """
    t0 = time.perf_counter()
    per_restart = []
    best = None
    converged_count = 0
    for r in range(config.restarts):
        atoms, w, val, converged = _search_one(config, r)
        per_restart.append(val)
        converged_count += bool(converged)
        if best is None or val > best[2]:
            best = (atoms, w, val)
    if converged_count == 0:
        raise NoConvergenceError(
            f"no restart converged within {config.max_iters} iterations",
            cap=config.max_iters,
        )
    atoms, w, val = best
    keep = w > WEIGHT_FLOOR
    measure = AtomicMeasure(atoms[keep], w[keep] / w[keep].sum())
    support, _ = measure.support()
    residual = max(0.0, diameter(support) - config.d)
    return SearchResult(measure, val, per_restart, residual,
                        converged_count, time.perf_counter() - t0)


def _single_linkage(points, threshold):
    """Cluster indices by single linkage at the given distance threshold."""
    N = points.shape[0]
    parent = list(range(N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(N):
        for j in range(i + 1, N):
            if np.linalg.norm(points[i] - points[j]) <= threshold:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(N):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def verify_simplex_optimality(result, n, d, tol, tol_geom=None, cost=None):
    """Is the search result the simplex extremizer?

    Requires the value to reach the sharp bound within ``tol``, the
    positive-mass atoms to form exactly n+1 clusters of radius at most
    ``tol_geom`` with pairwise cluster distances within ``tol_geom`` of d,
    and cluster masses within ``tol`` of 1/(n+1).
    """
    if tol_geom is None:
        tol_geom = max(1e-3 * d, 10 * 1e-8)
    bound = isodiametric_bound(n, d, cost)
    if result.best_value < bound - tol:
        return False
    atoms, w = result.best_measure.support()
    clusters = _single_linkage(atoms, tol_geom)
    if len(clusters) != n + 1:
        return False
    centers = []
    for idx in clusters:
        pts = atoms[idx]
        ctr = np.average(pts, axis=0, weights=w[idx])
        if np.linalg.norm(pts - ctr, axis=1).max() > tol_geom:
            return False
        centers.append(ctr)
    centers = np.asarray(centers)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            if abs(np.linalg.norm(centers[i] - centers[j]) - d) > tol_geom:
                return False
    masses = np.array([w[idx].sum() for idx in clusters])
    return bool(np.abs(masses - 1.0 / (n + 1)).max() <= tol)


def tension_check(points, r, tol=1e-9):
    """Classify a sphere-supported, diameter-capped configuration.

    Preconditions: every point within ``tol`` of the centered sphere of
    radius r, and diameter at most 1 + tol.  With the origin in the hull,
    radii above the threshold r_n + tol are impossible and flag a
    violation; at the threshold the points must form unit-simplex
    vertices; below it no claim is made.
    """
    cloud = points if isinstance(points, PointCloud) else PointCloud(points)
    P = cloud.points
    n = cloud.dim
    radii = np.linalg.norm(P, axis=1)
    if np.abs(radii - r).max() > tol:
        raise DomainError(
            f"point {int(np.argmax(np.abs(radii - r)))} is off the radius-{r} sphere"
        )
    dia = diameter(cloud)
    if dia > 1.0 + tol:
        raise DomainError(f"diameter {dia} exceeds 1")
    rn = jung_radius(n)
    in_hull = hull_membership(P, np.zeros(n)) is not None
    if not in_hull:
        return TensionReport("OriginOutsideHull", False, False, False, r, rn)
    if r > rn + tol:
        return TensionReport("OriginInHull_Violation", True, False, True, r, rn)
    if r >= rn - tol:
        simplexish = _is_unit_simplex_pattern(P, n, max(tol, 1e-7))
        label = "OriginInHull_SimplexVertices" if simplexish else "OriginInHull"
        return TensionReport(label, True, simplexish, False, r, rn)
    return TensionReport("OriginInHull", True, False, False, r, rn)


def _is_unit_simplex_pattern(P, n, tol):
    clusters = _single_linkage(P, max(tol, 1e-9))
    if len(clusters) != n + 1:
        return False
    centers = np.asarray([P[idx].mean(axis=0) for idx in clusters])
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            if abs(np.linalg.norm(centers[i] - centers[j]) - 1.0) > tol:
                return False
    return True


def jung_verify(cloud, tol=1e-7):
    """Check the enclosing-ball radius against r_n times the diameter.

    ``tight`` means the ratio is attained within ``tol``; in that case the
    report tries to extract n+1 atoms forming a simplex at the diameter.
    """
    ball = min_enclosing_ball(cloud)
    dia = diameter(cloud)
    n = cloud.dim
    bound = jung_radius(n) * dia
    ok = ball.radius <= bound + 1e-9
    tight = ball.radius >= bound - tol
    simplex_points = None
    extraction_ok = None
    if tight and dia > 0:
        extraction_ok = False
        idx = meb_support(cloud, ball, tol=max(tol, 1e-9 * (1 + ball.radius)))
        pts = cloud.points[idx]
        clusters = _single_linkage(pts, max(1e-3 * dia, 10 * tol))
        if len(clusters) == n + 1:
            centers = np.asarray([pts[c].mean(axis=0) for c in clusters])
            dists = [np.linalg.norm(centers[i] - centers[j])
                     for i in range(n + 1) for j in range(i + 1, n + 1)]
            if np.abs(np.asarray(dists) - dia).max() <= max(1e-3 * dia, 10 * tol):
                simplex_points = centers
                extraction_ok = True
    return JungReport(ball.radius, bound, bool(ok), bool(tight),
                      simplex_points, extraction_ok)
