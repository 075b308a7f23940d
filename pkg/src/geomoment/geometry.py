"""Point clouds, diameters, minimal enclosing balls, regular simplices and
the sample shapes used by the bound computations.
"""

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSupportError, ParseError

RANK_TOL = 1e-10
CONTAIN_TOL = 1e-12

# thresholds beyond which the exact recursion gives way to the
# farthest-point refinement scheme
WELZL_MAX_DIM = 12
WELZL_MAX_POINTS = 100_000


class PointCloud:
    """Finite list of points in R^n standing in for a compact set.

    1-D input is accepted as a flat sequence and reshaped to (N, 1).
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError("point cloud must be a nonempty (N, n) array")
        if not np.isfinite(pts).all():
            raise ValueError("point cloud has non-finite coordinates")
        pts = pts.copy()
        pts.setflags(write=False)
        self._points = pts

    @property
    def points(self):
        return self._points

    @property
    def dim(self):
        return self._points.shape[1]

    def __len__(self):
        return self._points.shape[0]

    def __repr__(self):
        return f"PointCloud({len(self)} points in R^{self.dim})"

    def translated(self, w):
        return PointCloud(self._points + np.asarray(w, dtype=float))

    def scaled(self, s):
        return PointCloud(self._points * float(s))


@dataclass(frozen=True)
class Ball:
    """Closed ball with center q and radius R >= 0."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        object.__setattr__(self, "center", q)
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, points, tol=0.0):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.linalg.norm(pts - self.center, axis=1)
        return bool((d <= self.radius + tol).all())


@dataclass(frozen=True)
class SimplexSpec:
    """A regular simplex: n+1 equidistant vertices with given diameter."""

    dim: int
    diameter: float
    center: np.ndarray
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        d = float(self.diameter)
        n = int(self.dim)
        tol = 1e-12 * d
        if v.shape != (n + 1, n):
            raise ValueError(f"expected {n + 1} vertices in R^{n}, got {v.shape}")
        pd = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)
        off = pd[~np.eye(n + 1, dtype=bool)]
        if np.abs(off - d).max() > tol:
            raise ValueError("vertices are not equidistant at the stated diameter")
        if np.linalg.norm(v.mean(axis=0) - c) > tol:
            raise ValueError("vertex mean does not match the stated center")
        circum = np.linalg.norm(v - c, axis=1)
        if np.abs(circum - jung_radius(n) * d).max() > tol:
            raise ValueError("circumradius does not match jung_radius(n) * diameter")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "diameter", d)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "vertices", v)


class Shape:
    """Parametric sample geometry: interval, ball, ellipse, box, diamond,
    or an explicit point cloud."""

    INTERVAL = "interval"
    BALL = "ball"
    ELLIPSE = "ellipse"
    BOX = "box"
    DIAMOND = "diamond"
    CLOUD = "cloud"

    def __init__(self, kind, **params):
        self.kind = kind
        self.params = params
        if kind == self.INTERVAL:
            if not params["k_lo"] <= params["k_hi"]:
                raise ValueError("interval requires k_lo <= k_hi")
        elif kind == self.BALL:
            if params["radius"] < 0:
                raise ValueError("ball radius must be nonnegative")
            params.setdefault("dim", 2)
        elif kind == self.ELLIPSE:
            if not params["a"] > params["b"] > 0:
                raise ValueError("ellipse requires a > b > 0")
        elif kind == self.BOX:
            a = np.atleast_1d(np.asarray(params["a"], dtype=float))
            if (a <= 0).any():
                raise ValueError("box half-widths must be positive")
            params["a"] = a
        elif kind == self.DIAMOND:
            if not params["a1"] > params["a2"] > 0:
                raise ValueError("diamond requires a1 > a2 > 0")
        elif kind == self.CLOUD:
            if not isinstance(params["cloud"], PointCloud):
                raise ValueError("cloud shape requires a PointCloud")
        else:
            raise ValueError(f"unknown shape kind {kind!r}")

    @classmethod
    def interval(cls, k_lo, k_hi):
        return cls(cls.INTERVAL, k_lo=float(k_lo), k_hi=float(k_hi))

    @classmethod
    def ball(cls, radius, dim=2):
        return cls(cls.BALL, radius=float(radius), dim=int(dim))

    @classmethod
    def ellipse(cls, a, b):
        return cls(cls.ELLIPSE, a=float(a), b=float(b))

    @classmethod
    def box(cls, a):
        return cls(cls.BOX, a=a)

    @classmethod
    def diamond(cls, a1, a2):
        return cls(cls.DIAMOND, a1=float(a1), a2=float(a2))

    @classmethod
    def cloud(cls, cloud):
        return cls(cls.CLOUD, cloud=cloud)

    @property
    def dim(self):
        if self.kind == self.INTERVAL:
            return 1
        if self.kind == self.BALL:
            return self.params["dim"]
        if self.kind in (self.ELLIPSE, self.DIAMOND):
            return 2
        if self.kind == self.BOX:
            return self.params["a"].size
        return self.params["cloud"].dim

    def contains(self, x, tol=CONTAIN_TOL):
        """Closed membership; curved boundaries get a relative tolerance,
        polytopes are exact."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.dim:
            raise ValueError(f"point has dimension {x.size}, shape has {self.dim}")
        p = self.params
        if self.kind == self.INTERVAL:
            return bool(p["k_lo"] <= x[0] <= p["k_hi"])
        if self.kind == self.BALL:
            r = p["radius"]
            return bool(np.linalg.norm(x) <= r * (1 + tol) + tol)
        if self.kind == self.ELLIPSE:
            q = (x[0] / p["a"]) ** 2 + (x[1] / p["b"]) ** 2
            return bool(q <= 1 + tol)
        if self.kind == self.BOX:
            return bool((np.abs(x) <= p["a"]).all())
        if self.kind == self.DIAMOND:
            return bool(abs(x[0]) / p["a1"] + abs(x[1]) / p["a2"] <= 1)
        pts = p["cloud"].points
        return bool(np.min(np.linalg.norm(pts - x, axis=1)) <= tol)


def diameter(cloud):
    """Largest pairwise Euclidean distance; 0 for a singleton."""
    P = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)
    N = P.shape[0]
    if N == 1:
        return 0.0
    sq = (P * P).sum(axis=1)
    best = 0.0
    step = max(1, int(2e6 / max(N, 1)))
    for i0 in range(0, N, step):
        blk = P[i0:i0 + step]
        d2 = sq[i0:i0 + step, None] + sq[None, :] - 2.0 * (blk @ P.T)
        best = max(best, float(d2.max()))
    return math.sqrt(max(best, 0.0))


def jung_radius(n):
    """Circumradius of the unit n-simplex, sqrt(n / (2n + 2))."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.sqrt(n / (2.0 * n + 2.0))


def circumball(points):
    """Smallest ball with all the given points on its boundary.

    Requires the points to be affinely independent (rank tolerance 1e-10);
    raises DegenerateSupportError otherwise.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    M = P.shape[0]
    if M == 1:
        return Ball(P[0], 0.0)
    U = P[1:] - P[0]
    s = np.linalg.svd(U, compute_uv=False)
    if s.size < M - 1 or s[-1] <= RANK_TOL * max(1.0, s[0]):
        raise DegenerateSupportError(
            f"{M} support points are affinely dependent (rank tolerance {RANK_TOL})"
        )
    G = U @ U.T
    alpha = np.linalg.solve(G, 0.5 * (U * U).sum(axis=1))
    center = P[0] + alpha @ U
    return Ball(center, float(np.linalg.norm(center - P[0])))


def _independent_subset(P, idx):
    """Greedily keep an affinely independent subset of the rows P[idx]."""
    kept = [idx[0]]
    basis = []
    for j in idx[1:]:
        u = P[j] - P[kept[0]]
        r = u.copy()
        for q in basis:
            r -= (r @ q) * q
        nr = np.linalg.norm(r)
        if nr > RANK_TOL * max(1.0, np.linalg.norm(u)):
            basis.append(r / nr)
            kept.append(j)
    return kept


def _support_ball(P, R):
    """Ball determined by the candidate boundary set R (indices into P)."""
    if not R:
        return None
    if len(R) > 1:
        R = _independent_subset(P, list(R))
    return circumball(P[list(R)])


def _ball_covers(ball, p):
    if ball is None:
        return False
    d2 = float(((p - ball.center) ** 2).sum())
    r2 = ball.radius * ball.radius
    return d2 <= r2 + max(1e-14, CONTAIN_TOL * r2)


def _welzl(P, order):
    """Randomized move-to-front recursion; recursion depth <= dim + 2.

    The point list lives in an array-backed linked list so that
    move-to-front never changes which points precede a recursion marker.
    """
    N = P.shape[0]
    n = P.shape[1]
    nxt = np.empty(N + 1, dtype=np.int64)  # node N is the list head sentinel
    prv = np.empty(N + 1, dtype=np.int64)
    seq = [N] + list(order)
    for a, b in zip(seq, seq[1:]):
        nxt[a] = b
        prv[b] = a
    nxt[seq[-1]] = -1

    def solve(end, R):
        ball = _support_ball(P, R)
        if len(R) == n + 1:
            return ball
        v = nxt[N]
        while v != end and v != -1:
            after = nxt[v]
            if not _ball_covers(ball, P[v]):
                ball = solve(v, R + (v,))
                # move v to the front; v stays ahead of every active marker
                nxt[prv[v]] = nxt[v]
                if nxt[v] != -1:
                    prv[nxt[v]] = prv[v]
                first = nxt[N]
                nxt[v] = first
                prv[v] = N
                nxt[N] = v
                if first != -1:
                    prv[first] = v
            v = after
        return ball

    ball = solve(-1, ())
    return ball if ball is not None else Ball(P[0], 0.0)


def _meb_refine(P, tol=1e-12):
    """Farthest-point refinement for large or high-dimensional clouds.

    Grows a candidate support set, solves it exactly with the recursion,
    and stops once the candidate ball covers everything; the subset radius
    certifies optimality from below.
    """
    N = P.shape[0]
    far0 = int(np.argmax(((P - P[0]) ** 2).sum(axis=1)))
    far1 = int(np.argmax(((P - P[far0]) ** 2).sum(axis=1)))
    core = [far0, far1]
    rng = np.random.default_rng(0)
    for _ in range(N):
        sub = P[core]
        ball = _welzl(sub, rng.permutation(len(core)))
        d = np.linalg.norm(P - ball.center, axis=1)
        far = int(np.argmax(d))
        if d[far] <= ball.radius * (1 + tol) + tol:
            return Ball(ball.center, max(ball.radius, float(d[far])))
        core.append(far)
    return Ball(ball.center, float(d[far]))


def min_enclosing_ball(cloud, seed=0):
    """Smallest closed ball containing the cloud.

    Welzl's randomized recursion with move-to-front for desk-scale input;
    beyond 12 dimensions or 1e5 points, a certified farthest-point
    refinement takes over.
    """
    P = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)
    N, n = P.shape
    if N == 1:
        return Ball(P[0], 0.0)
    if n > WELZL_MAX_DIM or N > WELZL_MAX_POINTS:
        return _meb_refine(P)
    rng = np.random.default_rng(seed)
    return _welzl(P, rng.permutation(N))


def meb_support(cloud, ball, tol=None):
    """Indices of cloud points on the boundary sphere of ``ball``."""
    P = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)
    if tol is None:
        tol = 1e-9 * (1.0 + ball.radius)
    d = np.linalg.norm(P - ball.center, axis=1)
    return np.nonzero(np.abs(d - ball.radius) <= tol)[0]


def regular_simplex(n, d=1.0, center=None):
    """Regular n-simplex with diameter d, vertices centered on ``center``.

    The vertex set of the standard simplex in R^{n+1} (side sqrt(2)) is
    mapped isometrically onto its n-dimensional affine hull via a Helmert
    basis, rescaled to side d and recentered.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if d <= 0:
        raise ValueError("diameter must be positive")
    if center is None:
        center = np.zeros(n)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    H = np.zeros((n, n + 1))
    for k in range(1, n + 1):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -k
        H[k - 1] /= math.sqrt(k * (k + 1.0))
    E = np.eye(n + 1) - 1.0 / (n + 1)
    V = (H @ E).T * (d / math.sqrt(2.0))
    V = V - V.mean(axis=0) + center
    return SimplexSpec(dim=n, diameter=d, center=center, vertices=V)


def shape_sample(shape, resolution, seed=0):
    """Deterministic-for-seed point cloud covering a shape.

    Polytopes contribute their vertices first (resolution must cover
    them); curved shapes get ``resolution`` boundary points plus
    resolution // 4 interior samples.
    """
    rng = np.random.default_rng(seed)
    p = shape.params
    if shape.kind == Shape.CLOUD:
        return p["cloud"]
    if shape.kind == Shape.INTERVAL:
        if resolution < 2:
            raise ValueError("interval sampling needs resolution >= 2")
        return PointCloud(np.linspace(p["k_lo"], p["k_hi"], resolution))
    if shape.kind == Shape.BOX:
        a = p["a"]
        n = a.size
        if resolution < 2 ** n:
            raise ValueError(f"box sampling needs resolution >= {2 ** n}")
        verts = np.array(list(itertools.product(*[(-ai, ai) for ai in a])))
        inner = rng.uniform(-1.0, 1.0, (resolution - verts.shape[0], n)) * a
        return PointCloud(np.vstack([verts, inner]))
    if shape.kind == Shape.DIAMOND:
        a1, a2 = p["a1"], p["a2"]
        if resolution < 4:
            raise ValueError("diamond sampling needs resolution >= 4")
        verts = np.array([[a1, 0.0], [-a1, 0.0], [0.0, a2], [0.0, -a2]])
        m = resolution - 4
        tri = rng.integers(0, 4, m)
        u = np.sqrt(rng.uniform(size=m))
        v = rng.uniform(size=m)
        # uniform in the triangle (0, s1*a1, s2*a2)
        s1 = np.where(tri % 2 == 0, 1.0, -1.0)
        s2 = np.where(tri < 2, 1.0, -1.0)
        x = u * (1 - v) * s1 * a1
        y = u * v * s2 * a2
        return PointCloud(np.vstack([verts, np.column_stack([x, y])]))
    if shape.kind == Shape.BALL:
        R, n = p["radius"], p["dim"]
        if resolution < 2:
            raise ValueError("ball sampling needs resolution >= 2")
        if n == 1:
            bdry = np.array([[-R], [R]])
        elif n == 2:
            th = 2.0 * np.pi * np.arange(resolution) / resolution
            bdry = R * np.column_stack([np.cos(th), np.sin(th)])
        else:
            g = rng.standard_normal((resolution, n))
            bdry = R * g / np.linalg.norm(g, axis=1, keepdims=True)
        m = resolution // 4
        g = rng.standard_normal((m, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = R * rng.uniform(size=(m, 1)) ** (1.0 / n)
        return PointCloud(np.vstack([bdry, r * g]) if m else bdry)
    if shape.kind == Shape.ELLIPSE:
        a, b = p["a"], p["b"]
        if resolution < 3:
            raise ValueError("ellipse sampling needs resolution >= 3")
        th = 2.0 * np.pi * np.arange(resolution) / resolution
        bdry = np.column_stack([a * np.cos(th), b * np.sin(th)])
        m = resolution // 4
        phi = 2.0 * np.pi * rng.uniform(size=m)
        r = np.sqrt(rng.uniform(size=m))
        inner = np.column_stack([a * r * np.cos(phi), b * r * np.sin(phi)])
        return PointCloud(np.vstack([bdry, inner]) if m else bdry)
    raise ValueError(f"unknown shape kind {shape.kind!r}")


def read_cloud_csv(path):
    """Read a PointCloud from CSV with header x1,...,xn; rejects ragged rows."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        n = len(header)
        if header != [f"x{i + 1}" for i in range(n)]:
            raise ParseError(f"{path}: expected header x1,...,x{n}, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n:
                raise ParseError(f"{path}: row {lineno} has {len(row)} fields, expected {n}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"{path}: row {lineno}: {exc}") from None
        if not rows:
            raise ParseError(f"{path}: no data rows")
    return PointCloud(np.array(rows))


def write_cloud_csv(cloud, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(cloud.dim)])
        for row in cloud.points:
            writer.writerow([format(v, ".17g") for v in row])
