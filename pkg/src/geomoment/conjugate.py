"""Convex-conjugate machinery for the squared-norm cost over a support set.

``phi`` is the function equal to -|x|^2 on the set and +infinity outside;
its conjugate and biconjugate drive all the variance bounds.  +infinity is
represented by ``math.inf`` throughout (an explicit IEEE value, checked by
``math.isinf``), never by a large finite sentinel.  For finite clouds the
biconjugate is evaluated exactly, pointwise, by a small linear program
over the atoms rather than by building the lower convex hull.
"""

import math

import numpy as np

from .geometry import PointCloud, Shape
from .lp import LpProblem, LpStatus, solve_lp


def phi(shape, x):
    """-|x|^2 on the shape (closed membership), +inf off it."""
    if isinstance(shape, PointCloud):
        shape = Shape.cloud(shape)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if shape.contains(x):
        return -float(x @ x)
    return math.inf


def conjugate_at(cloud, y):
    """sup over atoms of y.x + |x|^2 (the conjugate of phi at y)."""
    P = cloud.points
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.size != cloud.dim:
        raise ValueError(f"probe has dimension {y.size}, cloud has {cloud.dim}")
    return float(np.max(P @ y + (P * P).sum(axis=1)))


def biconjugate_at(cloud, x, feas_tol=1e-8):
    """Convex envelope of phi over the cloud, evaluated at x.

    Computed as min sum t_i (-|x_i|^2) over weights t >= 0 with unit mass
    and mean x; +inf when x lies outside the convex hull of the atoms.
    """
    P = cloud.points
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != cloud.dim:
        raise ValueError(f"point has dimension {x.size}, cloud has {cloud.dim}")
    N = P.shape[0]
    A = np.vstack([P.T, np.ones((1, N))])
    b = np.concatenate([x, [1.0]])
    sol = solve_lp(LpProblem(-(P * P).sum(axis=1), A, b), feas_tol=feas_tol)
    if sol.status is LpStatus.INFEASIBLE:
        return math.inf
    if sol.status is not LpStatus.OPTIMAL:
        raise AssertionError("envelope program cannot be unbounded on a simplex")
    return sol.value


def translated_biconjugate_zero(cloud, w, feas_tol=1e-8):
    """Envelope of the cloud shifted by -w, evaluated at the origin.

    Satisfies the translation identity: equals |w|^2 plus the envelope of
    the unshifted cloud at w (when w is in the hull; +inf otherwise).
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    return biconjugate_at(cloud.translated(-w), np.zeros(cloud.dim), feas_tol=feas_tol)
