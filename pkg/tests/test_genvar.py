import math

import numpy as np
import pytest

from geomoment import (AtomicMeasure, ParseError, PointCloud, RadialCost,
                       chebyshev_level, generalized_variance, mean,
                       min_enclosing_ball, regular_simplex, sup_genvar,
                       variance, verify_saddle)
from geomoment.genvar import read_cost_json


def unit_simplex_measure(n):
    V = regular_simplex(n, 1.0).vertices
    return AtomicMeasure(V, np.full(n + 1, 1.0 / (n + 1)))


def test_power_validation():
    with pytest.raises(ValueError):
        RadialCost.power(0.5)
    RadialCost.power(1.0)


def test_pwl_validation_messages():
    with pytest.raises(ValueError, match="strictly increasing"):
        RadialCost.piecewise_linear([[0, 0], [0, 1]])
    with pytest.raises(ValueError, match="convex"):
        RadialCost.piecewise_linear([[0, 0], [1, 2], [2, 3]])
    with pytest.raises(ValueError, match="increasing"):
        RadialCost.piecewise_linear([[0, 1], [1, 0], [2, 1]])
    with pytest.raises(ValueError, match="coercivity"):
        RadialCost.piecewise_linear([[0, 0], [1, 0]])
    with pytest.raises(ValueError, match="abscissa must be 0"):
        RadialCost.piecewise_linear([[1, 0], [2, 1]])


def test_pwl_evaluation_and_slope():
    c = RadialCost.piecewise_linear([[0, 0.1], [1, 0.6], [2, 2.0]])
    assert c(0.0) == pytest.approx(0.1)
    assert c(0.5) == pytest.approx(0.35)
    assert c(1.5) == pytest.approx(1.3)
    assert c(3.0) == pytest.approx(2.0 + 1.4)  # last-slope extrapolation
    assert c.slope(0.5) == pytest.approx(0.5)
    assert c.slope(1.5) == pytest.approx(1.4)
    assert c.slope(5.0) == pytest.approx(1.4)


def test_cost_json_round_trip(tmp_path):
    c = RadialCost.from_spec({"kind": "power", "p": 2})
    assert c.kind == "power" and c.p == 2
    c2 = read_cost_json('{"kind":"pwl","knots":[[0,0],[1,1]]}')
    assert c2.kind == "pwl"
    path = tmp_path / "cost.json"
    path.write_text('{"kind":"power","p":3}')
    assert read_cost_json(str(path)).p == 3
    with pytest.raises(ParseError):
        read_cost_json('{"kind":"power"}')
    with pytest.raises(ParseError):
        read_cost_json('{"kind":"pwl","knots":[[0,0],[1,-1]]}')


def test_quadratic_reduces_to_variance_and_mean():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        N = int(rng.integers(1, 12))
        mu = AtomicMeasure(rng.normal(size=(N, n)), rng.dirichlet(np.ones(N)))
        res = generalized_variance(mu, RadialCost.power(2))
        assert abs(res.value - variance(mu)) <= 1e-8
        assert np.abs(res.center - mean(mu)).max() <= 1e-4
        assert res.converged and res.unique


def test_power1_simplex_centroid():
    mu = unit_simplex_measure(2)
    res = generalized_variance(mu, RadialCost.power(1))
    assert res.value == pytest.approx(1 / math.sqrt(3), abs=1e-8)
    assert np.abs(res.center).max() <= 1e-8
    assert not res.unique  # affine cost: uniqueness not guaranteed


def test_dirac_any_power():
    mu = AtomicMeasure([[1.0, 2.0]], [1.0])
    for p in (1, 2, 3.5):
        res = generalized_variance(mu, RadialCost.power(p))
        assert res.value == 0.0
        assert np.allclose(res.center, [1.0, 2.0])


def test_general_power_certified():
    mu = unit_simplex_measure(2)
    res = generalized_variance(mu, RadialCost.power(3), tol=1e-6)
    assert res.converged
    assert res.inner_gap <= 1e-6
    # symmetry: center at centroid, value = r_2^3
    assert res.value == pytest.approx((1 / math.sqrt(3)) ** 3, abs=1e-5)


def test_pwl_cost_inner_minimization():
    mu = AtomicMeasure([[-1.0], [1.0]], [0.5, 0.5])
    c = RadialCost.piecewise_linear([[0, 0], [0.5, 0.25], [2, 2.5]])
    res = generalized_variance(mu, c, tol=1e-6)
    assert res.converged
    assert res.value == pytest.approx(c(1.0), abs=1e-5)  # center at 0
    assert not res.unique


def test_weiszfeld_atom_collision():
    # heavy atom: the optimal center IS that atom (subgradient condition)
    mu = AtomicMeasure([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [0.6, 0.2, 0.2])
    res = generalized_variance(mu, RadialCost.power(1), tol=1e-8)
    assert np.abs(res.center - [0.0, 0.0]).max() <= 1e-6
    assert res.value == pytest.approx(0.4, abs=1e-8)


def test_chebyshev_quadratic_matches_enclosing_ball():
    rng = np.random.default_rng(5)
    for trial in range(100):
        n = [2, 3, 5][trial % 3]
        cloud = PointCloud(rng.normal(size=(int(rng.integers(5, 30)), n)))
        lam, z = chebyshev_level(cloud, RadialCost.power(2), tol=1e-6)
        ball = min_enclosing_ball(cloud)
        assert abs(lam - ball.radius ** 2) <= 1e-6
        assert np.linalg.norm(z - ball.center) <= 1e-3


def test_chebyshev_power1_simplex():
    V = regular_simplex(2, 1.0).vertices
    lam, z = chebyshev_level(PointCloud(V), RadialCost.power(1), tol=1e-8)
    assert lam == pytest.approx(1 / math.sqrt(3), abs=1e-8)
    assert np.abs(z).max() <= 1e-6


def test_chebyshev_singleton():
    lam, z = chebyshev_level(PointCloud([[2.0, (3.0)]]), RadialCost.power(4))
    assert lam == 0.0
    assert np.allclose(z, [2.0, 3.0])


def test_sup_genvar_examples():
    assert sup_genvar(PointCloud([-1.0, 1.0]), RadialCost.power(2), 1e-8) == \
        pytest.approx(1.0, abs=1e-8)
    V2 = regular_simplex(2, 1.0).vertices
    assert sup_genvar(PointCloud(V2), RadialCost.power(2), 1e-8) == \
        pytest.approx(1.0 / 3.0, abs=1e-8)
    V3 = regular_simplex(3, 1.0).vertices
    assert sup_genvar(PointCloud(V3), RadialCost.power(1), 1e-8) == \
        pytest.approx(math.sqrt(3.0 / 8.0), abs=1e-8)


def test_weak_duality_random_measures(make_cloud):
    rng = np.random.default_rng(21)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        cloud = make_cloud(rng, n, size=int(rng.integers(3, 12)))
        w = rng.dirichlet(np.ones(len(cloud)))
        mu = AtomicMeasure(cloud.points, w)
        cost = RadialCost.power(float(rng.choice([1, 2, 3])))
        lam, _ = chebyshev_level(cloud, cost, tol=1e-6)
        res = generalized_variance(mu, cost, tol=1e-6)
        assert res.value <= lam + 2e-6


def test_verify_saddle_uniform_simplex():
    mu = unit_simplex_measure(2)
    rep = verify_saddle(mu, PointCloud(mu.atoms.points), RadialCost.power(2), tol=1e-6)
    assert rep.is_maximizer and rep.support_on_level and rep.value_attained


def test_verify_saddle_two_point_not_maximizer():
    V = regular_simplex(2, 1.0).vertices
    mu = AtomicMeasure(V, [0.5, 0.5, 0.0])
    rep = verify_saddle(mu, PointCloud(V), RadialCost.power(2), tol=1e-6)
    assert not rep.is_maximizer
    assert rep.genvar == pytest.approx(0.25, abs=1e-8)  # 1/4 < 1/3


def test_verify_saddle_dirac_singleton():
    mu = AtomicMeasure([[4.0, -1.0]], [1.0])
    rep = verify_saddle(mu, PointCloud([[4.0, -1.0]]), RadialCost.power(2), tol=1e-8)
    assert rep.is_maximizer
    assert rep.level == pytest.approx(0.0, abs=1e-12)


def test_monotone_costs_give_monotone_levels(make_cloud):
    rng = np.random.default_rng(33)
    grid = np.linspace(0, 3, 50)
    for _ in range(10):
        cloud = make_cloud(rng, 2, size=10)
        c1 = RadialCost.piecewise_linear([[0, 0], [1, 0.5], [3, 2.0]])
        c2 = RadialCost.power(1)
        assert (np.asarray(c1(grid)) <= np.asarray(c2(grid)) + 1e-12).all()
        l1, _ = chebyshev_level(cloud, c1, tol=1e-7)
        l2, _ = chebyshev_level(cloud, c2, tol=1e-7)
        assert l1 <= l2 + 1e-6


def test_center_translation_equivariance():
    rng = np.random.default_rng(41)
    for p in (1, 2, 3):
        mu = AtomicMeasure(rng.normal(size=(8, 2)), rng.dirichlet(np.ones(8)))
        t = np.array([2.5, -1.0])
        r0 = generalized_variance(mu, RadialCost.power(p), tol=1e-8)
        r1 = generalized_variance(mu.translated(t), RadialCost.power(p), tol=1e-8)
        assert np.abs(r1.center - (r0.center + t)).max() <= 1e-4
        assert abs(r1.value - r0.value) <= 1e-6


def test_chebyshev_coincident_cloud():
    P = PointCloud(np.tile([2.0, -1.0], (6, 1)))
    lam, z = chebyshev_level(P, RadialCost.power(2))
    assert lam == 0.0
    assert np.allclose(z, [2.0, -1.0])


def test_verify_saddle_power1_tetrahedron():
    V = regular_simplex(3, 1.0).vertices
    mu = AtomicMeasure(V, np.full(4, 0.25))
    rep = verify_saddle(mu, PointCloud(V), RadialCost.power(1), tol=1e-6)
    assert rep.is_maximizer
    assert rep.level == pytest.approx(math.sqrt(3.0 / 8.0), abs=1e-6)
