import math

import numpy as np
import pytest

from geomoment import (AtomicMeasure, DomainError, PointCloud, RadialCost,
                       SearchConfig, diameter, generalized_variance,
                       isodiametric_bound, jung_radius, jung_verify,
                       regular_simplex, search_max, simplex_maximizer,
                       tension_check, variance, verify_simplex_optimality)
from geomoment.isodiametric import SearchResult


def test_bound_values():
    assert isodiametric_bound(2, 1.0) == pytest.approx(1.0 / 3.0)
    assert isodiametric_bound(3, 1.0) == pytest.approx(3.0 / 8.0)
    assert isodiametric_bound(1, 1.0) == pytest.approx(0.25)
    assert isodiametric_bound(3, 1.0, RadialCost.power(1)) == \
        pytest.approx(math.sqrt(3.0 / 8.0))
    assert isodiametric_bound(2, 2.0) == pytest.approx(4.0 / 3.0)


def test_simplex_maximizer_examples():
    m1 = simplex_maximizer(1, 1.0)
    assert sorted(m1.atoms.points.ravel()) == pytest.approx([-0.5, 0.5])
    assert np.allclose(m1.weights, 0.5)
    assert variance(m1) == pytest.approx(0.25, rel=1e-12)
    m2 = simplex_maximizer(2, 1.0)
    assert variance(m2) == pytest.approx(1.0 / 3.0, rel=1e-12)
    m2s = simplex_maximizer(2, math.sqrt(2))
    assert variance(m2s) == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert diameter(m2s.atoms) == pytest.approx(math.sqrt(2), rel=1e-12)


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(n=2, d=1.0, atom_count=2)
    with pytest.raises(ValueError):
        SearchConfig(n=1, d=-1.0, atom_count=3)
    with pytest.raises(ValueError):
        SearchConfig(n=1, d=1.0, atom_count=3, restarts=0)


def test_search_n1_recovers_popoviciu_pair():
    res = search_max(SearchConfig(n=1, d=1.0, atom_count=4, restarts=10, seed=3))
    assert res.best_value == pytest.approx(0.25, abs=1e-9)
    atoms, w = res.best_measure.support()
    assert diameter(PointCloud(atoms)) == pytest.approx(1.0, abs=1e-9)
    # mass splits onto two clusters at distance 1
    order = np.argsort(atoms.ravel())
    gap = np.diff(atoms.ravel()[order])
    clusters = (gap > 0.5).sum() + 1
    assert clusters == 2
    assert res.diameter_residual <= 1e-9


def test_search_n2_reaches_triangle():
    cfg = SearchConfig(n=2, d=1.0, atom_count=6, restarts=20, seed=7)
    res = search_max(cfg)
    assert 1.0 / 3.0 - 1e-4 <= res.best_value <= 1.0 / 3.0 + 1e-8
    assert verify_simplex_optimality(res, 2, 1.0, tol=1e-3)
    assert len(res.per_restart_values) == 20
    assert max(res.per_restart_values) == pytest.approx(res.best_value)


def test_search_power1_tetrahedron():
    cfg = SearchConfig(n=3, d=1.0, atom_count=8, restarts=12, seed=11,
                       cost=RadialCost.power(1))
    res = search_max(cfg)
    assert abs(res.best_value - math.sqrt(3.0 / 8.0)) <= 1e-3


def test_search_value_is_certified_genvar():
    cfg = SearchConfig(n=2, d=1.0, atom_count=5, restarts=5, seed=19)
    res = search_max(cfg)
    again = generalized_variance(res.best_measure, cfg.cost, tol=1e-8)
    assert abs(again.value - res.best_value) <= 1e-7


def test_search_scaling_of_values():
    # quadratic cost: values scale by d^2
    base = search_max(SearchConfig(n=2, d=1.0, atom_count=4, restarts=8, seed=23))
    scaled = search_max(SearchConfig(n=2, d=2.5, atom_count=4, restarts=8, seed=23))
    assert scaled.best_value / base.best_value == pytest.approx(2.5 ** 2, rel=1e-6)


def test_search_never_beats_bound_and_random_measures_obey_it():
    rng = np.random.default_rng(29)
    for n in (1, 2, 3):
        bound2 = isodiametric_bound(n, 1.0)
        bound1 = isodiametric_bound(n, 1.0, RadialCost.power(1))
        for _ in range(300):
            N = int(rng.integers(n + 1, 9))
            P = rng.normal(size=(N, n))
            dia = diameter(PointCloud(P))
            if dia > 0:
                P = P / dia  # diameter exactly 1
            mu = AtomicMeasure(P, rng.dirichlet(np.ones(N)))
            assert variance(mu) <= bound2 + 1e-8
            r1 = generalized_variance(mu, RadialCost.power(1), tol=1e-6)
            assert r1.value <= bound1 + 1e-6


def test_verify_simplex_optimality_on_exact_maximizer():
    mu = simplex_maximizer(2, 1.0)
    res = SearchResult(mu, variance(mu), [variance(mu)], 0.0, 1, 0.0)
    assert verify_simplex_optimality(res, 2, 1.0, tol=1e-6)


def test_verify_simplex_optimality_rejects_two_point():
    mu = AtomicMeasure([[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5])
    res = SearchResult(mu, variance(mu), [variance(mu)], 0.0, 1, 0.0)
    assert not verify_simplex_optimality(res, 2, 1.0, tol=1e-3)


def test_verify_simplex_optimality_rejects_jittered():
    rng = np.random.default_rng(31)
    V = regular_simplex(2, 1.0).vertices + rng.normal(size=(3, 2)) * 0.05
    mu = AtomicMeasure(V, np.ones(3) / 3)
    val = variance(mu)
    res = SearchResult(mu, val, [val], 0.0, 1, 0.0)
    assert not verify_simplex_optimality(res, 2, 1.0, tol=1e-3, tol_geom=1e-3)


def test_tension_simplex_at_threshold():
    V = regular_simplex(2, 1.0).vertices
    rep = tension_check(PointCloud(V), jung_radius(2), tol=1e-9)
    assert rep.classification == "OriginInHull_SimplexVertices"
    assert rep.origin_in_hull and rep.simplex_vertices and not rep.violation


def test_tension_cap_above_threshold_origin_outside():
    # configurations on a sphere of radius 0.7 > r_2 with diameter <= 1
    # must keep the origin out of their hull; sample valid ones rejection-style
    rng = np.random.default_rng(5)
    r = 0.7
    found = 0
    for _ in range(10_000):
        ths = rng.uniform(0, 2 * np.pi, 3)
        P = r * np.column_stack([np.cos(ths), np.sin(ths)])
        if diameter(PointCloud(P)) <= 1.0:
            rep = tension_check(PointCloud(P), r)
            assert rep.classification == "OriginOutsideHull"
            found += 1
        if found >= 200:
            break
    assert found >= 50  # non-vacuous


def test_tension_below_threshold_no_claim():
    P = np.array([[0.4, 0.0], [-0.4, 0.0]])
    rep = tension_check(PointCloud(P), 0.4)
    assert rep.origin_in_hull
    assert rep.simplex_vertices is False
    assert rep.violation is False


def test_tension_precondition_errors():
    P = np.array([[0.5, 0.0], [0.0, 0.7]])
    with pytest.raises(DomainError, match="sphere"):
        tension_check(PointCloud(P), 0.5)
    V = regular_simplex(2, 2.0).vertices  # diameter 2 > 1
    with pytest.raises(DomainError, match="diameter"):
        tension_check(PointCloud(V), jung_radius(2) * 2.0)


def test_jung_simplex_tight_with_extraction():
    for n in (1, 2, 3):
        V = regular_simplex(n, 1.0).vertices
        rep = jung_verify(PointCloud(V))
        assert rep.ok and rep.tight and rep.extraction_ok
        assert rep.simplex_points.shape == (n + 1, n)
        assert rep.radius == pytest.approx(jung_radius(n), abs=1e-9)


def test_jung_two_point_tight_in_1d():
    rep = jung_verify(PointCloud([0.0, 1.0]))
    assert rep.radius == pytest.approx(0.5)
    assert rep.bound == pytest.approx(0.5)
    assert rep.ok and rep.tight and rep.extraction_ok


def test_jung_random_clouds(make_cloud):
    rng = np.random.default_rng(37)
    for _ in range(200):
        n = int(rng.choice([2, 3]))
        cloud = make_cloud(rng, n)  # factory already asserts the bound
        rep = jung_verify(cloud)
        assert rep.ok


def test_search_report_payload():
    cfg = SearchConfig(n=1, d=1.0, atom_count=3, restarts=3, seed=1)
    res = search_max(cfg)
    payload = res.to_report(cfg)
    assert payload["bound"] == pytest.approx(0.25)
    assert len(payload["per_restart_values"]) == 3
    assert payload["config"]["cost"] == {"kind": "power", "p": 2.0}
    assert payload["wall_clock"] >= 0.0


def test_search_scaling_power1():
    # first-power cost: values scale linearly with the diameter cap
    cost = RadialCost.power(1)
    base = search_max(SearchConfig(n=2, d=1.0, atom_count=4, restarts=6, seed=41, cost=cost))
    scaled = search_max(SearchConfig(n=2, d=3.0, atom_count=4, restarts=6, seed=41, cost=cost))
    assert scaled.best_value / base.best_value == pytest.approx(3.0, rel=1e-5)


def test_search_with_explicit_step_and_iters():
    cfg = SearchConfig(n=1, d=1.0, atom_count=3, restarts=4, seed=2,
                       max_iters=200, step=0.1)
    res = search_max(cfg)
    assert res.best_value == pytest.approx(0.25, abs=1e-8)
