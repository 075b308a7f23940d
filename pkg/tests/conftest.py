import pytest

from geomoment import PointCloud, jung_radius, diameter, min_enclosing_ball


@pytest.fixture
def make_cloud():
    """Factory for random clouds that also enforces the global property:
    every cloud the suite generates satisfies the enclosing-ball/diameter
    ratio bound."""

    def factory(rng, n, size=None, recentered=False):
        if size is None:
            size = int(rng.integers(max(2 * (n + 1), 6), 40))
        P = rng.normal(size=(size, n))
        if recentered:
            P = P - P.mean(axis=0)
        cloud = PointCloud(P)
        ball = min_enclosing_ball(cloud)
        assert ball.radius <= jung_radius(n) * diameter(cloud) + 1e-9
        return cloud

    return factory
