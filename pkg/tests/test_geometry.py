"""Domain membership, depth certificates and exhaustion contracts."""

import math

import numpy as np
import pytest

import stablelab as sl
from stablelab.geometry import _Intersection


def test_ball_membership_open():
    ball = sl.Ball((0.0, 0.0), 1.0)
    assert ball.contains_point([1e-9, 0.0])
    assert not ball.contains_point([1.0, 0.0])  # boundary excluded, set open
    assert not ball.contains_point([0.0, 1.0000001])


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        sl.Ball((0.0, 0.0), 1.0).contains(np.zeros((4, 3)))


def test_shrinking_ball_centers_inside():
    dom = sl.shrinking_ball_domain(2, 30)
    assert dom.contains_point([25.0, 0.0])
    assert dom.contains_point([1.0, 0.0])
    assert not dom.contains_point([40.0, 0.0])


def test_shrinking_radius_formula():
    # direct evaluation of (log log(n+3))^(-1/2)
    assert sl.shrinking_radius(1) == pytest.approx(math.log(math.log(4.0)) ** -0.5, rel=1e-14)
    r = sl.shrinking_radius(np.arange(1, 200))
    assert np.all(np.diff(r) < 0.0)
    assert r[-1] < r[0]


def test_shrinking_domain_1d_intervals():
    dom = sl.shrinking_ball_domain(1, 10)
    assert isinstance(dom, sl.UnionOfIntervals)
    r = sl.shrinking_radius(np.arange(1, 11))
    assert np.allclose(dom.segments[:, 1] - dom.segments[:, 0], 2 * r)


def test_lattice_union_matches_bruteforce():
    # the rounding fast path must agree with the naive max over all balls:
    # exact clearance inside (the bridge correction consumes it), matching
    # sign outside (only membership matters there)
    dom = sl.shrinking_ball_domain(2, 25)
    assert dom._lattice
    rng = np.random.default_rng(5)
    pts = np.column_stack([rng.uniform(-3, 30, 4000), rng.uniform(-3, 3, 4000)])
    brute = (
        dom.radii[None, :]
        - np.sqrt(((pts[:, None, :] - dom.centers[None, :, :]) ** 2).sum(axis=-1))
    ).max(axis=1)
    fast = dom.depth(pts)
    inside = brute > 0.0
    assert inside.any() and (~inside).any()
    assert np.allclose(fast[inside], brute[inside], atol=1e-12)
    assert np.all(fast[~inside] <= 0.0)
    assert np.array_equal(dom.contains(pts), inside)


def test_openness_proxy_depth_positive():
    shapes = [
        sl.Ball((0.0,), 2.0),
        sl.Interval(-1.0, 3.0),
        sl.Box((0.0, 0.0), (1.0, 2.0)),
        sl.shrinking_ball_domain(2, 10),
    ]
    rng = np.random.default_rng(11)
    for dom in shapes:
        pts = rng.uniform(-4, 12, size=(2000, dom.dim))
        inside = dom.contains(pts)
        if inside.any():
            assert np.all(dom.depth(pts)[inside] > 0.0)


def test_standard_exhaustion_fullspace_intervals():
    ex = sl.standard_exhaustion(sl.FullSpace(1), 3)
    assert [type(lv) for lv in ex.levels] == [sl.Interval] * 3
    assert [(lv.a, lv.b) for lv in ex.levels] == [(-1.0, 1.0), (-2.0, 2.0), (-3.0, 3.0)]


def test_exhaustion_monotone_on_probes():
    dom = sl.shrinking_ball_domain(2, 12)
    ex = sl.standard_exhaustion(dom, 8, radius_step=2.0)
    rng = np.random.default_rng(2)
    pts = np.column_stack([rng.uniform(-1, 14, 10_000), rng.uniform(-2, 2, 10_000)])
    assert ex.check_nested(pts)
    assert all(isinstance(lv, _Intersection) for lv in ex.levels)


def test_exhaustion_covers_each_ball_eventually():
    dom = sl.shrinking_ball_domain(2, 6)
    ex = sl.standard_exhaustion(dom, 10)
    for n in range(1, 7):
        level = ex.level_containing([float(n), 0.0])
        assert level is not None and level <= n
    assert ex.level_containing([50.0, 0.0]) is None


def test_disjoint_shrinking_intervals():
    dom = sl.disjoint_shrinking_intervals(64)
    segs = dom.segments
    assert np.all(segs[1:, 0] > segs[:-1, 1])  # strictly disjoint
    half = (segs[:, 1] - segs[:, 0]) / 2.0
    assert np.allclose(half, 0.5 * np.arange(1, 65) ** -0.42)
    with pytest.raises(ValueError):
        sl.disjoint_shrinking_intervals(4, half0=0.99)


def test_shape_validation_errors():
    with pytest.raises(ValueError):
        sl.Ball((0.0,), -1.0)
    with pytest.raises(ValueError):
        sl.Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        sl.UnionOfIntervals([[0.0, -1.0]])
    with pytest.raises(ValueError):
        sl.standard_exhaustion(sl.FullSpace(1), 0)
