import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumann_scissors.errors import DomainError
from neumann_scissors.geometry import (
    ParallelogramSpec,
    Polygon,
    RectangleSpec,
    area,
    clip_above,
    clip_below,
    diameter,
    make_parallelogram,
    perimeter,
    slab_decompose,
)

from oracles import random_convex_polygon

SQ3 = math.sqrt(3)
UNIT_SQUARE = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
TRIANGLE = Polygon([(0, 0), (1, 0), (0, 1)])
P213 = make_parallelogram(ParallelogramSpec(2, 1, math.pi / 3))

specs = st.builds(
    lambda b, ratio, alpha: ParallelogramSpec(b / ratio, b, alpha),
    st.floats(0.1, 10),
    st.floats(0.05, 1.0),
    st.floats(0.05, math.pi / 2),
)


def test_unit_square_from_spec():
    p = make_parallelogram(ParallelogramSpec(1, 1, math.pi / 2))
    assert p.vertices == ((0, 0), (1, 0), (1, 1), (0, 1))


def test_parallelogram_vertices():
    expected = [(0, 0), (1, 0), (2, SQ3), (1, SQ3)]
    np.testing.assert_allclose(np.array(P213.vertices), expected, rtol=0, atol=1e-15)
    assert area(P213) == pytest.approx(SQ3, rel=1e-12)


@pytest.mark.parametrize("a, b, alpha", [(1, 2, math.pi / 4), (1, 0, 1.0), (1, 1, 0.0),
                                         (1, 1, 2.0), (float("nan"), 1, 1)])
def test_invalid_spec(a, b, alpha):
    with pytest.raises(DomainError):
        make_parallelogram(ParallelogramSpec(a, b, alpha))


def test_invalid_polygons():
    with pytest.raises(DomainError):
        Polygon([(0, 0), (1, 0)])
    with pytest.raises(DomainError):
        Polygon([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(DomainError):
        Polygon([(0, 0), (1, 0), (1, 0), (0, 1)])
    with pytest.raises(DomainError):
        Polygon([(0, 0), (2, 2), (2, 0), (0, 2)])  # bow tie
    with pytest.raises(DomainError):
        RectangleSpec(0, 1)


@pytest.mark.parametrize("poly, expected", [(UNIT_SQUARE, 1.0), (P213, SQ3), (TRIANGLE, 0.5)])
def test_area(poly, expected):
    assert area(poly) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("poly, expected", [
    (UNIT_SQUARE, 4.0), (P213, 6.0), (RectangleSpec(1, 2).polygon(), 6.0)])
def test_perimeter(poly, expected):
    assert perimeter(poly) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("poly, expected", [
    (RectangleSpec(1, 2).polygon(), math.sqrt(5)), (UNIT_SQUARE, math.sqrt(2)), (P213, math.sqrt(7))])
def test_diameter(poly, expected):
    assert diameter(poly) == pytest.approx(expected, rel=1e-12)


def test_diameter_rejects_nonconvex():
    dart = Polygon([(0, 0), (2, 0), (1, 0.5), (1, 2)])
    with pytest.raises(DomainError):
        diameter(dart)
    with pytest.raises(DomainError):
        slab_decompose(dart)


def test_slab_unit_square():
    s = slab_decompose(UNIT_SQUARE)
    assert s.breakpoints == (0.0, 1.0)
    assert s(0.3) == pytest.approx(1.0)


def test_slab_parallelogram_has_constant_width_b():
    s = slab_decompose(P213)
    assert s.breakpoints == pytest.approx((0.0, SQ3))
    c0, c1 = s.coefficients[0]
    assert c0 == pytest.approx(1.0, abs=1e-14)
    assert c1 == pytest.approx(0.0, abs=1e-14)


def test_slab_triangle():
    s = slab_decompose(TRIANGLE)
    c0, c1 = s.coefficients[0]
    assert (c0, c1) == pytest.approx((1.0, -1.0), abs=1e-15)


def test_clip_unit_square():
    lo, hi = clip_below(UNIT_SQUARE, 0.5), clip_above(UNIT_SQUARE, 0.5)
    assert area(lo) == pytest.approx(0.5) and area(hi) == pytest.approx(0.5)
    assert max(q.y for q in lo) == 0.5 and min(q.y for q in hi) == 0.5


def test_clip_parallelogram_halves():
    lo, hi = clip_below(P213, SQ3 / 2), clip_above(P213, SQ3 / 2)
    assert area(lo) == pytest.approx(SQ3 / 2, rel=1e-12)
    assert area(hi) == pytest.approx(SQ3 / 2, rel=1e-12)
    assert len(lo) == 4 and len(hi) == 4


def test_clip_out_of_range():
    with pytest.raises(DomainError):
        clip_below(UNIT_SQUARE, 2.0)
    with pytest.raises(DomainError):
        clip_above(UNIT_SQUARE, 0.0)


def test_clip_snaps_to_nearby_vertex():
    kite = Polygon([(0, 0), (1, 0.5), (0, 1), (-1, 0.5)])
    lo = clip_below(kite, 0.5 + 1e-14)
    assert max(q.y for q in lo) == 0.5
    assert len(lo) == 3


def test_polygon_json_roundtrip():
    text = P213.to_json()
    back = Polygon.from_dict(json.loads(text))
    assert back == P213


@given(specs)
def test_parallelogram_measures(spec):
    p = make_parallelogram(spec)
    assert area(p) == pytest.approx(spec.a * spec.b * math.sin(spec.alpha), rel=1e-12)
    assert perimeter(p) == pytest.approx(2 * (spec.a + spec.b), rel=1e-12)
    assert all(q.y >= 0 for q in p)


@given(specs)
def test_convexity_bound_perimeter_over_diameter(spec):
    p = make_parallelogram(spec)
    assert perimeter(p) / diameter(p) <= math.pi + 1e-12


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_clip_partition(seed, frac):
    poly = Polygon(random_convex_polygon(np.random.default_rng(seed)))
    ys = [q.y for q in poly]
    y0 = min(ys) + frac * (max(ys) - min(ys))
    lo, hi = clip_below(poly, y0), clip_above(poly, y0)
    assert area(lo) + area(hi) == pytest.approx(area(poly), rel=1e-12)
    assert all(q.y <= y0 for q in lo) and all(q.y >= y0 for q in hi)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_slab_integral_equals_area(seed):
    poly = Polygon(random_convex_polygon(np.random.default_rng(seed)))
    slabs = slab_decompose(poly)
    assert slabs.integral() == pytest.approx(area(poly), rel=1e-12)
    for y0, y1, c0, c1 in slabs.intervals():
        assert c0 + c1 * y0 >= -1e-12 and c0 + c1 * y1 >= -1e-12
