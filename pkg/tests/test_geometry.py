import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from valgram.errors import InvalidPolygon
from valgram.geometry import (
    Polygon,
    Segment,
    convex_hull,
    difference_body,
    face,
    hausdorff,
    intersect,
    minkowski_combination,
    minkowski_sum,
    normal_cone,
    polar,
    random_polygon,
    regular_polygon,
    same_up_to_translation,
    same_vertex_set,
    support_width,
)


def scipy_hull_area(points):
    return ConvexHull(np.asarray(points)).volume


seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ---------------------------------------------------------------- polygons


def test_clockwise_input_is_reoriented():
    P = Polygon([[0, 0], [0, 1], [1, 1], [1, 0]])
    assert P.area == pytest.approx(1.0)
    e = P.edges
    assert np.all(e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0] > 0)


def test_collinear_vertex_is_dropped():
    P = Polygon([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1]])
    assert len(P) == 4


@pytest.mark.parametrize(
    "pts",
    [
        [[0, 0], [1, 0]],
        [[0, 0], [1, 0], [2, 0]],
        [[0, 0], [2, 0], [1, 0.2], [1, 2]],
        [[0, 0], [1, 0], [np.nan, 1]],
    ],
)
def test_invalid_polygons_rejected(pts):
    with pytest.raises(InvalidPolygon):
        Polygon(pts)


def test_area_and_perimeter(square):
    assert square.area == 1.0
    assert Polygon([[0, 0], [2, 0], [0, 2]]).area == 2.0
    assert np.hypot(*square.edges.T).sum() == 4.0


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_hull_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(40, 2))
    P = Polygon(convex_hull(pts))
    ref = ConvexHull(pts)
    assert P.area == pytest.approx(ref.volume, rel=1e-12)
    assert len(P) == len(ref.vertices)


# ------------------------------------------------------------ intersection


def test_intersection_cases(square):
    Q = intersect(square, square.translate([0.5, 0.5]))
    assert same_vertex_set(Q, Polygon([[0.5, 0.5], [1, 0.5], [1, 1], [0.5, 1]]))
    S = intersect(square, square.translate([1, 0]))
    assert isinstance(S, Segment)
    assert S.length == pytest.approx(1.0)
    assert np.allclose(sorted([S.a[1], S.b[1]]), [0, 1]) and np.allclose([S.a[0], S.b[0]], 1)
    assert intersect(square, square.translate([2, 0])) is None


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_intersection_area_against_sampling(seed):
    rng = np.random.default_rng(seed)
    P, Q = random_polygon(rng, 6), random_polygon(rng, 5).translate(rng.uniform(-0.5, 0.5, 2))
    R = intersect(P, Q)
    pts = rng.uniform(-1, 1, size=(20000, 2))
    inside = (P.signed_distance(pts) <= 0) & (Q.signed_distance(pts) <= 0)
    est = inside.mean() * 4.0
    got = R.area if isinstance(R, Polygon) else 0.0
    assert abs(got - est) < 5 * math.sqrt(4 * max(est, 1e-3) / 20000) + 1e-9


# ------------------------------------------------------- Minkowski sums


def test_minkowski_sum_of_squares(square):
    assert same_vertex_set(minkowski_sum(square, square), square.scale(2))


def test_triangle_plus_reflection_is_hexagon(triangle):
    H = minkowski_sum(triangle, -triangle)
    pts = (triangle.vertices[:, None] + (-triangle.vertices)[None]).reshape(-1, 2)
    assert len(H) == 6
    assert H.area == pytest.approx(scipy_hull_area(pts), rel=1e-14)
    # six times the triangle
    assert H.area == pytest.approx(6 * triangle.area)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_minkowski_sum_matches_pairwise_hull(seed):
    rng = np.random.default_rng(seed)
    P, Q = random_polygon(rng, int(rng.integers(3, 9))), random_polygon(rng, int(rng.integers(3, 9)))
    S = minkowski_sum(P, Q)
    pts = (P.vertices[:, None] + Q.vertices[None]).reshape(-1, 2)
    assert S.area == pytest.approx(scipy_hull_area(pts), rel=1e-12)
    assert hausdorff(S, Polygon.from_points(pts)) < 1e-12


def test_sum_homogeneity(rng):
    P = random_polygon(rng, 7)
    assert minkowski_sum(P, P).area == pytest.approx(4 * P.area, rel=1e-13)


def test_minkowski_combination(rng):
    P, Q = random_polygon(rng, 5), random_polygon(rng, 4)
    C = minkowski_combination([(0.3, P), (0.7, Q)])
    assert hausdorff(C, minkowski_sum(P.scale(0.3), Q.scale(0.7))) < 1e-13
    assert same_vertex_set(minkowski_combination([(2.0, P)]), P.scale(2.0))


# -------------------------------------------------------- difference body


def test_difference_body_examples(square, triangle):
    assert same_vertex_set(difference_body(square), Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]]))
    D = difference_body(triangle)
    assert len(D) == 6 and same_vertex_set(D, -D)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_difference_body_translation_invariant(seed):
    rng = np.random.default_rng(seed)
    P = random_polygon(rng, 6)
    assert hausdorff(difference_body(P), difference_body(P.translate(rng.normal(size=2)))) < 1e-12


# -------------------------------------------------- support, faces, cones


def test_support_width(square):
    assert support_width(square, [0, 1]) == pytest.approx((1, 1))
    u = np.array([1, 1]) / math.sqrt(2)
    h, w = support_width(square, u)
    assert h == pytest.approx(math.sqrt(2)) and w == pytest.approx(math.sqrt(2))


def test_width_is_even(rng):
    P = random_polygon(rng, 6)
    for _ in range(10):
        u = rng.normal(size=2)
        assert support_width(P, u)[1] == pytest.approx(support_width(P, -u)[1])


def test_faces(square):
    F = face(square, [0, 1])
    assert np.allclose(sorted([tuple(F.a), tuple(F.b)]), [(0, 1), (1, 1)])
    F = face(square, [1, 1])
    assert F.is_point and np.allclose(F.a, [1, 1])


def test_face_of_difference_body(rng):
    P = random_polygon(rng, 5)
    D = difference_body(P)
    for th in np.linspace(0, 2 * np.pi, 25, endpoint=False):
        u = np.array([np.cos(th), np.sin(th)])
        assert face(D, u).length == pytest.approx(face(P, u).length + face(P, -u).length, abs=1e-12)


def test_normal_cones(square):
    k = int(np.argmin(np.hypot(*(square.vertices - [1, 1]).T)))
    arc = normal_cone(square, k)
    assert np.allclose(arc.u_start, [1, 0]) and np.allclose(arc.u_end, [0, 1])
    hexa = regular_polygon(6)
    assert normal_cone(hexa, 0).measure == pytest.approx(np.pi / 3)
    P = random_polygon(np.random.default_rng(3), 7)
    assert sum(normal_cone(P, i).measure for i in range(len(P))) == pytest.approx(2 * np.pi)


def test_polar():
    sq = Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    assert same_vertex_set(polar(sq), Polygon([[1, 0], [0, 1], [-1, 0], [0, -1]]))
    P = random_polygon(np.random.default_rng(8), 6)
    P = P.translate(-P.centroid)
    assert same_vertex_set(polar(polar(P)), P, tol=1e-9)


def test_polar_of_triangle_by_membership():
    T = Polygon([[-1, -1], [2, -0.5], [0, 1.5]])
    Tp = polar(T)
    assert len(Tp) == 3
    rng = np.random.default_rng(1)
    ys = rng.uniform(-3, 3, size=(4000, 2))
    # y is in the polar iff <x, y> <= 1 for every vertex x of T
    member = np.all(ys @ T.vertices.T <= 1, axis=1)
    sd = Tp.signed_distance(ys)
    clear = np.abs(sd) > 1e-9
    assert np.array_equal(member[clear], sd[clear] <= 0)


def test_translation_equivalence(rng):
    P = random_polygon(rng, 6)
    assert same_up_to_translation(P, P.translate([3, -2]))
    assert not same_up_to_translation(P, P.scale(1.1))
