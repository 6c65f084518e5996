"""Planar convex geometry primitives.

Polygons are immutable, counterclockwise and canonical (no repeated or
collinear vertices).  Vectors are plain ``numpy`` arrays of shape ``(2,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidPolygon, OriginNotInterior


@dataclass(frozen=True)
class Tolerances:
    geom: float = 1e-9  # vertex coincidence / collinearity
    area: float = 1e-12  # below this an intersection is degenerate
    ang: float = 1e-9  # radians, normal matching
    val: float = 1e-9  # covariogram value comparisons


TOL = Tolerances()


def configure(**kwargs) -> Tolerances:
    """Override tolerances globally, e.g. ``configure(geom=1e-8)``."""
    global TOL
    TOL = replace(TOL, **kwargs)
    return TOL


def vec(x, y=None) -> np.ndarray:
    if y is None:
        return np.asarray(x, dtype=float).reshape(2)
    return np.array([x, y], dtype=float)


def rot90(v):
    """Counterclockwise rotation by a right angle; works on ``(..., 2)``."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.hypot(v[0], v[1])


def angle_of(v) -> float:
    return math.atan2(v[1], v[0]) % (2 * math.pi)


@dataclass(frozen=True, eq=False)
class Segment:
    """Closed segment ``[a, b]``; ``a == b`` encodes a point."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", vec(self.a))
        object.__setattr__(self, "b", vec(self.b))

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.b - self.a)))

    @property
    def is_point(self) -> bool:
        return self.length <= TOL.geom

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.a + self.b)

    def __neg__(self) -> Segment:
        return Segment(-self.a, -self.b)

    def __repr__(self):
        return f"Segment({self.a.tolist()}, {self.b.tolist()})"


@dataclass(frozen=True, eq=False)
class NormalArc:
    """Counterclockwise arc of unit normals from ``u_start`` to ``u_end``."""

    u_start: np.ndarray
    u_end: np.ndarray

    @property
    def measure(self) -> float:
        a = math.atan2(cross(self.u_start, self.u_end), float(self.u_start @ self.u_end))
        return a % (2 * math.pi)

    def __neg__(self) -> NormalArc:
        return NormalArc(-self.u_start, -self.u_end)

    def close_to(self, other: NormalArc, tol: float | None = None) -> bool:
        tol = TOL.ang if tol is None else tol
        return _angle_between(self.u_start, other.u_start) <= tol and _angle_between(
            self.u_end, other.u_end
        ) <= tol


def _angle_between(u, v) -> float:
    return abs(math.atan2(cross(u, v), float(u @ v)))


def _canonical_ring(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or not np.all(np.isfinite(pts)):
        raise InvalidPolygon("vertices must be a finite (n, 2) array")
    # drop repeated vertices (cyclically)
    keep = [p for i, p in enumerate(pts) if np.hypot(*(p - pts[i - 1])) > TOL.geom or i == 0]
    ring = list(keep)
    while len(ring) > 1 and np.hypot(*(ring[0] - ring[-1])) <= TOL.geom:
        ring.pop()
    if len(ring) < 3:
        raise InvalidPolygon("fewer than three distinct vertices")
    arr = np.array(ring)
    signed = 0.5 * float(np.sum(cross(arr, np.roll(arr, -1, axis=0))))
    if abs(signed) <= TOL.area:
        raise InvalidPolygon("polygon has (near) zero area")
    if signed < 0:
        arr = arr[::-1]
    ring = list(arr)
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        n = len(ring)
        for i in range(n):
            p, c, q = ring[i - 1], ring[i], ring[(i + 1) % n]
            e1, e2 = c - p, q - c
            s = cross(e1, e2) / (np.hypot(*e1) * np.hypot(*e2))
            if s < -TOL.geom:
                raise InvalidPolygon("polygon is not convex")
            if s <= TOL.geom:
                del ring[i]
                changed = True
                break
    if len(ring) < 3:
        raise InvalidPolygon("polygon collapses to a segment")
    return np.array(ring)


class Polygon:
    """Convex polygon with counterclockwise, canonical vertices."""

    __slots__ = ("_v", "_normals", "_offsets")

    def __init__(self, vertices):
        v = _canonical_ring(vertices)
        v.setflags(write=False)
        self._v = v
        self._normals = None
        self._offsets = None

    @classmethod
    def _trusted(cls, v: np.ndarray) -> Polygon:
        obj = cls.__new__(cls)
        v = np.array(v, dtype=float)
        v.setflags(write=False)
        obj._v = v
        obj._normals = None
        obj._offsets = None
        return obj

    @classmethod
    def from_points(cls, points) -> Polygon:
        return cls(convex_hull(points))

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    def __len__(self):
        return len(self._v)

    def __repr__(self):
        return f"Polygon({np.round(self._v, 12).tolist()})"

    @property
    def edges(self) -> np.ndarray:
        """Edge vectors; edge ``i`` runs from vertex ``i`` to vertex ``i+1``."""
        return np.roll(self._v, -1, axis=0) - self._v

    @property
    def normals(self) -> np.ndarray:
        """Outer unit normals of the edges."""
        if self._normals is None:
            e = self.edges
            n = np.stack([e[:, 1], -e[:, 0]], axis=1)
            n /= np.hypot(n[:, 0], n[:, 1])[:, None]
            n.setflags(write=False)
            self._normals = n
        return self._normals

    @property
    def offsets(self) -> np.ndarray:
        """Support values ``h_i`` so that ``P = {y : <y, u_i> <= h_i}``."""
        if self._offsets is None:
            h = np.einsum("ij,ij->i", self.normals, self._v)
            h.setflags(write=False)
            self._offsets = h
        return self._offsets

    @property
    def area(self) -> float:
        return area(self)

    @property
    def centroid(self) -> np.ndarray:
        v, w = self._v, np.roll(self._v, -1, axis=0)
        c = cross(v, w)
        a = 0.5 * c.sum()
        return ((v + w) * c[:, None]).sum(axis=0) / (6.0 * a)

    def translate(self, t) -> Polygon:
        return Polygon._trusted(self._v + vec(t))

    def scale(self, lam: float) -> Polygon:
        """Homothety about the origin; negative factors reflect."""
        if lam == 0:
            raise InvalidPolygon("scaling by zero collapses the polygon")
        # a negative factor is a point reflection, which keeps orientation
        return Polygon._trusted(self._v * lam)

    def __neg__(self) -> Polygon:
        return Polygon._trusted(-self._v)

    def contains(self, p, tol: float | None = None) -> bool:
        tol = TOL.geom if tol is None else tol
        p = vec(p)
        return bool(np.all(self.normals @ p - self.offsets <= tol))

    def signed_distance(self, pts) -> np.ndarray:
        """Max facet violation ``max_i <p,u_i> - h_i`` (negative inside)."""
        pts = np.asarray(pts, dtype=float)
        return np.max(pts @ self.normals.T - self.offsets, axis=-1)


def convex_hull(points) -> np.ndarray:
    """Monotone-chain hull, counterclockwise, collinear points dropped.

    May return fewer than three points for degenerate input.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-1] - out[-2], p - out[-1]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def polygon_or_segment(points):
    """Convex hull of ``points`` as a Polygon, a Segment, or None if empty."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return None
    hull = convex_hull(pts)
    if len(hull) >= 3 and abs(_ring_area(hull)) > TOL.area:
        try:
            return Polygon(hull)
        except InvalidPolygon:
            pass
    return _extreme_segment(pts)


def _extreme_segment(pts: np.ndarray) -> Segment:
    d2 = np.sum((pts[:, None] - pts[None]) ** 2, axis=-1)
    i, j = np.unravel_index(np.argmax(d2), d2.shape)
    return Segment(pts[i], pts[j])


def _ring_area(v: np.ndarray) -> float:
    return 0.5 * float(np.sum(cross(v, np.roll(v, -1, axis=0))))


def area(P: Polygon) -> float:
    return _ring_area(P.vertices)


def euclid_perimeter(P: Polygon) -> float:
    e = P.edges
    return float(np.hypot(e[:, 0], e[:, 1]).sum())


def clip_ring(ring: np.ndarray, normals: np.ndarray, offsets: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex vertex ring by half-planes.

    Returns the (possibly degenerate, possibly empty) clipped ring.
    """
    out = [np.asarray(p, dtype=float) for p in ring]
    slack = tol * (1.0 + float(np.max(np.abs(offsets))))
    for u, h in zip(normals, offsets):
        if not out:
            break
        src, out = out, []
        s = [float(p @ u) - h for p in src]
        m = len(src)
        for i in range(m):
            j = (i + 1) % m
            a_in = s[i] <= slack
            b_in = s[j] <= slack
            if a_in:
                out.append(src[i])
            if a_in != b_in:
                lam = s[i] / (s[i] - s[j])
                out.append(src[i] + lam * (src[j] - src[i]))
    return np.array(out).reshape(-1, 2)


def intersect(P: Polygon, Q: Polygon):
    """Return ``P ∩ Q`` as a Polygon, a degenerate Segment, or None (empty)."""
    ring = clip_ring(Q.vertices, P.normals, P.offsets)
    if len(ring) == 0:
        return None
    if len(ring) >= 3 and abs(_ring_area(ring)) >= TOL.area:
        try:
            return Polygon(ring)
        except InvalidPolygon:
            pass
    return _extreme_segment(ring)


def _bottom_first(v: np.ndarray) -> np.ndarray:
    k = np.lexsort((v[:, 0], v[:, 1]))[0]
    return np.roll(v, -k, axis=0)


def _sum_ring(terms) -> np.ndarray:
    """Vertex ring of ``Σ c_i P_i`` (``c_i > 0``) from one angular edge merge.

    Parallel edges are fused, so the ring has no collinear vertices apart
    from rounding noise.
    """
    start = np.zeros(2)
    parts = []
    for c, P in terms:
        v = c * _bottom_first(P.vertices)
        start = start + v[0]
        parts.append(np.roll(v, -1, axis=0) - v)
    e = np.concatenate(parts)
    ang = np.mod(np.arctan2(e[:, 1], e[:, 0]), 2 * np.pi)
    order = np.argsort(ang, kind="stable")
    e, ang = e[order], ang[order]
    grp = np.concatenate([[0], np.cumsum(np.diff(ang) > 1e-12)])
    merged = np.zeros((grp[-1] + 1, 2))
    np.add.at(merged, grp, e)
    return start + np.concatenate([[np.zeros(2)], np.cumsum(merged, axis=0)[:-1]])


def minkowski_sum(P: Polygon, Q: Polygon) -> Polygon:
    """Minkowski sum by merging the two edge sequences in angular order."""
    return Polygon(_sum_ring([(1.0, P), (1.0, Q)]))


def add_segment(P: Polygon, s: Segment) -> Polygon:
    """``P ⊕ [a, b]`` as the hull of the two translates."""
    if s.is_point:
        return P.translate(s.a)
    return Polygon.from_points(np.concatenate([P.vertices + s.a, P.vertices + s.b]))


def minkowski_combination(terms, canonical: bool = True) -> Polygon:
    """``Σ c_i P_i`` for nonnegative ``c_i``; zero coefficients are skipped.

    ``canonical=False`` skips re-validation of the merged ring (faster, used
    in inner loops where the result is only measured).
    """
    terms = [(float(c), P) for c, P in terms if c > 0]
    if not terms:
        raise InvalidPolygon("all coefficients vanish")
    if len(terms) == 1:
        c, P = terms[0]
        return P.scale(c)
    ring = _sum_ring(terms)
    return Polygon(ring) if canonical else Polygon._trusted(ring)


def difference_body(P: Polygon) -> Polygon:
    return minkowski_sum(P, -P)


def support_width(P: Polygon, u) -> tuple[float, float]:
    u = vec(u)
    d = P.vertices @ u
    return float(d.max()), float(d.max() - d.min())


def support(P: Polygon, u) -> float:
    return float(np.max(P.vertices @ vec(u)))


def face(P: Polygon, u) -> Segment:
    """Face with outer normal ``u``: an edge, or a vertex as a point segment."""
    u = vec(u)
    n = P.normals
    ang = np.abs(np.arctan2(cross(n, u[None, :]), n @ u))
    i = int(np.argmin(ang))
    if ang[i] <= TOL.ang:
        v = P.vertices
        return Segment(v[i], v[(i + 1) % len(v)])
    k = int(np.argmax(P.vertices @ u))
    return Segment(P.vertices[k], P.vertices[k])


def normal_cone(P: Polygon, v: int) -> NormalArc:
    n = P.normals
    k = len(n)
    return NormalArc(n[(v - 1) % k].copy(), n[v % k].copy())


def polar(P: Polygon) -> Polygon:
    h = P.offsets
    if np.min(h) <= TOL.geom:
        raise OriginNotInterior("origin is not interior to the polygon")
    return Polygon(P.normals / h[:, None])


def point_segment_distance(p, a, b) -> float:
    d = b - a
    L2 = float(d @ d)
    t = 0.0 if L2 == 0 else min(1.0, max(0.0, float((p - a) @ d) / L2))
    return float(np.hypot(*(a + t * d - p)))


def distance_to_polygon(p, P) -> float:
    """Euclidean distance from a point to a Polygon or Segment (0 inside)."""
    p = vec(p)
    if isinstance(P, Segment):
        return point_segment_distance(p, P.a, P.b)
    if P.contains(p, tol=0.0):
        return 0.0
    v = P.vertices
    return min(point_segment_distance(p, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


def hausdorff(P, Q) -> float:
    """Hausdorff distance between convex polygons (attained at vertices)."""
    pv = P.vertices if isinstance(P, Polygon) else np.array([P.a, P.b])
    qv = Q.vertices if isinstance(Q, Polygon) else np.array([Q.a, Q.b])
    return max(
        max(distance_to_polygon(p, Q) for p in pv),
        max(distance_to_polygon(q, P) for q in qv),
    )


def canonical_form(P: Polygon) -> np.ndarray:
    """Centroid-centred vertices starting from the lexicographically lowest."""
    v = P.vertices - P.centroid
    k = np.lexsort((v[:, 1], v[:, 0]))[0]
    return np.roll(v, -k, axis=0)


def same_up_to_translation(P: Polygon, Q: Polygon, tol: float | None = None) -> bool:
    tol = TOL.geom if tol is None else tol
    a, b = canonical_form(P), canonical_form(Q)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


def same_vertex_set(P: Polygon, Q: Polygon, tol: float | None = None) -> bool:
    tol = TOL.geom if tol is None else tol
    a, b = P.vertices, Q.vertices
    if a.shape != b.shape:
        return False
    d = np.hypot(*(a[:, None, :] - b[None, :, :]).transpose(2, 0, 1))
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def unit_square() -> Polygon:
    return Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> Polygon:
    t = phase + 2 * np.pi * np.arange(n) / n
    return Polygon(radius * np.stack([np.cos(t), np.sin(t)], axis=1))


def random_polygon(rng: np.random.Generator, n: int = 6, radius: float = 1.0) -> Polygon:
    """Hull of ``n`` jittered points around a circle; at least a triangle."""
    while True:
        t = np.sort(rng.uniform(0, 2 * np.pi, n))
        r = radius * rng.uniform(0.55, 1.0, n)
        pts = np.stack([r * np.cos(t), r * np.sin(t)], axis=1) + rng.normal(0, 0.05, 2)
        hull = convex_hull(pts)
        if len(hull) >= 3:
            try:
                P = Polygon(hull)
            except InvalidPolygon:
                continue
            # avoid needle-like bodies at unit scale
            if P.area > 0.2 * radius**2:
                return P
