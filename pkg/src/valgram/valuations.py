"""Seminorms, seminorm lengths and perimeters, mixed areas, and the
valuations ``phi = scale * (per_B + alpha * vol)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FullPlaneHasNoAssociatedBody, InvalidPolygon, OriginNotInterior
from .geometry import (
    TOL,
    Polygon,
    Segment,
    add_segment,
    area,
    minkowski_sum,
    polar,
    regular_polygon,
    rot90,
    unit,
    vec,
)

DISK_POLYGON_SIDES = 256


class SeminormBall:
    """Origin-symmetric closed convex set with interior (unit ball of a seminorm)."""

    bounded = True

    def norm(self, v):
        """Minkowski functional, vectorised over the last axis."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PolygonBall(SeminormBall):
    polygon: Polygon

    def __post_init__(self):
        P = self.polygon
        if np.min(P.offsets) <= TOL.geom:
            raise OriginNotInterior("seminorm ball must contain the origin in its interior")
        v = P.vertices
        d = np.hypot(*(v[:, None, :] + v[None, :, :]).transpose(2, 0, 1))
        if not np.all(d.min(axis=1) <= TOL.geom):
            raise InvalidPolygon("seminorm ball must be origin-symmetric")
        object.__setattr__(self, "_facets", P.normals / P.offsets[:, None])

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        return np.maximum(np.max(v @ self._facets.T, axis=-1), 0.0)

    def to_json(self):
        return {"type": "polygon", "vertices": self.polygon.vertices.tolist()}


@dataclass(frozen=True)
class DiskBall(SeminormBall):
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        return np.hypot(v[..., 0], v[..., 1]) / self.radius

    def to_json(self):
        return {"type": "disk", "radius": self.radius}


@dataclass(frozen=True, eq=False)
class StripBall(SeminormBall):
    """``{x : |<x, z>| <= halfwidth}``."""

    z: np.ndarray
    halfwidth: float = 1.0
    bounded = False

    def __post_init__(self):
        z = vec(self.z)
        if abs(np.hypot(*z) - 1.0) > TOL.geom:
            raise ValueError("strip direction must be a unit vector")
        if not self.halfwidth > 0:
            raise ValueError("halfwidth must be positive")
        object.__setattr__(self, "z", z)

    def norm(self, v):
        return np.abs(np.asarray(v, dtype=float) @ self.z) / self.halfwidth

    def to_json(self):
        return {"type": "strip", "z": self.z.tolist(), "halfwidth": self.halfwidth}


@dataclass(frozen=True)
class FullPlane(SeminormBall):
    bounded = False

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        return np.zeros(v.shape[:-1]) if v.ndim > 1 else 0.0

    def to_json(self):
        return {"type": "full"}


def ball_from_json(d: dict) -> SeminormBall:
    kind = d["type"]
    if kind == "polygon":
        return PolygonBall(Polygon(d["vertices"]))
    if kind == "disk":
        return DiskBall(float(d.get("radius", 1.0)))
    if kind == "strip":
        return StripBall(vec(d["z"]), float(d.get("halfwidth", 1.0)))
    if kind == "full":
        return FullPlane()
    raise ValueError(f"unknown ball type {kind!r}")


@dataclass(frozen=True)
class Valuation:
    """``scale * (per_B + alpha * vol)``."""

    ball: SeminormBall
    alpha: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def volume(cls) -> Valuation:
        return cls(FullPlane(), alpha=1.0)

    @classmethod
    def perimeter(cls, ball: SeminormBall | None = None, alpha: float = 0.0) -> Valuation:
        return cls(DiskBall() if ball is None else ball, alpha=alpha)

    @classmethod
    def width(cls, z) -> Valuation:
        """Width in direction ``z``: half the perimeter for the unit strip."""
        return cls(StripBall(unit(z), 1.0), alpha=0.0, scale=0.5)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.ball, FullPlane) and self.alpha == 0

    def __call__(self, K) -> float:
        return eval_valuation(self, K)

    def to_json(self) -> dict:
        return {"ball": self.ball.to_json(), "alpha": self.alpha, "scale": self.scale}

    @classmethod
    def from_json(cls, d: dict) -> Valuation:
        return cls(ball_from_json(d["ball"]), float(d.get("alpha", 0.0)), float(d.get("scale", 1.0)))


def seminorm(B: SeminormBall, x) -> float:
    return float(B.norm(vec(x)))


def len_B(B: SeminormBall, line) -> float:
    """Seminorm length of a polyline given as a sequence of points."""
    pts = np.asarray(line, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        return 0.0
    return float(np.sum(B.norm(np.diff(pts, axis=0))))


def per_B(B: SeminormBall, K) -> float:
    """Perimeter of a polygon; twice the length of a segment; 0 for points."""
    if K is None:
        return 0.0
    if isinstance(K, Segment):
        return 2.0 * float(B.norm(K.b - K.a))
    return float(np.sum(B.norm(K.edges)))


def mixed_area(K: Polygon, H) -> float:
    """``V(K, H)`` from ``vol(K+H) = vol K + 2 V(K,H) + vol H``; H may be a segment."""
    if isinstance(H, Segment):
        if H.is_point:
            return 0.0
        return 0.5 * (area(add_segment(K, H)) - area(K))
    return 0.5 * (area(minkowski_sum(K, H)) - area(K) - area(H))


def associated_body(B: SeminormBall, n_disk: int = DISK_POLYGON_SIDES):
    """The o-symmetric body ``H = 2 R(B°)`` with ``per_B(K) = V(K, H)``.

    The disk is replaced by a regular ``n_disk``-gon before taking the polar.
    """
    if isinstance(B, FullPlane):
        raise FullPlaneHasNoAssociatedBody("per_B vanishes identically for the full plane")
    if isinstance(B, StripBall):
        e = 2.0 * rot90(B.z) / B.halfwidth
        return Segment(-e, e)
    if isinstance(B, DiskBall):
        P = regular_polygon(n_disk, B.radius)
    else:
        P = B.polygon
    Q = polar(P)
    return Polygon(2.0 * rot90(Q.vertices))


def eval_valuation(phi: Valuation, K) -> float:
    """Evaluate on a Polygon, Segment (points included) or None (empty)."""
    if K is None:
        return 0.0
    if isinstance(K, Segment):
        return phi.scale * per_B(phi.ball, K)
    return phi.scale * (per_B(phi.ball, K) + phi.alpha * area(K))
