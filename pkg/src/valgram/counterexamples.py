"""Bodies that are not determined by a covariogram: prisms and products
with an interval, and prismatoids whose width covariograms coincide.

Three-dimensional bodies are never built explicitly.  Products reduce to
their planar factor, and a prismatoid ``conv(F x {1} ∪ G x {-1})`` is
handled through its horizontal slices, which are Minkowski averages of the
two faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolated, ParameterOutOfRange
from .geometry import (
    TOL,
    Polygon,
    difference_body,
    hausdorff,
    intersect,
    minkowski_combination,
    minkowski_sum,
    same_up_to_translation,
    same_vertex_set,
    vec,
)
from .valuations import Valuation, eval_valuation

BISECT_TOL = 1e-9
BISECT_MAX_ITER = 60
FEASIBLE_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if self.b < self.a:
            raise ValueError("interval endpoints out of order")

    @property
    def length(self) -> float:
        return self.b - self.a

    def overlap(self, x: float) -> float:
        """Length of ``I ∩ (I + x)``; -1 when empty."""
        lo, hi = max(self.a, self.a + x), min(self.b, self.b + x)
        return hi - lo if hi >= lo else -1.0


# ---------------------------------------------------------------- products


_EUCLID = Valuation.perimeter()


def prism_surface_cov(I: Interval, H: Polygon, x: float, y) -> float:
    """Surface-area covariogram of the prism ``I x H`` at ``(x, y)``.

    A prism ``J x Q`` has surface area ``2 area(Q) + len(J) per(Q)``; the
    segment and point conventions for ``per`` make this valid for flat pieces.
    """
    ell = I.overlap(float(x))
    Q = intersect(H, H.translate(vec(y)))
    if ell < 0 or Q is None:
        return 0.0
    a = 0.0 if not isinstance(Q, Polygon) else Q.area
    return 2.0 * a + ell * eval_valuation(_EUCLID, Q)


def product_width_cov(H: Polygon, K: Interval, x, y: float, DH: Polygon | None = None) -> float:
    """Width covariogram of ``H x K`` in the interval direction at ``(x, y)``:
    ``1_DH(x) * len(K ∩ (K + y))``."""
    DH = difference_body(H) if DH is None else DH
    ell = K.overlap(float(y))
    if ell < 0 or DH.signed_distance(vec(x)) > TOL.geom:
        return 0.0
    return ell


# ------------------------------------------------------------- prismatoids


@dataclass(frozen=True, eq=False)
class Prismatoid:
    """``conv(F x {1} ∪ G x {-1})``."""

    F: Polygon
    G: Polygon

    def to_json(self) -> dict:
        return {"F": self.F.vertices.tolist(), "G": self.G.vertices.tolist()}

    @classmethod
    def from_json(cls, d) -> Prismatoid:
        return cls(Polygon(d["F"]), Polygon(d["G"]))


def _combo(terms, canonical: bool):
    terms = [(c, P) for c, P in terms if c > 1e-15]
    return minkowski_combination(terms, canonical=canonical)


def prismatoid_slice(Kp: Prismatoid, t: float, canonical: bool = True) -> Polygon:
    """Horizontal slice at height ``t``: ``((1+t)/2) F ⊕ ((1-t)/2) G``."""
    t = float(t)
    if not -1.0 <= t <= 1.0:
        raise ParameterOutOfRange(f"slice height {t} outside [-1, 1]")
    if t == 1.0:
        return Kp.F
    if t == -1.0:
        return Kp.G
    return _combo([(0.5 * (1 + t), Kp.F), (0.5 * (1 - t), Kp.G)], canonical)


def _point_distance(p: np.ndarray, P: Polygon) -> float:
    """Distance from ``p`` to a convex polygon (0 inside), vectorised over edges."""
    if P.signed_distance(p) <= 0:
        return 0.0
    a = P.vertices
    e = np.roll(a, -1, axis=0) - a
    lam = np.clip(np.einsum("ij,ij->i", p - a, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    d = a + lam[:, None] * e - p
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", d, d))))


def _slice_gap(Kp: Prismatoid, v: np.ndarray, s: float, t: float) -> float:
    """``dist(S(t), S(t - s) + v)``; convex in ``t``."""
    a, b = 0.5 * (1 + t), 0.5 * (1 - t)
    c, d = 0.5 * (1 + t - s), 0.5 * (1 - t + s)
    # S(t) - S(t-s) as one Minkowski combination of F, G, -F, -G
    P = _combo([(a, Kp.F), (b, Kp.G), (c, -Kp.F), (d, -Kp.G)], canonical=False)
    return _point_distance(v, P)


def _golden_min(f, lo: float, hi: float, stop):
    """Golden-section search on a convex function; stops early once ``stop(t)``."""
    r = 0.5 * (np.sqrt(5.0) - 1.0)
    a, b = lo, hi
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if stop(fc):
            return c, fc
        if stop(fd):
            return d, fd
        if b - a < 1e-13:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _bisect_edge(feasible, good: float, bad: float) -> float:
    for _ in range(BISECT_MAX_ITER):
        if abs(good - bad) <= BISECT_TOL:
            break
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    return good


def prismatoid_width_cov(Kp: Prismatoid, x3) -> float:
    """Width in the vertical direction of ``K ∩ (K + x3)``, ``x3 = (v, s)``.

    The heights ``t`` where the slices meet form an interval (convexity); its
    endpoints are located by bisection.
    """
    v, s = vec(x3[0]), float(x3[1])
    lo, hi = max(-1.0, -1.0 + s), min(1.0, 1.0 + s)
    if hi < lo:
        return 0.0

    def gap(t):
        return _slice_gap(Kp, v, s, t)

    def feasible(t):
        return gap(t) <= FEASIBLE_TOL

    t0 = 0.5 * (lo + hi)
    if not feasible(t0):
        t0, g0 = _golden_min(gap, lo, hi, lambda val: val <= FEASIBLE_TOL)
        if g0 > FEASIBLE_TOL:
            return 0.0
    left = lo if feasible(lo) else _bisect_edge(feasible, t0, lo)
    right = hi if feasible(hi) else _bisect_edge(feasible, t0, hi)
    return max(0.0, right - left)


def dk_slice(Kp: Prismatoid, tau: float) -> Polygon:
    """Slice of the 3-D difference body at height ``tau`` in (-2, 2).

    It is ``∪_t S(t) - S(t - tau)``; the family is Minkowski-affine in ``t``,
    so the union is the hull of its two extreme members.
    """
    tau = float(tau)
    if not -2.0 < tau < 2.0:
        raise ParameterOutOfRange("difference-body slice height must lie in (-2, 2)")
    lo, hi = max(-1.0, -1.0 + tau), min(1.0, 1.0 + tau)

    def member(t):
        a, b = 0.5 * (1 + t), 0.5 * (1 - t)
        c, d = 0.5 * (1 + t - tau), 0.5 * (1 - t + tau)
        return _combo([(a, Kp.F), (b, Kp.G), (c, -Kp.F), (d, -Kp.G)], canonical=True)

    return Polygon.from_points(np.concatenate([member(lo).vertices, member(hi).vertices]))


def dk_decomposition_check(Kp: Prismatoid, taus=None, tol: float | None = None) -> bool:
    """With ``DF = DG`` the difference body is ``conv((F-G) ∪ DF ∪ (G-F))`` at
    heights 2, 0, -2; compare every sampled slice with that description."""
    tol = TOL.geom if tol is None else tol
    DF, DG = difference_body(Kp.F), difference_body(Kp.G)
    if not same_vertex_set(DF, DG):
        raise HypothesisViolated("the faces do not have equal difference bodies")
    FG = minkowski_sum(Kp.F, -Kp.G)
    GF = -FG
    taus = np.linspace(-2, 2, 41)[1:-1] if taus is None else taus
    for tau in taus:
        direct = dk_slice(Kp, tau)
        if tau >= 0:
            model = _combo([(tau / 2, FG), (1 - tau / 2, DF)], canonical=True)
        else:
            model = _combo([(-tau / 2, GF), (1 + tau / 2, DF)], canonical=True)
        if hausdorff(direct, model) > tol:
            return False
    return True


def sample_in_dk(Kp: Prismatoid, rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
    """``n`` points ``(v_x, v_y, s)`` uniform in height, uniform within each DK slice.

    ``margin`` keeps points that far inside the slice boundary.
    """
    out = []
    while len(out) < n:
        s = rng.uniform(-2 + 1e-6, 2 - 1e-6)
        D = dk_slice(Kp, s)
        lo, hi = D.vertices.min(axis=0), D.vertices.max(axis=0)
        for _ in range(100):
            p = rng.uniform(lo, hi)
            if D.signed_distance(p) <= -margin:
                out.append([p[0], p[1], s])
                break
    return np.array(out)


# --------------------------------------------------------- the symmetric pair

SCALENE = np.array([[0.0, 0.0], [0.9, 0.15], [0.25, 0.6]])


def build_symmetric_pair(L=None) -> tuple[Prismatoid, Prismatoid]:
    """An origin-symmetric prismatoid and a non-translate with the same width
    covariogram.

    ``H'`` is a triangle and ``H = DH'/2``; the faces are ``H ± L`` and
    ``H' ± L`` for a scalene triangle ``L``.
    """
    Hp = Polygon([[0, 0], [1, 0], [0, 1]])
    H = _vertex_sum(Hp, -Hp).scale(0.5)
    L = Polygon(SCALENE if L is None else L)
    Kp = Prismatoid(_vertex_sum(H, L), _vertex_sum(H, -L))
    Kq = Prismatoid(_vertex_sum(Hp, L), _vertex_sum(Hp, -L))
    return Kp, Kq


def _vertex_sum(P: Polygon, Q: Polygon) -> Polygon:
    """``P ⊕ Q`` as the hull of pairwise vertex sums: every vertex is one
    rounded addition, so ``-(P ⊕ Q)`` and ``(-P) ⊕ (-Q)`` agree bitwise."""
    return Polygon.from_points((P.vertices[:, None] + Q.vertices[None]).reshape(-1, 2))


def is_origin_symmetric(Kp: Prismatoid) -> bool:
    """``G = -F`` exactly (bitwise vertex-set equality)."""
    return same_vertex_set(Kp.G, -Kp.F, tol=0.0)


def is_translate(P: Polygon, Q: Polygon) -> bool:
    return same_up_to_translation(P, Q)


def translate_distance(P: Polygon, Q: Polygon) -> float:
    """Hausdorff distance after moving both centroids to the origin."""
    return hausdorff(P.translate(-P.centroid), Q.translate(-Q.centroid))
