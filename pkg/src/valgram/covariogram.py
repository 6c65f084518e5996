"""phi-covariograms ``g(x) = phi(K ∩ (K + x))`` of convex polygons, their
radial derivatives via inscribed parallelograms and caps, and the width core."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .batch import clip_rings, map_chunks, ring_measures
from .errors import OutsideDifferenceBodyInterior
from .geometry import (
    TOL,
    Polygon,
    Segment,
    add_segment,
    area,
    cross,
    difference_body,
    distance_to_polygon,
    face,
    intersect,
    rot90,
    support_width,
    unit,
    vec,
)
from .valuations import FullPlane, Valuation, eval_valuation, len_B, per_B


# ---------------------------------------------------------------- values


def cov_at(K: Polygon, phi: Valuation, x) -> float:
    """Single value, through an explicit intersection."""
    return eval_valuation(phi, intersect(K, K.translate(vec(x))))


def cov_values(K: Polygon, phi: Valuation, xs) -> np.ndarray:
    """Vectorised ``g(x)`` for an ``(N, 2)`` array of shifts."""
    xs = np.asarray(xs, dtype=float).reshape(-1, 2)
    v = K.vertices
    n, m = len(v), len(K.normals)
    norm = None if isinstance(phi.ball, FullPlane) else phi.ball.norm

    def chunk(x):
        pts = np.zeros((len(x), n + m + 2, 2))
        pts[:, :n] = v[None] + x[:, None]
        cnt = np.full(len(x), n)
        pts, cnt = clip_rings(pts, cnt, K.normals, K.offsets)
        a, bl = ring_measures(pts, cnt, norm)
        return phi.scale * (bl + phi.alpha * np.abs(a))

    return map_chunks(chunk, xs)


def covariogram(K: Polygon, phi: Valuation):
    """``g`` as a callable accepting one point or an ``(N, 2)`` array."""

    def g(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(cov_values(K, phi, x[None])[0])
        return cov_values(K, phi, x)

    return g


# ---------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class CovGrid:
    """Values on nodes ``origin + (i, j) * step``; ``values[j, i]`` (row-major in y)."""

    origin: np.ndarray
    step: float
    nx: int
    ny: int
    values: np.ndarray
    phi: Valuation

    def axes(self):
        return (
            self.origin[0] + self.step * np.arange(self.nx),
            self.origin[1] + self.step * np.arange(self.ny),
        )

    def nodes(self) -> np.ndarray:
        xs, ys = self.axes()
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def integral(self) -> float:
        """Midpoint rule: every node stands for a ``step x step`` cell."""
        return float(self.values.sum()) * self.step**2

    def argmax_node(self) -> np.ndarray:
        j, i = np.unravel_index(np.argmax(self.values), self.values.shape)
        return self.origin + self.step * np.array([i, j], dtype=float)

    def sidecar(self) -> dict:
        return {
            "origin": self.origin.tolist(),
            "step": self.step,
            "nx": self.nx,
            "ny": self.ny,
            "phi": self.phi.to_json(),
        }

    def write(self, csv_path) -> Path:
        """Write ``x,y,value`` CSV plus ``<name>.json`` sidecar; returns the sidecar path."""
        csv_path = Path(csv_path)
        pts = self.nodes()
        io.write_csv(csv_path, ["x", "y", "value"], zip(pts[:, 0], pts[:, 1], self.values.ravel()))
        side = csv_path.with_suffix(".json")
        io.write_json(side, self.sidecar())
        return side

    @classmethod
    def read(cls, csv_path) -> CovGrid:
        csv_path = Path(csv_path)
        meta = io.read_json(csv_path.with_suffix(".json"))
        _, data = io.read_csv(csv_path)
        nx, ny = int(meta["nx"]), int(meta["ny"])
        return cls(
            vec(meta["origin"]),
            float(meta["step"]),
            nx,
            ny,
            data[:, 2].reshape(ny, nx),
            Valuation.from_json(meta["phi"]),
        )


def cov_grid(K: Polygon, phi: Valuation, step: float) -> CovGrid:
    """Grid over the bounding box of DK plus one step, with the origin as a node."""
    if not step > 0:
        raise ValueError("step must be positive")
    ext = np.abs(difference_body(K).vertices).max(axis=0)
    kx, ky = (int(math.ceil(e / step - 1e-12)) + 1 for e in ext)
    origin = -step * np.array([kx, ky], dtype=float)
    nx, ny = 2 * kx + 1, 2 * ky + 1
    xs = step * np.arange(-kx, kx + 1)
    ys = step * np.arange(-ky, ky + 1)
    X, Y = np.meshgrid(xs, ys)
    vals = cov_values(K, phi, np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(ny, nx)
    return CovGrid(origin, float(step), nx, ny, vals, phi)


def integral_identity_check(K: Polygon, phi: Valuation, step: float) -> tuple[float, float]:
    """(grid integral of g, ``scale vol(K) (2 per_B(K) + alpha vol(K))``)."""
    numeric = cov_grid(K, phi, step).integral()
    v = area(K)
    analytic = phi.scale * v * (2.0 * per_B(phi.ball, K) + phi.alpha * v)
    return numeric, analytic


# ----------------------------------------------- inscribed parallelogram


@dataclass(frozen=True, eq=False)
class InscribedParallelogram:
    """Counterclockwise ``p1..p4`` on bd K with ``p1 - p2 = p4 - p3 = x``."""

    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3, self.p4])

    @property
    def area(self) -> float:
        p = self.points
        return 0.5 * float(np.sum(cross(p, np.roll(p, -1, axis=0))))


@dataclass(frozen=True, eq=False)
class Cap:
    chain: np.ndarray  # [p1, p12, p2]

    def length(self, B) -> float:
        return len_B(B, self.chain)


def _chord(K: Polygon, d: np.ndarray, nrm: np.ndarray, t: float):
    """Parameter interval ``[s0, s1]`` of ``{t nrm + s d} ∩ K`` (None if empty)."""
    a = K.normals @ d
    rhs = K.offsets - t * (K.normals @ nrm)
    tol = TOL.geom
    flat = np.abs(a) <= 1e-14
    if np.any(rhs[flat] < -tol):
        return None
    with np.errstate(divide="ignore"):
        r = rhs / np.where(flat, 1.0, a)
    s1 = np.min(r[a > 1e-14], initial=np.inf)
    s0 = np.max(r[a < -1e-14], initial=-np.inf)
    if s1 < s0 - tol:
        return None
    return s0, max(s0, s1)


def chord_profile(K: Polygon, d):
    """Breakpoints ``t`` (offsets along R d) and chord lengths ``l(t)`` there."""
    d = unit(d)
    nrm = rot90(d)
    ts = np.sort(K.vertices @ nrm)
    keep = np.concatenate([[True], np.diff(ts) > TOL.geom])
    ts = ts[keep]
    ls = []
    for t in ts:
        c = _chord(K, d, nrm, t)
        ls.append(0.0 if c is None else c[1] - c[0])
    return ts, np.array(ls)


def _root(ts, ls, L, rng):
    prev = None
    for i in rng:
        if ls[i] >= L:
            if prev is None:
                return ts[i]
            j = prev
            return ts[j] + (L - ls[j]) / (ls[i] - ls[j]) * (ts[i] - ts[j])
        prev = i
    raise AssertionError("chord length never reaches target")


def inscribed_parallelogram(K: Polygon, x) -> InscribedParallelogram:
    """Both chords of K parallel to ``x`` with length ``|x|``.

    When a chord root is an edge longer than ``|x|`` the centred sub-chord is
    used, so ``ip(x)`` and ``ip(-x)`` coincide.
    """
    x = vec(x)
    L = float(np.hypot(*x))
    if L <= TOL.geom:
        raise OutsideDifferenceBodyInterior("x must be nonzero")
    d = x / L
    nrm = rot90(d)
    ts, ls = chord_profile(K, d)
    top = float(ls.max())
    if L >= top - TOL.geom * max(1.0, top):
        raise OutsideDifferenceBodyInterior("x is not interior to the difference body")
    idx = np.flatnonzero(ls >= top - 1e-15 * max(1.0, top))
    t_a = _root(ts, ls, L, range(0, idx[0] + 1))
    t_b = _root(ts, ls, L, range(len(ts) - 1, idx[-1] - 1, -1))

    def sub(t):
        s0, s1 = _chord(K, d, nrm, t)
        mid = 0.5 * (s0 + s1)
        base = t * nrm
        return base + (mid - 0.5 * L) * d, base + (mid + 0.5 * L) * d

    tail_b, head_b = sub(t_b)
    tail_a, head_a = sub(t_a)
    return InscribedParallelogram(head_b, tail_b, tail_a, head_a)


def parallelogram_spans(K: Polygon, d, lengths) -> np.ndarray:
    """Vectorised ``t_b - t_a`` (the height of ``ip(r d)``) for many lengths ``r``.

    Zero beyond the maximal chord length; at that length it is the width of
    the plateau of maximal chords.
    """
    ts, ls = chord_profile(K, d)
    r = np.asarray(lengths, dtype=float)
    top = ls.max()
    idx = np.flatnonzero(ls >= top - 1e-15 * max(1.0, top))
    i0, i1 = idx[0], idx[-1]
    # np.interp clamps below the first breakpoint: an end face longer than r
    t_a = np.interp(r, ls[: i0 + 1], ts[: i0 + 1])
    t_b = np.interp(r, ls[i1:][::-1], ts[i1:][::-1])
    return np.where(r <= top, t_b - t_a, 0.0)


def _locate(K: Polygon, p):
    """(following edge, preceding edge) indices for a boundary point."""
    v = K.vertices
    n = len(v)
    scale = max(1.0, float(np.abs(v).max()))
    dv = np.hypot(*(v - p).T)
    k = int(np.argmin(dv))
    if dv[k] <= TOL.geom * scale:
        return k, (k - 1) % n
    gap = np.abs(K.normals @ p - K.offsets)
    e = K.edges
    lam = np.einsum("ij,ij->i", p - v, e) / np.einsum("ij,ij->i", e, e)
    gap = np.where((lam >= -1e-12) & (lam <= 1 + 1e-12), gap, np.inf)
    k = int(np.argmin(gap))
    return k, k


def _cap_through(K: Polygon, p1, p2) -> Cap:
    e = K.edges
    l1 = e[_locate(K, p1)[0]]
    l2 = e[_locate(K, p2)[1]]
    den = cross(l1, l2)
    if abs(den) <= TOL.ang * np.hypot(*l1) * np.hypot(*l2):
        p12 = 0.5 * (p1 + p2)
    else:
        a = cross(p2 - p1, l2) / den
        p12 = p1 + a * l1
    return Cap(np.array([p1, p12, p2]))


def cap(K: Polygon, x) -> Cap:
    """``[p1, p12] ∪ [p12, p2]``: tangent lines at the arc ends meet at ``p12``."""
    ip = inscribed_parallelogram(K, x)
    return _cap_through(K, ip.p1, ip.p2)


def radial_derivative(K: Polygon, phi: Valuation, x) -> float:
    """``-d/dt g(t x)`` from the left at ``t = 1``."""
    ip = inscribed_parallelogram(K, x)
    c_pos = _cap_through(K, ip.p1, ip.p2)
    c_neg = _cap_through(K, ip.p3, ip.p4)
    val = phi.alpha * ip.area
    if not isinstance(phi.ball, FullPlane):
        val += c_pos.length(phi.ball) + c_neg.length(phi.ball)
    return phi.scale * val


# ---------------------------------------------------------------- core


def core(K: Polygon, z):
    """``(F(K,z) - K) ∩ (K - F(K,-z))`` as a Polygon or a Segment."""
    z = unit(z)
    top = face(K, z)
    bottom = face(K, -z)
    A = add_segment(-K, top)
    B = add_segment(K, -bottom)
    return intersect(A, B)


def in_core(C, x, tol: float = 0.0) -> bool:
    if C is None:
        return False
    if isinstance(C, Segment):
        return distance_to_polygon(x, C) <= tol
    return bool(C.signed_distance(vec(x)) <= tol)


def core_criterion_check(K: Polygon, z, x) -> bool:
    """Does the width covariogram equal ``w(K,z) - <x,z>`` at ``x``?"""
    z = unit(z)
    x = vec(x)
    g = cov_at(K, Valuation.width(z), x)
    w = support_width(K, z)[1]
    return abs(g - (w - float(x @ z))) < TOL.val


def core_criterion_values(K: Polygon, z, xs) -> np.ndarray:
    """Vectorised ``core_criterion_check`` over an ``(N, 2)`` array."""
    z = unit(z)
    xs = np.asarray(xs, dtype=float).reshape(-1, 2)
    g = cov_values(K, Valuation.width(z), xs)
    w = support_width(K, z)[1]
    return np.abs(g - (w - xs @ z)) < TOL.val
