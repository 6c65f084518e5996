"""Random points and random chords of a convex polygon, the chord-length
laws predicted by covariograms, and Monte-Carlo comparisons.

Randomness comes from numpy's PCG64 (``numpy.random.default_rng``); a seed
fully determines every stream.  Independent streams are derived with
``SeedSequence.spawn``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import io
from .covariogram import chord_profile, cov_values, parallelogram_spans
from .errors import DegenerateDensity, DegenerateSeminormPerimeter, KindPreconditionViolated
from .geometry import TOL, Polygon, difference_body, face, rot90, unit
from .valuations import FullPlane, SeminormBall, Valuation, per_B

KINDS = ("mu", "nu", "gamma")
MU_NORMALIZER_R = 1e-7
ATOM_SLACK = 1e-9


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def split_seeds(seed: int, k: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


# ----------------------------------------------------------------- points


def _fan(K: Polygon):
    v = K.vertices
    a, b, c = v[0], v[1:-1], v[2:]
    w = 0.5 * ((b[:, 0] - a[0]) * (c[:, 1] - a[1]) - (b[:, 1] - a[1]) * (c[:, 0] - a[0]))
    return a, b, c, w


def sample_uniform(K: Polygon, seed, n: int) -> np.ndarray:
    """``n`` uniform points in K (fan triangulation, square-root barycentrics)."""
    rng = make_rng(seed)
    a, b, c, w = _fan(K)
    k = rng.choice(len(w), size=n, p=w / w.sum())
    r1 = np.sqrt(rng.random(n))[:, None]
    r2 = rng.random(n)[:, None]
    return (1 - r1) * a + r1 * (1 - r2) * b[k] + r1 * r2 * c[k]


def boundary_weights(K: Polygon, B: SeminormBall) -> np.ndarray:
    return np.asarray(B.norm(K.edges), dtype=float)


def sample_boundary(K: Polygon, B: SeminormBall, seed, n: int) -> np.ndarray:
    """``n`` boundary points with density ``len_B / per_B(K)``."""
    w = boundary_weights(K, B)
    if not w.sum() > 0:
        raise DegenerateSeminormPerimeter("per_B(K) vanishes")
    rng = make_rng(seed)
    k = rng.choice(len(w), size=n, p=w / w.sum())
    t = rng.random(n)[:, None]
    return K.vertices[k] + t * K.edges[k]


# ----------------------------------------------------------------- chords


def chord_lengths(K: Polygon, u, pts) -> np.ndarray:
    """Length of ``(p + R u) ∩ K`` for each point ``p``.

    A point on an edge parallel to ``u`` gets that whole edge.
    """
    u = unit(u)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    a = K.normals @ u
    rhs = K.offsets[None, :] - pts @ K.normals.T
    flat = np.abs(a) <= 1e-12
    pos, neg = a > 1e-12, a < -1e-12
    s1 = np.min(rhs[:, pos] / a[pos], axis=1)
    s0 = np.max(rhs[:, neg] / a[neg], axis=1)
    L = np.maximum(s1 - s0, 0.0)
    if np.any(flat):
        tol = TOL.geom * (1.0 + float(np.max(np.abs(K.offsets))))
        L[np.any(rhs[:, flat] < -tol, axis=1)] = 0.0
    return L


def _check_kind(kind: str, K: Polygon, B):
    if kind not in KINDS:
        raise KindPreconditionViolated(f"unknown chord kind {kind!r}")
    if kind == "gamma":
        if B is None or isinstance(B, FullPlane):
            raise KindPreconditionViolated("boundary chords need a bounded or strip seminorm")
        if not per_B(B, K) > 0:
            raise KindPreconditionViolated("per_B(K) vanishes")


@dataclass(frozen=True, eq=False)
class Ecdf:
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.sort(np.asarray(self.samples, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.samples)

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.n

    def merge(self, other: Ecdf) -> Ecdf:
        return Ecdf(np.concatenate([self.samples, other.samples]))

    def ks(self, survival) -> float:
        """Kolmogorov-Smirnov distance to the law with ``P(L >= r) = survival(r)``.

        Atoms are respected: ``F(x) = 1 - S(x + δ)`` and ``F(x-) = 1 - S(x - δ)``
        with a small ``δ`` that absorbs rounding in the samples.
        """
        x = self.samples
        n = self.n
        F = 1.0 - survival(x + ATOM_SLACK)
        F_left = 1.0 - survival(x - ATOM_SLACK)
        i = np.arange(1, n + 1)
        return float(max(np.max(i / n - F), np.max(F_left - (i - 1) / n)))

    def write_csv(self, path, survival=None) -> None:
        x = self.samples
        if survival is None:
            io.write_csv(path, ["r", "ecdf"], zip(x, self.cdf(x)))
        else:
            io.write_csv(path, ["r", "ecdf", "analytic_cdf"], zip(x, self.cdf(x), 1.0 - survival(x + ATOM_SLACK)))


def simulate_chords(K: Polygon, B, u, kind: str, seed, n: int) -> Ecdf:
    """``n`` chord lengths parallel to ``u`` under the chosen randomness."""
    _check_kind(kind, K, B)
    u = unit(u)
    rng = make_rng(seed)
    if kind == "mu":
        nrm = rot90(u)
        t = K.vertices @ nrm
        pts = rng.uniform(t.min(), t.max(), n)[:, None] * nrm
    elif kind == "nu":
        pts = sample_uniform(K, rng, n)
    else:
        pts = sample_boundary(K, B, rng, n)
    return Ecdf(chord_lengths(K, u, pts))


def chord_cdf_analytic(K: Polygon, B, u, kind: str, r):
    """``P(L >= r)`` for chords parallel to ``u``; ``r`` may be an array."""
    _check_kind(kind, K, B)
    u = unit(u)
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    pos = r > 0
    out[~pos] = 1.0
    rp = r[pos]
    if kind == "mu":
        # -d/dr g_vol(ru) is the height of ip(ru)
        norm0 = parallelogram_spans(K, u, [MU_NORMALIZER_R])[0]
        out[pos] = parallelogram_spans(K, u, rp) / norm0
    elif kind == "nu":
        vol = K.area
        g = cov_values(K, Valuation.volume(), rp[:, None] * u)
        out[pos] = (g + rp * parallelogram_spans(K, u, rp)) / vol
    else:
        P = per_B(B, K)
        nu = float(B.norm(u))
        r1, r2 = sorted(face(K, s * rot90(u)).length for s in (1, -1))
        g = cov_values(K, Valuation(B), rp[:, None] * u)
        # faces parallel to u are chords themselves: atoms at their lengths
        hits = (rp <= r1) * float(r1 > TOL.geom) + (rp <= r2) * float(r2 > TOL.geom)
        out[pos] = (g + hits * rp * nu) / P
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def support_radius(K: Polygon, u) -> float:
    """``ρ(DK, u)``: the longest chord of K parallel to ``u``."""
    return float(chord_profile(K, u)[1].max())


# ------------------------------------------------------------ Σ (X - Z)


@dataclass(frozen=True, eq=False)
class DensityComparison:
    edges: np.ndarray
    empirical: np.ndarray  # cell probabilities, [iy, ix]
    analytic: np.ndarray
    n: int

    @property
    def l1_error(self) -> float:
        """``Σ |p̂ - p|``, the L1 distance of the two cell densities."""
        return float(np.abs(self.empirical - self.analytic).sum())

    @property
    def tv_error(self) -> float:
        return 0.5 * self.l1_error

    @property
    def l1_noise_floor(self) -> float:
        """Expected ``l1_error`` of an exact sampler: ``Σ sqrt(2 p (1-p) / (π n))``."""
        p = np.clip(self.analytic, 0.0, 1.0)
        return float(np.sum(np.sqrt(2.0 * p * (1.0 - p) / (np.pi * self.n))))

    def write_csv(self, path) -> None:
        c = 0.5 * (self.edges[1:] + self.edges[:-1])
        X, Y = np.meshgrid(c, c)
        io.write_csv(
            path,
            ["x", "y", "empirical", "analytic"],
            zip(X.ravel(), Y.ravel(), self.empirical.ravel(), self.analytic.ravel()),
        )


def sigma_xz_valuation(B: SeminormBall, beta1: float, beta2: float) -> Valuation:
    """``beta1 per_B + 2 beta2 vol`` as a Valuation."""
    return Valuation(B, alpha=2.0 * beta2 / beta1, scale=beta1)


def sigma_xz_histograms(
    K: Polygon, B: SeminormBall, beta1: float, beta2: float, seed, n: int, bins: int, sub: int = 4
) -> DensityComparison:
    if not beta1 > 0 or beta2 < 0:
        raise DegenerateDensity("need beta1 > 0 and beta2 >= 0")
    pb, vol = per_B(B, K), K.area
    c = beta1 * pb + beta2 * vol
    if not c > 0 or not pb > 0:
        raise DegenerateDensity("the boundary part of Z has no mass")
    rx, rz, rb, ru, rs = split_seeds(int(seed), 5)
    X = sample_uniform(K, rx, n)
    on_bd = rz.random(n) < beta1 * pb / c
    nb = int(on_bd.sum())
    Z = np.empty((n, 2))
    Z[on_bd] = sample_boundary(K, B, rb, nb)
    Z[~on_bd] = sample_uniform(K, ru, n - nb)
    sign = np.where(rs.random(n) < 0.5, -1.0, 1.0)[:, None]
    W = sign * (X - Z)

    ext = float(np.abs(difference_body(K).vertices).max())
    edges = np.linspace(-ext, ext, bins + 1)
    H, _, _ = np.histogram2d(W[:, 1], W[:, 0], bins=[edges, edges])
    emp = H / n

    # analytic cell integrals of g_phi / (2 c vol) by a sub x sub midpoint rule
    phi = sigma_xz_valuation(B, beta1, beta2)
    h = edges[1] - edges[0]
    fine = edges[0] + (np.arange(bins * sub) + 0.5) * h / sub
    FX, FY = np.meshgrid(fine, fine)
    g = cov_values(K, phi, np.stack([FX.ravel(), FY.ravel()], axis=1)).reshape(bins * sub, bins * sub)
    cell = g.reshape(bins, sub, bins, sub).sum(axis=(1, 3)) * (h / sub) ** 2
    ana = cell / (2.0 * c * vol)
    return DensityComparison(edges, emp, ana, n)


def sigma_xz_density_check(K: Polygon, B: SeminormBall, beta1: float, beta2: float, seed, n: int, bins: int) -> float:
    """L1 distance ``Σ |p̂ - p|`` between the histogram of ``Σ (X - Z)`` and
    the cell probabilities of ``g_phi / (2 c vol K)``."""
    return sigma_xz_histograms(K, B, beta1, beta2, seed, n, bins).l1_error
