"""The acceptance suite: one function per criterion, each returning a
``CriterionResult``.  Used by ``valgram check`` and by the test-suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .counterexamples import (
    Interval,
    build_symmetric_pair,
    dk_decomposition_check,
    is_origin_symmetric,
    is_translate,
    prism_surface_cov,
    prismatoid_width_cov,
    sample_in_dk,
    translate_distance,
)
from .covariogram import (
    core,
    core_criterion_values,
    cov_at,
    cov_values,
    covariogram,
    integral_identity_check,
    radial_derivative,
)
from .determination import _volume_from_ratio, recover_scale, symmetry_test_and_reconstruct
from .geometry import (
    Polygon,
    difference_body,
    distance_to_polygon,
    random_polygon,
    regular_polygon,
    unit,
    unit_square,
)
from .stochastic import KINDS, chord_cdf_analytic, sigma_xz_histograms, simulate_chords
from .valuations import DiskBall, PolygonBall, StripBall, Valuation


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    metric: float
    threshold: float
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] criterion {self.number:2d} {self.name}: "
            f"metric={self.metric:.3e} threshold={self.threshold:.3e} ({self.seconds:.1f}s)"
        )

    def to_json(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "metric": self.metric,
            "threshold": self.threshold,
            "seconds": self.seconds,
            "detail": self.detail,
        }


def _timed(fn):
    def run(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _bodies(rng: np.random.Generator, k: int) -> list[Polygon]:
    return [random_polygon(rng, int(rng.integers(3, 10))) for _ in range(k)]


def _interior_points(D: Polygon, rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
    lo, hi = D.vertices.min(axis=0), D.vertices.max(axis=0)
    out = np.zeros((0, 2))
    while len(out) < n:
        c = rng.uniform(lo, hi, (4 * n, 2))
        c = c[(D.signed_distance(c) < -margin) & (np.hypot(c[:, 0], c[:, 1]) > 1e-6)]
        out = np.concatenate([out, c])
    return out[:n]


SYMMETRIC_HEXAGON = Polygon([[1.0, 0.0], [0.6, 0.8], [-0.5, 0.9], [-1.0, 0.0], [-0.6, -0.8], [0.5, -0.9]])
SCALENE_TRIANGLE = Polygon([[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]])


# ---------------------------------------------------------------- 1


@_timed
def closed_form_square(seed: int = 0) -> CriterionResult:
    """Volume, perimeter and width covariograms of the unit square on a 201 x 201 grid."""
    K = unit_square()
    s = np.linspace(-1.0, 1.0, 201)
    X, Y = np.meshgrid(s, s)
    xs = np.stack([X.ravel(), Y.ravel()], axis=1)
    ax, ay = np.abs(xs[:, 0]), np.abs(xs[:, 1])
    err = {
        "vol": np.abs(cov_values(K, Valuation.volume(), xs) - np.clip(1 - ax, 0, None) * np.clip(1 - ay, 0, None)).max(),
        "per": np.abs(cov_values(K, Valuation.perimeter(), xs) - 2 * np.clip(2 - ax - ay, 0, None)).max(),
        "width": np.abs(cov_values(K, Valuation.width([0, 1]), xs) - np.clip(1 - ay, 0, None)).max(),
    }
    m = float(max(err.values()))
    return CriterionResult(1, "closed-form covariograms of the square", m < 1e-12, m, 1e-12, detail={k: float(v) for k, v in err.items()})


# ---------------------------------------------------------------- 2


def integral_valuations():
    return {
        "vol": Valuation.volume(),
        "per": Valuation.perimeter(),
        "mixed": Valuation(PolygonBall(regular_polygon(6, 1.3)), alpha=0.7, scale=1.0),
    }


@_timed
def integral_identity(seed: int = 0) -> CriterionResult:
    """Grid integral of g against ``vol(K)(2 per_B(K) + alpha vol(K))``."""
    rng = np.random.default_rng(seed)
    worst, rows = 0.0, []
    for K in _bodies(rng, 5):
        D = difference_body(K)
        v = D.vertices
        diam = float(np.max(np.hypot(*(v[:, None] - v[None]).transpose(2, 0, 1))))
        for name, phi in integral_valuations().items():
            num, ana = integral_identity_check(K, phi, diam / 400)
            rel = abs(num - ana) / ana
            worst = max(worst, rel)
            rows.append({"valuation": name, "numeric": num, "analytic": ana, "rel": rel})
    return CriterionResult(2, "integral identity", worst < 5e-3, worst, 5e-3, detail={"cases": rows})


# ---------------------------------------------------------------- 3


def derivative_families(rng: np.random.Generator):
    return {
        "vol": lambda: Valuation.volume(),
        "euclidean per": lambda: Valuation.perimeter(),
        "strip per": lambda: Valuation(StripBall(unit(rng.normal(size=2)), rng.uniform(0.5, 2.0))),
        "mixed": lambda: Valuation(PolygonBall(regular_polygon(4, 1.0, 0.3)), alpha=rng.uniform(0.2, 2.0)),
    }


@_timed
def derivative_witness(seed: int = 0, pairs: int = 100, h: float = 1e-5) -> CriterionResult:
    """Analytic left radial derivative against a backward difference."""
    rng = np.random.default_rng(seed)
    worst, per_family = 0.0, {}
    for name, make in derivative_families(rng).items():
        fam = 0.0
        for _ in range(pairs):
            K = random_polygon(rng, int(rng.integers(3, 10)))
            phi = make()
            x = _interior_points(difference_body(K), rng, 1)[0]
            a = radial_derivative(K, phi, x)
            fd = (cov_at(K, phi, (1 - h) * x) - cov_at(K, phi, x)) / h
            fam = max(fam, abs(a - fd) / (1 + abs(a)))
        per_family[name] = fam
        worst = max(worst, fam)
    return CriterionResult(3, "radial derivative witness", worst < 1e-4, worst, 1e-4, detail=per_family)


# ---------------------------------------------------------------- 4


def _core_distance(C, x) -> float:
    if isinstance(C, Polygon):
        sd = float(C.signed_distance(x))
        return -sd if sd < 0 else distance_to_polygon(x, C)
    return distance_to_polygon(x, C)


@_timed
def core_criterion(seed: int = 0, points: int = 1000) -> CriterionResult:
    """Value identity of the width covariogram versus membership in the core."""
    rng = np.random.default_rng(seed)
    mismatches, used = 0, 0
    for K in _bodies(rng, 5):
        z = unit(rng.normal(size=2))
        D = difference_body(K)
        C = core(K, z)
        lo, hi = D.vertices.min(axis=0), D.vertices.max(axis=0)
        m = 32
        while True:
            gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], m), np.linspace(lo[1], hi[1], m))
            grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
            grid = grid[D.signed_distance(grid) <= 0]
            if len(grid) >= points:
                break
            m += 4
        grid = grid[np.linspace(0, len(grid) - 1, points).astype(int)]
        dist = np.array([_core_distance(C, x) for x in grid])
        inside = np.array([C is not None and (isinstance(C, Polygon) and C.signed_distance(x) <= 0) for x in grid])
        keep = dist >= 1e-6
        ident = core_criterion_values(K, z, grid)
        mismatches += int(np.sum(ident[keep] != inside[keep]))
        used += int(keep.sum())
    return CriterionResult(
        4, "width core criterion", mismatches == 0, float(mismatches), 0.0, detail={"points_compared": used}
    )


# ---------------------------------------------------------------- 5


def symmetry_valuations():
    return {
        "euclidean per + vol": Valuation(DiskBall(), alpha=1.0),
        "hexagonal per + 0.5 vol": Valuation(PolygonBall(regular_polygon(6, 1.0)), alpha=0.5, scale=2.0),
    }


@_timed
def symmetry_pipeline(seed: int = 0) -> CriterionResult:
    """Central symmetry detection and reconstruction from the covariogram."""
    T = Polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    sym = {
        "square": unit_square(),
        "symmetric hexagon": SYMMETRIC_HEXAGON.translate([0.3, -0.2]),
        "half difference body of a triangle": difference_body(T).scale(0.5).translate([0.1, 0.4]),
    }
    ok, worst_h, rows = True, 0.0, []
    for pname, phi in symmetry_valuations().items():
        for name, K in sym.items():
            D = difference_body(K)
            ver = symmetry_test_and_reconstruct(covariogram(K, phi), phi, D)
            hd = math.inf if ver.reconstructed is None else translate_distance(ver.reconstructed, K)
            worst_h = max(worst_h, hd)
            good = ver.symmetric and hd < 1e-6
            ok &= good
            rows.append({"body": name, "valuation": pname, "symmetric": ver.symmetric, "hausdorff": hd})
        ver = symmetry_test_and_reconstruct(covariogram(SCALENE_TRIANGLE, phi), phi, difference_body(SCALENE_TRIANGLE))
        ratio = ver.vol_halfDK / ver.vol_K
        good = (not ver.symmetric) and abs(ratio - 1.5) < 1e-9
        ok &= good
        rows.append({"body": "triangle", "valuation": pname, "symmetric": ver.symmetric, "ratio": ratio})
    return CriterionResult(5, "central symmetry pipeline", ok, worst_h, 1e-6, detail={"cases": rows})


# ---------------------------------------------------------------- 6


@_timed
def scale_recovery(seed: int = 0) -> CriterionResult:
    """Recover the factor beta of a scaled covariogram."""
    K = unit_square()
    phi = Valuation(DiskBall(), alpha=1.0)
    g = covariogram(K, phi)
    D = difference_body(K)
    hand = _volume_from_ratio(9.0 / 5.0, 4.0, 1.0)
    worst, rows = abs(hand - 1.0), {"hand_check_root": hand}
    for beta in (1e-3, 1.0, 3.7, 1e3):
        b, _, _ = recover_scale(lambda x, beta=beta: beta * g(x), phi, D)
        rel = abs(b - beta) / beta
        rows[f"beta={beta:g}"] = b
        worst = max(worst, rel)
    return CriterionResult(6, "scale recovery", worst < 1e-5, worst, 1e-5, detail=rows)


# ---------------------------------------------------------------- 7

PRISM_BASES = {
    "triangle": Polygon([[0.0, 0.0], [1.0, 0.0], [0.2, 0.7]]),
    "quadrilateral": Polygon([[0.0, 0.0], [1.2, 0.1], [0.9, 0.8], [0.1, 0.5]]),
    "pentagon": Polygon([[0.0, 0.0], [1.0, -0.2], [1.4, 0.5], [0.6, 1.0], [-0.2, 0.6]]),
}


@_timed
def prism_reflection(seed: int = 0, probes: int = 100) -> CriterionResult:
    """Surface-area covariograms of ``I x H`` and ``I x (-H)`` coincide."""
    rng = np.random.default_rng(seed)
    I = Interval(0.0, 1.0)
    worst, nonzero = 0.0, 0
    for H in PRISM_BASES.values():
        D = difference_body(H)
        lo, hi = D.vertices.min(axis=0), D.vertices.max(axis=0)
        for _ in range(probes):
            x = rng.uniform(-1.1, 1.1)
            y = rng.uniform(lo, hi)
            a = prism_surface_cov(I, H, x, y)
            b = prism_surface_cov(I, -H, x, y)
            worst = max(worst, abs(a - b))
            nonzero += a > 0
    return CriterionResult(7, "prism reflection", worst < 1e-12, worst, 1e-12, detail={"nonzero_probes": int(nonzero)})


# ---------------------------------------------------------------- 8


@_timed
def prismatoid_pair(seed: int = 0, probes: int = 200) -> CriterionResult:
    """The symmetric prismatoid and its non-translate share a width covariogram."""
    rng = np.random.default_rng(seed)
    Kp, Kq = build_symmetric_pair()
    X = sample_in_dk(Kp, rng, probes)
    a = np.array([prismatoid_width_cov(Kp, (x[:2], x[2])) for x in X])
    b = np.array([prismatoid_width_cov(Kq, (x[:2], x[2])) for x in X])
    closed = 2.0 - np.abs(X[:, 2])
    pair_err = float(np.abs(a - b).max())
    closed_err = float(max(np.abs(a - closed).max(), np.abs(b - closed).max()))
    sym = is_origin_symmetric(Kp)
    dist = translate_distance(Kp.F, Kq.F)
    not_translate = (not is_translate(Kp.F, Kq.F)) and dist > 0.05
    decomp = dk_decomposition_check(Kp) and dk_decomposition_check(Kq)
    m = max(pair_err, closed_err)
    ok = m < 1e-6 and sym and not_translate and decomp
    detail = {
        "pair_error": pair_err,
        "closed_form_error": closed_err,
        "origin_symmetric": sym,
        "face_distance_after_centring": dist,
        "not_a_translate": not_translate,
        "difference_body_decomposition": decomp,
    }
    return CriterionResult(8, "prismatoid pair", ok, m, 1e-6, detail=detail)


# ---------------------------------------------------------------- 9

CHORD_BODIES = {
    "square": unit_square(),
    "triangle": SCALENE_TRIANGLE,
    "hexagon": regular_polygon(6),
}
CHORD_DIRECTIONS = [(0.0, 1.0), (1.0, 0.0), (0.6, 0.8), (0.8, -0.6)]


@_timed
def chord_laws(seed: int = 0, n: int = 100_000) -> CriterionResult:
    """Simulated chord lengths against the covariogram-derived laws."""
    B = DiskBall()
    bound = 1.63 / math.sqrt(n) + 0.002
    worst, rows, k = 0.0, [], 0
    for bname, K in CHORD_BODIES.items():
        for u in CHORD_DIRECTIONS:
            for kind in KINDS:
                e = simulate_chords(K, B, u, kind, seed * 1000 + k, n)
                k += 1
                d = e.ks(lambda r: chord_cdf_analytic(K, B, u, kind, r))
                worst = max(worst, d)
                rows.append({"body": bname, "u": list(u), "kind": kind, "ks": d})
    return CriterionResult(9, "chord laws", worst < bound, worst, bound, detail={"cases": rows})


# ---------------------------------------------------------------- 10


@_timed
def sigma_density(seed: int = 0, n: int = 1_000_000, bins: int = 50) -> CriterionResult:
    """Histogram of ``Σ (X - Z)`` against ``g_phi / (2 c vol K)``."""
    K = unit_square()
    errs, detail = {}, {}
    for b2 in (0.0, 1.0):
        res = sigma_xz_histograms(K, DiskBall(), 1.0, b2, seed + int(b2), n, bins)
        errs[b2] = res.l1_error
        detail[f"beta2={b2:g}"] = {"l1": res.l1_error, "tv": res.tv_error, "l1_noise_floor": res.l1_noise_floor}
    m = max(errs.values())
    return CriterionResult(10, "sigma(X - Z) density", m < 0.02, m, 0.02, detail=detail)


# ---------------------------------------------------------------- 11


@_timed
def concavity(seed: int = 0, triples: int = 10_000) -> CriterionResult:
    """Midpoint concavity of ``g_per`` and ``sqrt(g_vol)`` on DK."""
    rng = np.random.default_rng(seed)
    per, vol = Valuation.perimeter(), Valuation.volume()
    worst = math.inf
    for K in _bodies(rng, 5):
        D = difference_body(K)
        x = _interior_points(D, rng, triples)
        y = _interior_points(D, rng, triples)
        mid = 0.5 * (x + y)
        gp = [cov_values(K, per, p) for p in (x, y, mid)]
        gv = [np.sqrt(cov_values(K, vol, p)) for p in (x, y, mid)]
        worst = min(worst, float(np.min(gp[2] - 0.5 * (gp[0] + gp[1]))), float(np.min(gv[2] - 0.5 * (gv[0] + gv[1]))))
    return CriterionResult(11, "concavity", worst >= -1e-9, worst, -1e-9)


CRITERIA = [
    closed_form_square,
    integral_identity,
    derivative_witness,
    core_criterion,
    symmetry_pipeline,
    scale_recovery,
    prism_reflection,
    prismatoid_pair,
    chord_laws,
    sigma_density,
    concavity,
]


def run_all(seed: int = 42, only=None, report=print) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn(seed)
        if report:
            report(res.line())
        out.append(res)
    return out
