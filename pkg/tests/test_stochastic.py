import math

import numpy as np
import pytest
from scipy.stats import chisquare

from valgram.covariogram import cov_at, parallelogram_spans, radial_derivative
from valgram.errors import DegenerateDensity, DegenerateSeminormPerimeter, KindPreconditionViolated
from valgram.geometry import Polygon, face, random_polygon, regular_polygon, rot90, support_width, unit
from valgram.stochastic import (
    MU_NORMALIZER_R,
    Ecdf,
    boundary_weights,
    chord_cdf_analytic,
    chord_lengths,
    sample_boundary,
    sample_uniform,
    sigma_xz_density_check,
    sigma_xz_histograms,
    simulate_chords,
    split_seeds,
    support_radius,
)
from valgram.valuations import DiskBall, FullPlane, PolygonBall, StripBall, Valuation

HEX_BALL = PolygonBall(Polygon([[1, 0], [0.5, 0.8], [-0.5, 0.8], [-1, 0], [-0.5, -0.8], [0.5, -0.8]]))
SCALENE = Polygon([[0, 0], [1, 0], [0.3, 0.8]])
BODIES = {"square": Polygon([[0, 0], [1, 0], [1, 1], [0, 1]]), "scalene": SCALENE, "hexagon": regular_polygon(6)}


def ks_bound(n):
    return 1.63 / math.sqrt(n) + 0.002


# ----------------------------------------------------------------- points


def test_uniform_square_mean_and_containment(square):
    n = 100_000
    pts = sample_uniform(square, 1, n)
    assert np.all(square.signed_distance(pts) <= 1e-12)
    se = math.sqrt(1 / 12 / n)
    assert np.all(np.abs(pts.mean(axis=0) - 0.5) < 3 * se)


def test_uniform_triangle_chi_square():
    T = Polygon([[0, 0], [2, 0], [0.5, 1.5]])
    pts = sample_uniform(T, 7, 60_000)
    a, b, c = T.vertices
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    subs = [Polygon([a, ab, ca]), Polygon([ab, b, bc]), Polygon([ca, bc, c]), Polygon([ab, bc, ca])]
    counts = [np.count_nonzero(S.signed_distance(pts) <= 0) for S in subs]
    assert sum(counts) >= len(pts) - 5
    assert chisquare(counts, [len(pts) / 4] * 4).pvalue > 1e-3


def test_boundary_square_euclidean(square):
    n = 80_000
    pts = sample_boundary(square, DiskBall(), 3, n)
    assert np.all(np.abs(square.signed_distance(pts)) < 1e-12)
    k = np.argmin(np.abs(pts @ square.normals.T - square.offsets), axis=1)
    freq = np.bincount(k, minlength=4) / n
    assert np.all(np.abs(freq - 0.25) < 3 * math.sqrt(0.25 * 0.75 / n))


def test_boundary_strip_skips_horizontal_edges(square):
    pts = sample_boundary(square, StripBall([0, 1], 1.0), 3, 20_000)
    on_vertical = np.isclose(pts[:, 0], 0) | np.isclose(pts[:, 0], 1)
    assert np.all(on_vertical)
    assert abs(np.mean(np.isclose(pts[:, 0], 0)) - 0.5) < 0.02


def test_boundary_hexagon_weights():
    H = regular_polygon(6, phase=0.2)
    n = 60_000
    pts = sample_boundary(H, HEX_BALL, 11, n)
    k = np.argmin(np.abs(pts @ H.normals.T - H.offsets), axis=1)
    w = boundary_weights(H, HEX_BALL)
    assert chisquare(np.bincount(k, minlength=6), n * w / w.sum()).pvalue > 1e-3


def test_boundary_needs_perimeter(square):
    with pytest.raises(DegenerateSeminormPerimeter):
        sample_boundary(square, FullPlane(), 0, 10)


def test_split_seeds_independent_and_reproducible():
    a = [g.random(3) for g in split_seeds(5, 3)]
    b = [g.random(3) for g in split_seeds(5, 3)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])


# ----------------------------------------------------------------- chords


def chord_by_bisection(K, u, p):
    """Chord length through p by bisecting membership along both directions."""
    def reach(d):
        lo, hi = 0.0, 10.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if K.signed_distance(p + mid * d) <= 0:
                lo = mid
            else:
                hi = mid
        return lo
    return reach(u) + reach(-u)


def test_chord_lengths_against_bisection(rng):
    K = random_polygon(rng, 7)
    u = unit([0.6, 0.8])
    pts = sample_uniform(K, rng, 50)
    ref = [chord_by_bisection(K, u, p) for p in pts]
    assert np.allclose(chord_lengths(K, u, pts), ref, atol=1e-9)


def test_square_degenerate_laws(square):
    r = np.array([0.2, 0.999, 1.0, 1.001, 1.5])
    for kind in ("mu", "nu"):
        assert np.allclose(chord_cdf_analytic(square, None, [0, 1], kind, r), [1, 1, 1, 0, 0])
        assert np.all(simulate_chords(square, None, [0, 1], kind, 1, 1000).samples == pytest.approx(1.0))
    # gamma with the Euclidean ball: atom of mass 1/2 at r = 1 on the vertical edges
    s = chord_cdf_analytic(square, DiskBall(), [0, 1], "gamma", r)
    g = np.array([cov_at(square, Valuation.perimeter(), [0, ri]) for ri in r])
    assert s[:3] == pytest.approx([1, 1, 1])
    assert s[3:] == pytest.approx(g[3:] / 4)


def test_mu_normalizer_is_width(rng):
    K = random_polygon(rng, 6)
    u = unit([0.3, -0.9])
    assert parallelogram_spans(K, u, [MU_NORMALIZER_R])[0] == pytest.approx(support_width(K, rot90(u))[1], rel=1e-6)
    assert chord_cdf_analytic(K, None, u, "mu", 1e-12) == pytest.approx(1.0, abs=1e-6)


def test_nu_law_two_ways(rng):
    K = random_polygon(rng, 6)
    u = unit([1.0, 0.4])
    rho = support_radius(K, u)
    for r in np.linspace(0.05, 0.95, 9) * rho:
        via_derivative = (cov_at(K, Valuation.volume(), r * u) + radial_derivative(K, Valuation.volume(), r * u)) / K.area
        assert chord_cdf_analytic(K, None, u, "nu", r) == pytest.approx(via_derivative, abs=1e-12)


def test_laws_vanish_beyond_longest_chord(rng):
    K = random_polygon(rng, 5)
    u = unit([0.2, 1.0])
    rho = support_radius(K, u)
    for kind in ("mu", "nu", "gamma"):
        assert chord_cdf_analytic(K, DiskBall(), u, kind, rho * (1 + 1e-9)) == 0
        assert chord_cdf_analytic(K, DiskBall(), u, kind, 0.0) == 1


def test_gamma_atom_sizes():
    K = Polygon([[0, 0], [3, 0], [2, 1], [1, 1]])
    for B in (DiskBall(), HEX_BALL):
        u = np.array([1.0, 0.0])
        P = float(np.sum(B.norm(K.edges)))
        for r1 in (1.0, 3.0):
            d = 1e-7
            jump = chord_cdf_analytic(K, B, u, "gamma", r1 - d) - chord_cdf_analytic(K, B, u, "gamma", r1 + d)
            assert jump == pytest.approx(r1 * float(B.norm(u)) / P, abs=1e-5)
        e = simulate_chords(K, B, u, "gamma", 4, 200_000)
        for r1 in (1.0, 3.0):
            frac = np.mean(np.abs(e.samples - r1) < 1e-9)
            p = r1 * float(B.norm(u)) / P
            assert abs(frac - p) < 4 * math.sqrt(p * (1 - p) / e.n)


def test_kind_preconditions(square):
    with pytest.raises(KindPreconditionViolated):
        simulate_chords(square, FullPlane(), [1, 0], "gamma", 0, 10)
    with pytest.raises(KindPreconditionViolated):
        chord_cdf_analytic(square, None, [1, 0], "lambda", 0.5)


def test_ecdf_ks_with_atoms():
    e = Ecdf([1.0] * 50 + [2.0] * 50)
    S = lambda r: np.where(r <= 1, 1.0, np.where(r <= 2, 0.5, 0.0))  # noqa: E731
    assert e.ks(S) == pytest.approx(0.0, abs=1e-15)
    assert e.merge(e).n == 200


@pytest.mark.parametrize("body", list(BODIES))
@pytest.mark.parametrize("kind", ["mu", "nu", "gamma"])
def test_ks_against_analytic(body, kind):
    K = BODIES[body]
    u = unit([0.6, 0.8])
    n = 100_000
    e = simulate_chords(K, DiskBall(), u, kind, 2024, n)
    assert e.ks(lambda r: chord_cdf_analytic(K, DiskBall(), u, kind, r)) < ks_bound(n)


def test_chords_seed_determinism():
    a = simulate_chords(SCALENE, DiskBall(), [0, 1], "gamma", 99, 5000)
    b = simulate_chords(SCALENE, DiskBall(), [0, 1], "gamma", 99, 5000)
    assert np.array_equal(a.samples, b.samples)


# ------------------------------------------------------------ sigma(X - Z)


def test_sigma_density_square(square):
    res = sigma_xz_histograms(square, DiskBall(), 1.0, 0.0, 3, 1_000_000, 50)
    assert res.analytic.sum() == pytest.approx(1.0, abs=1e-3)
    # an exact sampler sits on the multinomial noise floor
    assert res.l1_error == pytest.approx(res.l1_noise_floor, rel=0.05)
    assert res.tv_error == 0.5 * res.l1_error
    # the symmetrised histogram is even: reflected copies differ by noise only
    emp = res.empirical
    assert np.abs(emp - emp[::-1, ::-1]).sum() < 1.5 * res.l1_noise_floor


def test_sigma_density_mixed(scalene):
    res = sigma_xz_histograms(scalene, HEX_BALL, 1.0, 0.7, 5, 1_000_000, 50)
    assert res.l1_error == pytest.approx(res.l1_noise_floor, rel=0.05)
    assert sigma_xz_density_check(scalene, HEX_BALL, 1.0, 0.7, 5, 1_000_000, 50) == res.l1_error


def test_sigma_density_detects_wrong_law(square):
    # same samples, analytic cells for a different mixture weight
    res = sigma_xz_histograms(square, DiskBall(), 1.0, 0.0, 3, 1_000_000, 50)
    wrong = sigma_xz_histograms(square, DiskBall(), 1.0, 3.0, 3, 1_000_000, 50)
    mixed = np.abs(res.empirical - wrong.analytic).sum()
    assert mixed > 2 * res.l1_noise_floor


def test_sigma_density_preconditions(square):
    with pytest.raises(DegenerateDensity):
        sigma_xz_histograms(square, DiskBall(), 0.0, 1.0, 0, 10, 5)
