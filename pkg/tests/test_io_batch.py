import numpy as np
import pytest

from valgram import io
from valgram.batch import clip_rings, map_chunks, ring_measures, thread_count
from valgram.covariogram import cov_values
from valgram.geometry import Polygon, Segment, intersect, random_polygon
from valgram.valuations import DiskBall, Valuation


def test_json_round_trip_is_bit_exact(tmp_path, rng):
    P = random_polygon(rng, 7)
    io.write_json(tmp_path / "p.json", io.polygon_to_json(P))
    Q = io.polygon_from_json(io.read_json(tmp_path / "p.json"))
    assert np.array_equal(P.vertices, Q.vertices)


def test_dumps_formats():
    text = io.dumps({"a": 0.1, "b": [1, 2.5], "c": None, "d": True})
    assert "0.10000000000000001" in text and "[1, 2.5]" in text
    assert io.dumps(float("nan")).strip() == "NaN"


def test_body_to_json():
    assert io.body_to_json(None) == {"type": "empty"}
    s = io.body_to_json(Segment(np.array([0.0, 0]), np.array([1.0, 0])))
    assert s["type"] == "segment"


def test_csv_round_trip(tmp_path, rng):
    x = rng.normal(size=(20, 3))
    io.write_csv(tmp_path / "a.csv", ["x", "y", "z"], x)
    header, y = io.read_csv(tmp_path / "a.csv")
    assert header == ["x", "y", "z"] and np.array_equal(x, y)


def test_clip_rings_match_scalar_intersection(rng):
    K = random_polygon(rng, 6)
    Q = random_polygon(rng, 5)
    shifts = rng.uniform(-1.5, 1.5, size=(200, 2))
    pts = np.zeros((len(shifts), len(Q), 2))
    pts[:] = Q.vertices
    pts += shifts[:, None]
    p, c = clip_rings(pts, np.full(len(shifts), len(Q)), K.normals, K.offsets)
    area, bl = ring_measures(p, c, DiskBall().norm)
    for i, t in enumerate(shifts):
        R = intersect(K, Q.translate(t))
        ref = R.area if isinstance(R, Polygon) else 0.0
        assert area[i] == pytest.approx(ref, abs=1e-12)
        ref_bl = 0.0 if R is None else (2 * R.length if isinstance(R, Segment) else np.hypot(*R.edges.T).sum())
        assert bl[i] == pytest.approx(ref_bl, abs=1e-12)


def test_threads_do_not_change_results(monkeypatch, rng):
    K = random_polygon(rng, 6)
    xs = rng.uniform(-2, 2, size=(45_000, 2))
    phi = Valuation.perimeter(alpha=0.5)
    monkeypatch.setenv("VALGRAM_THREADS", "1")
    a = cov_values(K, phi, xs)
    monkeypatch.setenv("VALGRAM_THREADS", "4")
    b = cov_values(K, phi, xs)
    assert np.array_equal(a, b)
    monkeypatch.setenv("VALGRAM_THREADS", "zzz")
    assert thread_count() == 1


def test_map_chunks_preserves_order():
    xs = np.arange(50_001, dtype=float)
    assert np.array_equal(map_chunks(lambda c: 2 * c, xs, chunk=1000), 2 * xs)
