"""Vectorised clipping of many convex rings against one fixed polygon.

Rings are stored padded: ``pts`` has shape ``(N, C, 2)`` and ``cnt[i]``
says how many leading entries of row ``i`` are live.  Each half-plane is
applied to all rings at once (Sutherland-Hodgman).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 20000


def thread_count() -> int:
    try:
        n = int(os.environ.get("VALGRAM_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def _next_index(C: int, cnt: np.ndarray) -> np.ndarray:
    j = np.arange(C)[None, :] + 1
    return np.where(j < cnt[:, None], j, 0)


def clip_rings(pts: np.ndarray, cnt: np.ndarray, normals, offsets, tol: float = 1e-12):
    """Clip every ring by ``{y : <y, u_i> <= h_i}``; returns new ``(pts, cnt)``."""
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    slack = tol * (1.0 + float(np.max(np.abs(offsets))))
    N = len(pts)
    for u, h in zip(normals, offsets):
        C = pts.shape[1]
        live = np.arange(C)[None, :] < cnt[:, None]
        nxt = _next_index(C, cnt)
        s = pts @ u - h
        s_n = np.take_along_axis(s, nxt, axis=1)
        inside = s <= slack
        emit = inside & live
        crs = (inside != (s_n <= slack)) & live
        k = emit.astype(np.int64) + crs
        pos = np.cumsum(k, axis=1) - k
        new_cnt = k.sum(axis=1)
        cap = max(C, int(new_cnt.max(initial=0)))
        out = np.zeros((N, cap, 2))
        r, c = np.nonzero(emit)
        out[r, pos[r, c]] = pts[r, c]
        r, c = np.nonzero(crs)
        a = pts[r, c]
        b = pts[r, nxt[r, c]]
        lam = s[r, c] / (s[r, c] - s_n[r, c])
        out[r, pos[r, c] + emit[r, c]] = a + lam[:, None] * (b - a)
        pts, cnt = out, new_cnt
    return pts, cnt


def ring_measures(pts: np.ndarray, cnt: np.ndarray, norm):
    """Shoelace area and ``sum norm(edge)`` of padded rings.

    A ring collapsed onto a segment gets boundary length twice its
    length, matching the perimeter convention for segments.
    """
    C = pts.shape[1]
    live = np.arange(C)[None, :] < cnt[:, None]
    nxt = _next_index(C, cnt)
    q = np.take_along_axis(pts, nxt[..., None], axis=1)
    cr = pts[..., 0] * q[..., 1] - pts[..., 1] * q[..., 0]
    area = 0.5 * np.where(live, cr, 0.0).sum(axis=1)
    if norm is None:
        return area, np.zeros_like(area)
    bl = np.where(live, norm(q - pts), 0.0).sum(axis=1)
    return area, bl


def map_chunks(fn, xs: np.ndarray, chunk: int = CHUNK) -> np.ndarray:
    """Apply ``fn`` to row chunks of ``xs`` and concatenate the results."""
    parts = [xs[i : i + chunk] for i in range(0, len(xs), chunk)]
    if not parts:
        return np.zeros(0)
    n = thread_count()
    if n > 1 and len(parts) > 1:
        with ThreadPoolExecutor(n) as ex:
            out = list(ex.map(fn, parts))
    else:
        out = [fn(p) for p in parts]
    return np.concatenate(out)
