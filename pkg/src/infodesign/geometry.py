"""Planar convex geometry helpers used by the set solvers."""

from __future__ import annotations

import numpy as np


def cross(o, a, b) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def convex_hull(points, tol: float = 1e-12) -> np.ndarray:
    """Counterclockwise hull by Andrew's monotone chain; collinear points dropped."""
    pts = np.unique(np.round(np.asarray(points, dtype=float), 15), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return hull


def is_convex_ccw(poly, tol: float = 1e-9) -> bool:
    poly = np.asarray(poly, dtype=float)
    n = len(poly)
    if n < 3:
        return True
    for i in range(n):
        if cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < -tol:
            return False
    return True


def _point_segment_distances(pts, a, b) -> np.ndarray:
    """Distance from every point in ``pts`` to every segment (a_j, b_j)."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    safe = np.where(denom > 0, denom, 1.0)
    rel = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pij,ij->pi", rel, ab) / safe, 0.0, 1.0)
    t = np.where(denom > 0, t, 0.0)
    diff = rel - t[:, :, None] * ab[None, :, :]
    return np.sqrt(np.einsum("pij,pij->pi", diff, diff))


def distances_to_polyline(pts, poly, closed: bool = False) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    if len(poly) == 1:
        return np.hypot(*(pts - poly[0]).T)
    a = poly if closed else poly[:-1]
    b = np.roll(poly, -1, axis=0) if closed else poly[1:]
    out = np.empty(len(pts))
    step = max(1, 200000 // max(len(a), 1))
    for i in range(0, len(pts), step):
        out[i : i + step] = _point_segment_distances(pts[i : i + step], a, b).min(axis=1)
    return out


def distance_to_polyline(p, poly, closed: bool = False) -> float:
    return float(distances_to_polyline(p, poly, closed)[0])


def distance_outside_polygon(poly, p) -> float:
    """Zero if ``p`` is inside the convex CCW polygon, else distance to it."""
    poly = np.asarray(poly, dtype=float)
    n = len(poly)
    if n >= 3:
        inside = all(cross(poly[i], poly[(i + 1) % n], p) >= -1e-12 for i in range(n))
        if inside:
            return 0.0
    return distance_to_polyline(p, poly, closed=n >= 3)


def hausdorff(a, b, closed_a: bool = False, closed_b: bool = False) -> float:
    """Symmetric Hausdorff distance between two polylines, using vertices of each
    against segments of the other (exact for polylines up to vertex sampling)."""
    d1 = distances_to_polyline(a, b, closed_b).max()
    d2 = distances_to_polyline(b, a, closed_a).max()
    return float(max(d1, d2))


def densify(poly, step: float, closed: bool = False) -> np.ndarray:
    """Insert points along each segment so no gap exceeds ``step``."""
    poly = np.asarray(poly, dtype=float)
    n = len(poly)
    segs = n if closed else n - 1
    out = []
    for i in range(segs):
        a, b = poly[i], poly[(i + 1) % n]
        k = max(1, int(np.ceil(np.hypot(*(b - a)) / step)))
        for t in np.arange(k) / k:
            out.append(a + t * (b - a))
    if not closed:
        out.append(poly[-1])
    return np.array(out)


def clip_halfplane(poly, normal, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to ``normal · x >= offset``."""
    poly = np.asarray(poly, dtype=float)
    normal = np.asarray(normal, dtype=float)
    n = len(poly)
    if n == 0:
        return poly
    vals = poly @ normal - offset
    out = []
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= 0:
            out.append(p)
        if (vp >= 0) != (vq >= 0) and n > 1:
            t = vp / (vp - vq)
            out.append(p + t * (q - p))
    if not out:
        return np.empty((0, 2))
    out = np.array(out)
    keep = [0]
    for i in range(1, len(out)):
        if np.hypot(*(out[i] - out[keep[-1]])) > 1e-14:
            keep.append(i)
    out = out[keep]
    if len(out) > 1 and np.hypot(*(out[0] - out[-1])) <= 1e-14:
        out = out[:-1]
    return out


def distances_outside_polygon(poly, pts) -> np.ndarray:
    """Vectorized :func:`distance_outside_polygon` over an (n, 2) array."""
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n = len(poly)
    d = distances_to_polyline(pts, poly, closed=n >= 3)
    if n >= 3:
        a = poly
        b = np.roll(poly, -1, axis=0)
        cr = (b[None, :, 0] - a[None, :, 0]) * (pts[:, None, 1] - a[None, :, 1]) - (b[None, :, 1] - a[None, :, 1]) * (
            pts[:, None, 0] - a[None, :, 0]
        )
        inside = np.all(cr >= -1e-12, axis=1)
        d = np.where(inside, 0.0, d)
    return d
