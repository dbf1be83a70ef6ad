"""Beam pointing: the smallest spherical cap enclosing a set of directions."""
from __future__ import annotations

import math

import numpy as np

_SLACK = 1e-12  # radians


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross carries heavy per-call overhead for tiny inputs
    return np.stack([
        a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
        a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
        a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
    ], axis=-1)


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    ax, ay, az = a.tolist()
    bx, by, bz = b.tolist()
    cx, cy, cz = ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx
    return math.atan2(math.sqrt(cx * cx + cy * cy + cz * cz), ax * bx + ay * by + az * bz)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _cap2(a, b):
    c = _unit(a + b)
    return c, max(_angle(c, a), _angle(c, b))


def _cap3(a, b, c):
    nrm = _cross(b - a, c - a)
    if np.linalg.norm(nrm) < 1e-300:
        # degenerate triple; fall back to the widest pair
        pairs = [_cap2(a, b), _cap2(a, c), _cap2(b, c)]
        return max(pairs, key=lambda cr: cr[1])
    ctr = _unit(nrm)
    if np.dot(ctr, a) < 0:
        ctr = -ctr
    return ctr, max(_angle(ctr, a), _angle(ctr, b), _angle(ctr, c))


def enclosing_cap(dirs: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimum enclosing cap (center, angular radius in radians) of unit vectors.

    Incremental Welzl-style construction; exact for point sets inside an open
    hemisphere, which always holds for directions to users seen by one beam.
    """
    pts = np.asarray(dirs, dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise ValueError("cannot point a beam at an empty user set")
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if pts.shape[0] == 1:
        return pts[0], 0.0
    if pts.shape[0] == 2:
        return _cap2(pts[0], pts[1])
    # fixed pseudo-random order keeps the expected cost linear and the output reproducible
    order = np.random.default_rng(0x5EED).permutation(pts.shape[0])
    p = pts[order]

    def first_outside(c, r, lo, hi):
        if lo >= hi:
            return None
        seg = p[lo:hi]
        ang = np.arctan2(np.linalg.norm(_cross(seg, c), axis=1), seg @ c)
        out = np.flatnonzero(ang > r + _SLACK)
        return lo + int(out[0]) if out.size else None

    # same visiting order as the textbook triple loop, skipping covered points in bulk
    m = len(p)
    c, r = p[0], 0.0
    i = first_outside(c, r, 1, m)
    while i is not None:
        c, r = p[i], 0.0
        j = first_outside(c, r, 0, i)
        while j is not None:
            c, r = _cap2(p[i], p[j])
            k = first_outside(c, r, 0, j)
            while k is not None:
                c, r = _cap3(p[i], p[j], p[k])
                k = first_outside(c, r, k + 1, j)
            j = first_outside(c, r, j + 1, i)
        i = first_outside(c, r, i + 1, m)
    return c, r


def boresight(dirs: np.ndarray) -> np.ndarray:
    """Unit pointing vector minimizing the largest off-boresight angle."""
    return enclosing_cap(dirs)[0]
