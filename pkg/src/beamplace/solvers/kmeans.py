"""Seeded Lloyd's K-Means on 3-D points."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import SolverParams


@dataclass
class KMeansState:
    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    iterations: int = 0
    converged: bool = False
    wcss_history: list[float] = field(default_factory=list)

    @property
    def wcss(self) -> float:
        return self.wcss_history[-1] if self.wcss_history else float("nan")

    def clusters(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == j) for j in range(self.k)]


def _sq_dist_to(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = x - c
    return np.einsum("ij,ij->i", d, d)


def nearest_centroid(x: np.ndarray, c: np.ndarray, chunk: int = 1 << 21) -> np.ndarray:
    """Index of the closest centroid per point; ties resolve to the lowest index."""
    m, k = x.shape[0], c.shape[0]
    out = np.empty(m, dtype=np.int64)
    rows = max(1, chunk // max(k, 1))
    for s in range(0, m, rows):
        d = x[s:s + rows, None, :] - c[None, :, :]
        out[s:s + rows] = np.argmin(np.einsum("ijk,ijk->ij", d, d), axis=1)
    return out


def _reseed_empty(x, c, assign, k):
    counts = np.bincount(assign, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return assign
    assign = assign.copy()
    dist = _sq_dist_to(x, c[assign])
    for j in empty:
        movable = counts[assign] > 1
        cand = np.where(movable, dist, -1.0)
        p = int(np.argmax(cand))
        counts[assign[p]] -= 1
        assign[p] = j
        counts[j] = 1
        dist[p] = -1.0
    return assign


def _means(x, assign, k):
    counts = np.bincount(assign, minlength=k).astype(float)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, assign, x)
    return sums / counts[:, None]


def kmeans(points, k: int, params: SolverParams | None = None, rng: np.random.Generator | None = None) -> KMeansState:
    """Lloyd iterations from ``k`` distinct seeded sample points.

    Stops once the assignment is a fixed point, the largest centroid shift
    drops below ``params.tol`` (same unit as the points), or after
    ``params.i_max`` update steps. An empty cluster takes over the point
    lying farthest from its current centroid.
    """
    params = params or SolverParams()
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("kmeans needs a non-empty (m, d) point array")
    m = pts.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"k={k} outside [1, {m}]")
    rng = rng if rng is not None else np.random.default_rng(params.seed)

    origin = pts.mean(axis=0)
    x = pts - origin
    c = x[np.sort(rng.choice(m, size=k, replace=False))].copy()
    assign = nearest_centroid(x, c)

    history: list[float] = []
    converged = False
    it = 0
    while it < params.i_max:
        it += 1
        assign = _reseed_empty(x, c, assign, k)
        new_c = _means(x, assign, k)
        history.append(float(_sq_dist_to(x, new_c[assign]).sum()))
        shift = float(np.sqrt(_sq_dist_to(new_c, c).max()))
        c = new_c
        nxt = nearest_centroid(x, c)
        if np.array_equal(nxt, assign) or shift < params.tol:
            converged = True
            break
        assign = nxt

    return KMeansState(k, c + origin, assign, it, converged, history)
