"""Clique-constrained K-Means beam placement.

A bisection over the cluster count K. Each probe clusters the users' ECEF
positions with seeded K-Means; clusters that are not cliques of the
visibility graph are split by the greedy cover of their induced subgraph.
A probe whose clusters are all cliques moves the search to smaller K,
otherwise to larger K. The fewest-beam cover seen is returned.
"""
from __future__ import annotations

import math

import numpy as np

from ..geometry import SatelliteConfig, UserSet
from ..graph import VisibilityGraph, is_clique
from .base import BeamSolution, SolverParams, solution_from_cliques
from .greedy import greedy_cliques, grow_clique
from .kmeans import kmeans


def clique_size_estimate(g: VisibilityGraph) -> int:
    """Size of the greedy clique grown from the highest-degree vertex."""
    v = int(np.argmax(g.degree()))
    return len(grow_clique(g.adj, v, np.ones(g.n, dtype=bool)))


def repair(g: VisibilityGraph, clusters: list[np.ndarray]) -> tuple[list[list[int]], bool]:
    """Split non-clique clusters; returns (cliques, all_clusters_were_cliques)."""
    out: list[list[int]] = []
    feasible = True
    for members in clusters:
        if members.size == 0:
            continue
        if is_clique(g, members):
            out.append(sorted(members.tolist()))
            continue
        feasible = False
        sub = g.adj[np.ix_(members, members)]
        for local in greedy_cliques(sub):
            out.append(sorted(members[local].tolist()))
    return out, feasible


def solve_bkmeans(
    users: UserSet,
    sat: SatelliteConfig,
    g: VisibilityGraph,
    params: SolverParams | None = None,
    instance_id: str = "",
) -> BeamSolution:
    params = params or SolverParams()
    n = g.n
    if len(users) != n:
        raise ValueError("graph and user set sizes differ")
    points = users.ecef

    lo = max(1, math.ceil(n / clique_size_estimate(g)))
    hi = n
    best: list[list[int]] | None = None
    probes = 0
    while lo <= hi and probes < params.mu:
        k = (lo + hi) // 2
        rng = np.random.default_rng([params.seed, k])
        state = kmeans(points, k, params, rng=rng)
        cover, feasible = repair(g, state.clusters())
        if best is None or len(cover) < len(best):
            best = cover
        if feasible:
            hi = k - 1
        else:
            lo = k + 1
        probes += 1

    if best is None:  # only reachable with an empty budget
        best = [[i] for i in range(n)]
    best.sort(key=lambda c: c[0])
    return solution_from_cliques(best, "bkmeans", params, users, sat, instance_id)
