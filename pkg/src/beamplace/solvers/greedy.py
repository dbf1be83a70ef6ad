"""Greedy clique cover (low-degree seed, max-candidate growth)."""
from __future__ import annotations

import numpy as np

from ..geometry import SatelliteConfig, UserSet
from ..graph import VisibilityGraph
from .base import BeamSolution, SolverParams, solution_from_cliques


def grow_clique(adj: np.ndarray, seed_vertex: int, allowed: np.ndarray) -> list[int]:
    """Extend ``[seed_vertex]`` to a maximal clique inside ``allowed``.

    Each step adds the candidate whose neighborhood keeps the most other
    candidates alive; ties go to the lowest index.
    """
    clique = [int(seed_vertex)]
    cand = adj[seed_vertex] & allowed
    while cand.any():
        ci = np.flatnonzero(cand)
        score = adj[np.ix_(ci, ci)].sum(axis=1)
        c = int(ci[np.argmax(score)])
        clique.append(c)
        cand &= adj[c]
    return clique


def greedy_cliques(adj: np.ndarray) -> list[list[int]]:
    n = adj.shape[0]
    unserved = np.ones(n, dtype=bool)
    deg = adj.sum(axis=1).astype(np.int64)
    big = np.iinfo(np.int64).max
    cliques = []
    while unserved.any():
        v = int(np.argmin(np.where(unserved, deg, big)))
        clique = grow_clique(adj, v, unserved)
        unserved[clique] = False
        deg -= adj[:, clique].sum(axis=1)
        cliques.append(sorted(clique))
    return cliques


def solve_greedy(
    g: VisibilityGraph,
    params: SolverParams | None = None,
    users: UserSet | None = None,
    sat: SatelliteConfig | None = None,
    instance_id: str = "",
) -> BeamSolution:
    """Deterministic greedy clique cover; ``params.seed`` is recorded but unused."""
    params = params or SolverParams()
    return solution_from_cliques(greedy_cliques(g.adj), "greedy", params, users, sat, instance_id)
