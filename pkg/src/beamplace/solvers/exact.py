"""Exact minimum clique cover for small graphs.

Colours the complement graph with a DSATUR branch and bound. Connected
components of the visibility graph are solved independently since no
clique can span two of them.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..geometry import SatelliteConfig, UserSet
from ..graph import VisibilityGraph
from .base import BeamSolution, BudgetExceeded, InstanceTooLarge, SolverParams, solution_from_cliques
from .greedy import greedy_cliques


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _max_clique(nbr: list[int], n: int) -> list[int]:
    """Maximum clique of a small bitmask graph (simple Carraghan-Pardalos search)."""
    best: list[int] = []

    def expand(current: list[int], cand: int):
        nonlocal best
        if not cand:
            if len(current) > len(best):
                best = list(current)
            return
        while cand:
            if len(current) + bin(cand).count("1") <= len(best):
                return
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            expand(current + [v], cand & nbr[v])

    expand([], (1 << n) - 1)
    return best


class _Colorer:
    def __init__(self, nbr: list[int], n: int, budget: int):
        self.nbr = nbr
        self.n = n
        self.budget = budget
        self.nodes = 0

    def solve(self, upper: list[int], clique: list[int]) -> list[int]:
        """Minimum colouring; ``upper`` is a known colouring, ``clique`` a lower-bound witness."""
        n = self.n
        self.best = list(upper)
        self.best_k = max(upper) + 1
        lower = len(clique)
        if self.best_k <= lower:
            return self.best
        self.lower = lower
        colors = [-1] * n
        classes: list[int] = []
        for c, v in enumerate(clique):
            colors[v] = c
            classes.append(1 << v)
        self._search(colors, classes, n - len(clique))
        return self.best

    def _search(self, colors: list[int], classes: list[int], left: int) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"exact search exceeded node budget of {self.budget}")
        if left == 0:
            k = len(classes)
            if k < self.best_k:
                self.best_k = k
                self.best = list(colors)
            return self.best_k <= self.lower
        # DSATUR pick: most distinct neighbour colours, then most uncoloured neighbours, then lowest index
        pick, pick_key = -1, None
        uncolored = 0
        for v in range(self.n):
            if colors[v] < 0:
                uncolored |= 1 << v
        for v in _bits(uncolored):
            sat = sum(1 for cls in classes if cls & self.nbr[v])
            key = (sat, bin(self.nbr[v] & uncolored).count("1"))
            if pick_key is None or key > pick_key:
                pick, pick_key = v, key
        v = pick
        for c, cls in enumerate(classes):
            if cls & self.nbr[v]:
                continue
            colors[v] = c
            classes[c] |= 1 << v
            done = self._search(colors, classes, left - 1)
            classes[c] &= ~(1 << v)
            colors[v] = -1
            if done:
                return True
        if len(classes) + 1 < self.best_k:
            colors[v] = len(classes)
            classes.append(1 << v)
            done = self._search(colors, classes, left - 1)
            classes.pop()
            colors[v] = -1
            if done:
                return True
        return False


def exact_cliques(adj: np.ndarray, node_budget: int = 2_000_000) -> list[list[int]]:
    """Provably minimum clique cover of the graph given by ``adj``."""
    n = adj.shape[0]
    if n == 0:
        return []
    n_comp, labels = connected_components(adj.astype(np.int8), directed=False)
    cliques: list[list[int]] = []
    spent = 0
    for comp in range(n_comp):
        verts = np.flatnonzero(labels == comp)
        sub = adj[np.ix_(verts, verts)]
        m = verts.size
        if m == 1:
            cliques.append([int(verts[0])])
            continue
        # bitmask adjacency of the complement restricted to this component
        comp_nbr = []
        for i in range(m):
            row = ~sub[i]
            row[i] = False
            comp_nbr.append(sum(1 << j for j in np.flatnonzero(row).tolist()))
        upper_cliques = greedy_cliques(sub)
        upper = [0] * m
        for c, members in enumerate(upper_cliques):
            for v in members:
                upper[v] = c
        witness = _max_clique(comp_nbr, m)
        colorer = _Colorer(comp_nbr, m, node_budget - spent)
        colors = colorer.solve(upper, witness)
        spent += colorer.nodes
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            groups.setdefault(c, []).append(int(verts[v]))
        cliques.extend(groups[c] for c in sorted(groups))
    cliques.sort(key=lambda c: c[0])
    return cliques


def solve_exact(
    g: VisibilityGraph,
    params: SolverParams | None = None,
    users: UserSet | None = None,
    sat: SatelliteConfig | None = None,
    instance_id: str = "",
    limit: int | None = None,
) -> BeamSolution:
    params = params or SolverParams()
    cap = params.exact_limit if limit is None else limit
    if g.n > cap:
        raise InstanceTooLarge(f"exact solver is capped at {cap} vertices, instance has {g.n}")
    return solution_from_cliques(exact_cliques(g.adj, params.node_budget), "exact", params, users, sat, instance_id)
