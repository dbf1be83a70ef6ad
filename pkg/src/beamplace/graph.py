"""User visibility graph and clique-cover primitives."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import SatelliteConfig, UserSet, pairwise_separation


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    """Undirected simple graph stored as a dense symmetric boolean matrix.

    ``alpha_max`` records the beamwidth threshold (degrees) the graph was
    built from; it is ``None`` for graphs assembled from explicit edges.
    """

    adj: np.ndarray
    alpha_max: float | None = None

    def __post_init__(self):
        adj = np.array(self.adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise ValueError("adjacency diagonal must be zero")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.flags.writeable = False
        object.__setattr__(self, "adj", adj)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adj.sum()) // 2

    def degree(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        i, k = np.nonzero(np.triu(self.adj, 1))
        return list(zip(i.tolist(), k.tolist()))

    def induced(self, vertices: Sequence[int]) -> "VisibilityGraph":
        idx = np.asarray(vertices, dtype=int)
        return VisibilityGraph(self.adj[np.ix_(idx, idx)], self.alpha_max)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VisibilityGraph):
            return NotImplemented
        return np.array_equal(self.adj, other.adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "VisibilityGraph":
        adj = np.zeros((n, n), dtype=bool)
        for i, k in edges:
            if not (0 <= i < n and 0 <= k < n):
                raise IndexError(f"edge ({i}, {k}) out of range for n={n}")
            if i == k:
                raise ValueError(f"self-loop at vertex {i}")
            adj[i, k] = adj[k, i] = True
        return cls(adj)

    @classmethod
    def complete(cls, n: int) -> "VisibilityGraph":
        return cls(~np.eye(n, dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "VisibilityGraph":
        return cls(np.zeros((n, n), dtype=bool))


def build_graph(users: UserSet, sat: SatelliteConfig, distance: str = "chord") -> VisibilityGraph:
    """Connect users whose angular separation at the satellite is <= alpha_max / 2."""
    if len(users) < 1:
        raise ValueError("need at least one user")
    sep = pairwise_separation(users, sat, distance)
    adj = sep <= sat.alpha_max / 2.0
    np.fill_diagonal(adj, False)
    return VisibilityGraph(adj, sat.alpha_max)


def _check_vertices(g: VisibilityGraph, s) -> np.ndarray:
    idx = np.asarray(list(s), dtype=int).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise IndexError(f"vertex index out of range for n={g.n}")
    return idx


def is_clique(g: VisibilityGraph, s) -> bool:
    idx = _check_vertices(g, s)
    if idx.size <= 1:
        return True
    sub = g.adj[np.ix_(idx, idx)]
    # the diagonal is all False, so a repeated vertex also fails this count
    return int(sub.sum()) == idx.size * (idx.size - 1)


def complement(g: VisibilityGraph) -> VisibilityGraph:
    adj = ~g.adj
    np.fill_diagonal(adj, False)
    return VisibilityGraph(adj, g.alpha_max)


@dataclass(frozen=True)
class CliqueCover:
    cliques: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, cliques: Iterable[Iterable[int]]) -> "CliqueCover":
        return cls(tuple(tuple(sorted(int(v) for v in c)) for c in cliques))

    def __len__(self) -> int:
        return len(self.cliques)

    def violations(self, g: VisibilityGraph) -> list[str]:
        """Human-readable list of broken cover invariants; empty when valid."""
        problems = []
        seen = np.zeros(g.n, dtype=int)
        for j, c in enumerate(self.cliques):
            if not c:
                problems.append(f"clique {j} is empty")
                continue
            try:
                ok = is_clique(g, c)
            except IndexError as exc:
                problems.append(f"clique {j}: {exc}")
                continue
            if not ok:
                problems.append(f"clique {j} is not a clique")
            np.add.at(seen, np.asarray(c), 1)
        if (seen > 1).any():
            problems.append(f"vertices in several cliques: {np.flatnonzero(seen > 1).tolist()}")
        if (seen == 0).any():
            problems.append(f"uncovered vertices: {np.flatnonzero(seen == 0).tolist()}")
        return problems

    def is_valid(self, g: VisibilityGraph) -> bool:
        return not self.violations(g)

    def to_coloring(self, n: int) -> np.ndarray:
        """Color class j = clique j; a proper coloring of the complement graph."""
        colors = np.full(n, -1, dtype=int)
        for j, c in enumerate(self.cliques):
            colors[list(c)] = j
        return colors


def is_proper_coloring(g: VisibilityGraph, colors: Sequence[int]) -> bool:
    colors = np.asarray(colors)
    if colors.shape != (g.n,) or (colors < 0).any():
        return False
    same = colors[:, None] == colors[None, :]
    return not (same & g.adj).any()


def write_edgelist(g: VisibilityGraph, path) -> None:
    lines = [f"n {g.n}"] + [f"{i} {k}" for i, k in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path) -> VisibilityGraph:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n "):
        raise ValueError(f"{path}: missing 'n <N>' header")
    try:
        n = int(lines[0].split()[1])
        edges = []
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'i k', got {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    except (IndexError, ValueError) as exc:
        raise ValueError(str(exc)) from exc
    return VisibilityGraph.from_edges(n, edges)
