from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..geometry import SatelliteConfig, UserSet, directions_from_satellite, vector_angle
from ..graph import CliqueCover, VisibilityGraph, build_graph


class SolverError(Exception):
    pass


class InstanceTooLarge(SolverError):
    pass


class BudgetExceeded(SolverError):
    pass


@dataclass(frozen=True)
class SolverParams:
    mu: int = 400
    i_max: int = 400
    seed: int = 0
    tol: float = 1e-6
    exact_limit: int = 20
    node_budget: int = 2_000_000

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("mu must be >= 1")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.exact_limit < 1:
            raise ValueError("exact_limit must be >= 1")
        if self.node_budget < 1:
            raise ValueError("node_budget must be >= 1")

    def with_seed(self, seed: int) -> "SolverParams":
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class Beam:
    members: tuple[int, ...]
    boresight: np.ndarray | None = field(default=None, compare=False)


@dataclass
class BeamSolution:
    beams: list[Beam]
    source: str
    instance_id: str = ""
    seed: int = 0

    @property
    def nab(self) -> int:
        return sum(1 for b in self.beams if b.members)

    @property
    def cover(self) -> CliqueCover:
        return CliqueCover.of(b.members for b in self.beams if b.members)

    @property
    def loads(self) -> list[int]:
        return [len(b.members) for b in self.beams if b.members]

    def assignment(self, n: int) -> np.ndarray:
        """Beam index per user, -1 where unassigned."""
        out = np.full(n, -1, dtype=int)
        for j, b in enumerate(self.beams):
            out[list(b.members)] = j
        return out

    def point(self, users: UserSet, sat: SatelliteConfig) -> "BeamSolution":
        """Attach a boresight to every beam (the angular 1-center of its users)."""
        from .boresight import boresight

        dirs = directions_from_satellite(users, sat)
        beams = [Beam(b.members, boresight(dirs[list(b.members)])) for b in self.beams]
        return replace(self, beams=beams)

    def violations(self, users: UserSet, sat: SatelliteConfig, g: VisibilityGraph | None = None) -> list[str]:
        if g is None:
            g = build_graph(users, sat)
        problems = self.cover.violations(g)
        if any(not b.members for b in self.beams):
            problems.append("solution lists an empty beam")
        if problems:
            return problems
        dirs = directions_from_satellite(users, sat)
        limit = np.radians(sat.alpha_max / 2.0)
        for j, b in enumerate(self.beams):
            if b.boresight is None:
                problems.append(f"beam {j} has no boresight")
                continue
            theta = vector_angle(dirs[list(b.members)], b.boresight)
            if (theta > limit).any():
                problems.append(f"beam {j}: user beyond alpha_max/2 of boresight")
        return problems

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "solver": self.source,
            "seed": self.seed,
            "nab": self.nab,
            "beams": [
                {
                    "members": list(b.members),
                    "boresight": None if b.boresight is None else [float(x) for x in b.boresight],
                }
                for b in self.beams
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BeamSolution":
        beams = [
            Beam(
                tuple(int(v) for v in b["members"]),
                None if b.get("boresight") is None else np.asarray(b["boresight"], dtype=float),
            )
            for b in d["beams"]
        ]
        sol = cls(beams, d["solver"], d.get("instance_id", ""), int(d.get("seed", 0)))
        if "nab" in d and int(d["nab"]) != sol.nab:
            raise ValueError(f"nab field {d['nab']} disagrees with {sol.nab} listed beams")
        return sol

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "BeamSolution":
        return cls.from_dict(json.loads(Path(path).read_text()))


def solution_from_cliques(
    cliques: Sequence[Sequence[int]],
    source: str,
    params: SolverParams,
    users: UserSet | None = None,
    sat: SatelliteConfig | None = None,
    instance_id: str = "",
) -> BeamSolution:
    beams = [Beam(tuple(sorted(int(v) for v in c))) for c in cliques]
    sol = BeamSolution(beams, source, instance_id, params.seed)
    if users is not None and sat is not None:
        sol = sol.point(users, sat)
    return sol
