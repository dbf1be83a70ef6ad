from .base import (
    Beam,
    BeamSolution,
    BudgetExceeded,
    InstanceTooLarge,
    SolverError,
    SolverParams,
)
from .bkmeans import solve_bkmeans
from .boresight import boresight, enclosing_cap
from .exact import solve_exact
from .greedy import solve_greedy
from .kmeans import KMeansState, kmeans

ALGORITHMS = ("greedy", "bkmeans", "exact")


def solve(algo: str, users, sat, g, params: SolverParams, instance_id: str = "") -> BeamSolution:
    """Dispatch by algorithm name; the result always carries boresights."""
    if algo == "greedy":
        return solve_greedy(g, params, users, sat, instance_id)
    if algo == "bkmeans":
        return solve_bkmeans(users, sat, g, params, instance_id)
    if algo == "exact":
        return solve_exact(g, params, users, sat, instance_id)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS",
    "Beam",
    "BeamSolution",
    "BudgetExceeded",
    "InstanceTooLarge",
    "KMeansState",
    "SolverError",
    "SolverParams",
    "boresight",
    "enclosing_cap",
    "kmeans",
    "solve",
    "solve_bkmeans",
    "solve_exact",
    "solve_greedy",
]
