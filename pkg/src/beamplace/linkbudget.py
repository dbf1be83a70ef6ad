"""Per-user link quality (SCGNR) and solution-level metrics."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import SatelliteConfig, UserSet, directions_from_satellite, slant_ranges, vector_angle
from .graph import VisibilityGraph, build_graph
from .solvers.base import Beam, BeamSolution

SPEED_OF_LIGHT_KM_S = 299_792.458
GAIN_FLOOR_DB = 30.0


class InvalidSolution(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudgetConfig:
    frequency_ghz: float = 20.0
    rx_gain_dbi: float = 0.0
    noise_dbw: float = -120.0
    rolloff_coeff: float = 12.0

    def __post_init__(self):
        if not self.frequency_ghz > 0:
            raise ValueError("frequency_ghz must be > 0")
        if not self.rolloff_coeff > 0:
            raise ValueError("rolloff_coeff must be > 0")


def beam_gain(theta_deg, sat: SatelliteConfig, cfg: LinkBudgetConfig | None = None):
    """Parabolic-in-dB pattern: -3 dB at half the beamwidth (for coefficient 12),
    never below ``g_max - 30`` dB."""
    cfg = cfg or LinkBudgetConfig()
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(theta < 0):
        raise ValueError("off-boresight angle must be >= 0")
    g = sat.g_max - cfg.rolloff_coeff * (theta / sat.alpha_max) ** 2
    g = np.maximum(g, sat.g_max - GAIN_FLOOR_DB)
    return float(g) if g.ndim == 0 else g


def fspl(distance_km, frequency_ghz):
    d = np.asarray(distance_km, dtype=float)
    f = np.asarray(frequency_ghz, dtype=float)
    if np.any(d <= 0) or np.any(f <= 0):
        raise ValueError("distance and frequency must be positive")
    wavelength_km = SPEED_OF_LIGHT_KM_S / (f * 1e9)
    loss = 20.0 * np.log10(4.0 * np.pi * d / wavelength_km)
    return float(loss) if loss.ndim == 0 else loss


def _link(theta_deg, slant_km, sat, cfg):
    return beam_gain(theta_deg, sat, cfg) + cfg.rx_gain_dbi - fspl(slant_km, cfg.frequency_ghz) - cfg.noise_dbw


def scgnr(user_index: int, beam: Beam, users: UserSet, sat: SatelliteConfig, cfg: LinkBudgetConfig | None = None) -> float:
    """SCGNR in dB for one user served by ``beam``."""
    cfg = cfg or LinkBudgetConfig()
    if user_index not in beam.members:
        raise ValueError(f"user {user_index} is not served by this beam")
    if beam.boresight is None:
        raise ValueError("beam has no boresight")
    u = users.subset([user_index])
    d = directions_from_satellite(u, sat)[0]
    theta = float(np.degrees(vector_angle(d, beam.boresight)))
    return float(_link(theta, slant_ranges(u, sat)[0], sat, cfg))


def per_user_scgnr(sol: BeamSolution, users: UserSet, sat: SatelliteConfig, cfg: LinkBudgetConfig | None = None) -> np.ndarray:
    cfg = cfg or LinkBudgetConfig()
    n = len(users)
    theta = np.full(n, np.nan)
    dirs = directions_from_satellite(users, sat)
    for b in sol.beams:
        idx = list(b.members)
        theta[idx] = np.degrees(vector_angle(dirs[idx], b.boresight))
    return _link(theta, slant_ranges(users, sat), sat, cfg)


@dataclass
class MetricsReport:
    instance_id: str
    solver: str
    n: int
    nab: int
    load_gap: int
    scgnr_db: np.ndarray = field(repr=False)

    @property
    def mean_scgnr_db(self) -> float:
        return float(np.mean(self.scgnr_db))

    @property
    def min_scgnr_db(self) -> float:
        return float(np.min(self.scgnr_db))

    def row(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "solver": self.solver,
            "n": self.n,
            "nab": self.nab,
            "load_gap": self.load_gap,
            "mean_scgnr_db": f"{self.mean_scgnr_db:.6f}",
            "min_scgnr_db": f"{self.min_scgnr_db:.6f}",
        }


METRICS_COLUMNS = ["instance_id", "solver", "n", "nab", "load_gap", "mean_scgnr_db", "min_scgnr_db"]


def load_gap(loads: Sequence[int]) -> int:
    loads = [x for x in loads if x > 0]
    return max(loads) - min(loads) if loads else 0


def evaluate(
    sol: BeamSolution,
    users: UserSet,
    sat: SatelliteConfig,
    cfg: LinkBudgetConfig | None = None,
    g: VisibilityGraph | None = None,
) -> MetricsReport:
    cfg = cfg or LinkBudgetConfig()
    problems = sol.violations(users, sat, g if g is not None else build_graph(users, sat))
    if problems:
        raise InvalidSolution("; ".join(problems))
    values = per_user_scgnr(sol, users, sat, cfg)
    return MetricsReport(sol.instance_id, sol.source, len(users), sol.nab, load_gap(sol.loads), values)


def empirical_cdf(samples: Iterable[float]) -> list[tuple[float, float]]:
    """Right-continuous ECDF as (value, P[X <= value]) at each distinct sample."""
    x = np.asarray(list(samples), dtype=float)
    if x.size == 0:
        raise ValueError("empirical_cdf needs at least one sample")
    values, counts = np.unique(x, return_counts=True)
    probs = np.cumsum(counts) / x.size
    return [(float(v), float(p)) for v, p in zip(values, probs)]


def write_metrics_csv(reports: Iterable[MetricsReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRICS_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in reports:
            w.writerow(r.row())


def write_per_user_csv(report: MetricsReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "scgnr_db"])
        for i, v in enumerate(report.scgnr_db):
            w.writerow([i, f"{v:.6f}"])


def write_cdf_csv(cdf: Sequence[tuple[float, float]], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "probability"])
        for v, p in cdf:
            w.writerow([f"{v:.6f}", f"{p:.6f}"])
