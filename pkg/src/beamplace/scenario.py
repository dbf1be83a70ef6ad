"""Reproducible user populations and experiment configuration files."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import SatelliteConfig, UserSet, ecef_to_latlon, latlon_to_ecef, vector_angle
from .linkbudget import LinkBudgetConfig
from .solvers.base import SolverParams


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Region:
    center_lat: float = 0.0
    center_lon: float = 0.0
    radius_deg: float = 8.0


@dataclass(frozen=True)
class Hotspot:
    lat: float
    lon: float
    spread_deg: float
    weight: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    n_users: int = 100
    seed: int = 0
    region: Region = field(default_factory=Region)
    distribution: str = "uniform"
    hotspots: tuple[Hotspot, ...] = ()
    sat: SatelliteConfig = field(default_factory=SatelliteConfig)
    link: LinkBudgetConfig = field(default_factory=LinkBudgetConfig)
    solver: SolverParams = field(default_factory=SolverParams)
    distance: str = "chord"

    def __post_init__(self):
        validate(self)

    def with_users(self, n_users: int) -> "ScenarioConfig":
        return dataclasses.replace(self, n_users=int(n_users))

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return dataclasses.replace(self, seed=int(seed))


def validate(cfg: ScenarioConfig) -> None:
    if isinstance(cfg.n_users, bool) or not isinstance(cfg.n_users, int) or cfg.n_users < 1:
        raise ConfigError("n_users", f"must be an integer >= 1, got {cfg.n_users!r}")
    r = cfg.region
    if not 0.0 < r.radius_deg <= 90.0:
        raise ConfigError("region.radius_deg", f"must lie in (0, 90], got {r.radius_deg}")
    if not -90.0 <= r.center_lat <= 90.0:
        raise ConfigError("region.center_lat", f"must lie in [-90, 90], got {r.center_lat}")
    if not -180.0 < r.center_lon <= 180.0:
        raise ConfigError("region.center_lon", f"must lie in (-180, 180], got {r.center_lon}")
    if cfg.distribution not in ("uniform", "hotspot"):
        raise ConfigError("distribution", f"must be 'uniform' or 'hotspot', got {cfg.distribution!r}")
    if cfg.distribution == "hotspot":
        if not cfg.hotspots:
            raise ConfigError("hotspots", "hotspot distribution needs at least one hotspot")
        for i, h in enumerate(cfg.hotspots):
            if not h.spread_deg > 0:
                raise ConfigError(f"hotspots[{i}].spread_deg", "must be > 0")
            if not h.weight > 0:
                raise ConfigError(f"hotspots[{i}].weight", "must be > 0")
    if cfg.distance not in ("chord", "great_circle"):
        raise ConfigError("distance", f"must be 'chord' or 'great_circle', got {cfg.distance!r}")
    # every point of the cap must see the satellite above the horizon
    off = float(np.degrees(vector_angle(latlon_to_ecef(r.center_lat, r.center_lon),
                                        latlon_to_ecef(cfg.sat.sub_lat, cfg.sat.sub_lon))))
    if off + r.radius_deg >= cfg.sat.horizon_angle:
        raise ConfigError(
            "region.radius_deg",
            f"cap reaches {off + r.radius_deg:.3f} deg from the sub-satellite point, "
            f"beyond the {cfg.sat.horizon_angle:.3f} deg horizon",
        )


def _rotate_from_pole(colat: np.ndarray, az: np.ndarray, lat0: float, lon0: float) -> np.ndarray:
    """Points given in a frame whose pole is (lat0, lon0), returned in Earth coordinates."""
    local = np.stack([np.sin(colat) * np.cos(az), np.sin(colat) * np.sin(az), np.cos(colat)], axis=-1)
    up = latlon_to_ecef(lat0, lon0, 1.0)
    east = np.array([-np.sin(np.radians(lon0)), np.cos(np.radians(lon0)), 0.0])
    north = np.cross(up, east)
    return local[:, 0:1] * east + local[:, 1:2] * north + local[:, 2:3] * up


def sample_cap(rng: np.random.Generator, n: int, lat0: float, lon0: float, radius_deg: float) -> np.ndarray:
    """Area-uniform unit vectors strictly inside a spherical cap."""
    cos_r = np.cos(np.radians(radius_deg))
    u = rng.random(n)
    cos_colat = 1.0 - u * (1.0 - cos_r)  # u in [0, 1) keeps the rim excluded
    colat = np.arccos(cos_colat)
    az = rng.random(n) * 2.0 * np.pi
    return _rotate_from_pole(colat, az, lat0, lon0)


def _sample_hotspots(rng, cfg: ScenarioConfig) -> np.ndarray:
    r = cfg.region
    center = latlon_to_ecef(r.center_lat, r.center_lon, 1.0)
    limit = np.radians(r.radius_deg)
    w = np.array([h.weight for h in cfg.hotspots], dtype=float)
    w /= w.sum()
    out = np.empty((0, 3))
    while out.shape[0] < cfg.n_users:
        need = cfg.n_users - out.shape[0]
        comp = rng.choice(len(cfg.hotspots), size=need, p=w)
        batch = []
        for i, h in enumerate(cfg.hotspots):
            m = int((comp == i).sum())
            if m == 0:
                continue
            spread = np.radians(h.spread_deg)
            colat = np.hypot(rng.normal(0, spread, m), rng.normal(0, spread, m))
            az = rng.random(m) * 2.0 * np.pi
            batch.append(_rotate_from_pole(colat, az, h.lat, h.lon))
        pts = np.concatenate(batch)
        keep = vector_angle(pts, center) < limit
        out = np.concatenate([out, pts[keep]])
    return out[: cfg.n_users]


def generate(cfg: ScenarioConfig) -> UserSet:
    rng = np.random.default_rng(cfg.seed)
    r = cfg.region
    if cfg.distribution == "uniform":
        pts = sample_cap(rng, cfg.n_users, r.center_lat, r.center_lon, r.radius_deg)
    else:
        pts = _sample_hotspots(rng, cfg)
    lat, lon = ecef_to_latlon(pts)
    return UserSet(lat, lon)


def instance_seed(base_seed: int, index: int) -> int:
    """Per-instance seed: base seed XOR instance index."""
    return int(base_seed) ^ int(index)


# -- config files -----------------------------------------------------------

_SECTIONS = {
    "region": Region,
    "sat": SatelliteConfig,
    "link": LinkBudgetConfig,
    "solver": SolverParams,
}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return dataclasses.asdict(cfg)


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(where, "expected an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{where}.{key}" if where else key, "unknown field")
    kwargs = {}
    for key, value in data.items():
        ftype = names[key].type
        if ftype in ("float", float) and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(where or "config", str(exc)) from exc


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown field")
    kwargs = dict(data)
    for key, cls in _SECTIONS.items():
        if key in kwargs:
            kwargs[key] = _build(cls, kwargs[key], key)
    if "hotspots" in kwargs:
        spots = kwargs["hotspots"]
        if not isinstance(spots, list):
            raise ConfigError("hotspots", "expected a list")
        kwargs["hotspots"] = tuple(_build(Hotspot, h, f"hotspots[{i}]") for i, h in enumerate(spots))
    for key in ("n_users", "seed"):
        if key in kwargs and (isinstance(kwargs[key], bool) or not isinstance(kwargs[key], int)):
            raise ConfigError(key, f"must be an integer, got {kwargs[key]!r}")
    return ScenarioConfig(**kwargs)


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data)


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# -- user set files ---------------------------------------------------------

def write_users_csv(users: UserSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "lat", "lon"])
        for i in range(len(users)):
            w.writerow([i, repr(float(users.lat[i])), repr(float(users.lon[i]))])


def read_users_csv(path) -> UserSet:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no users")
    try:
        ids = [int(r["id"]) for r in rows]
        lat = [float(r["lat"]) for r in rows]
        lon = [float(r["lon"]) for r in rows]
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"{path}: malformed user row ({exc})") from exc
    if ids != list(range(len(ids))):
        raise ValueError(f"{path}: user ids must be 0..N-1 in order")
    return UserSet(np.array(lat), np.array(lon))
