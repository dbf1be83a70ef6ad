"""Spherical-Earth geometry seen from a single static satellite.

All public functions take and return degrees / kilometers; radians are
used internally only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0


def latlon_to_ecef(lat_deg, lon_deg, radius: float = EARTH_RADIUS_KM) -> np.ndarray:
    """Map latitude/longitude (degrees) to Cartesian coordinates on a sphere.

    Accepts scalars or arrays; the trailing axis of the result holds x, y, z.
    """
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    cl = np.cos(lat)
    return radius * np.stack([cl * np.cos(lon), cl * np.sin(lon), np.sin(lat)], axis=-1)


def ecef_to_latlon(xyz) -> tuple[np.ndarray, np.ndarray]:
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    lat = np.degrees(np.arctan2(z, np.hypot(x, y)))
    lon = np.degrees(np.arctan2(y, x))
    # keep longitudes in (-180, 180]
    lon = np.where(lon <= -180.0, lon + 360.0, lon)
    return lat, lon


def vector_angle(a, b) -> np.ndarray:
    """Angle in radians between (batches of) 3-vectors, via atan2(|a x b|, a.b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.arctan2(cross, dot)


@dataclass(frozen=True)
class GroundUser:
    id: int
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 < self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside (-180, 180]")

    @property
    def ecef(self) -> np.ndarray:
        return latlon_to_ecef(self.lat, self.lon)


@dataclass(frozen=True)
class UserSet:
    """An ordered population of ground users; user ``i`` has id ``i``."""

    lat: np.ndarray
    lon: np.ndarray
    ecef: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lat = np.array(self.lat, dtype=float).reshape(-1)
        lon = np.array(self.lon, dtype=float).reshape(-1)
        if lat.shape != lon.shape:
            raise ValueError("lat and lon must have the same length")
        if np.any(np.abs(lat) > 90.0) or np.any(lon <= -180.0) or np.any(lon > 180.0):
            raise ValueError("coordinates out of range")
        lat.flags.writeable = False
        lon.flags.writeable = False
        ecef = latlon_to_ecef(lat, lon).reshape(-1, 3)
        ecef.flags.writeable = False
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)
        object.__setattr__(self, "ecef", ecef)

    @classmethod
    def from_users(cls, users: Iterable[GroundUser]) -> "UserSet":
        users = list(users)
        ids = [u.id for u in users]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate user ids")
        if sorted(ids) != list(range(len(ids))):
            raise ValueError("user ids must be contiguous from 0")
        users.sort(key=lambda u: u.id)
        return cls(np.array([u.lat for u in users]), np.array([u.lon for u in users]))

    @classmethod
    def from_ecef(cls, xyz) -> "UserSet":
        lat, lon = ecef_to_latlon(np.asarray(xyz, dtype=float).reshape(-1, 3))
        return cls(lat, lon)

    def __len__(self) -> int:
        return self.lat.shape[0]

    def __getitem__(self, i: int) -> GroundUser:
        return GroundUser(int(i), float(self.lat[i]), float(self.lon[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, UserSet):
            return NotImplemented
        return np.array_equal(self.lat, other.lat) and np.array_equal(self.lon, other.lon)

    def subset(self, idx: Sequence[int]) -> "UserSet":
        idx = np.asarray(idx, dtype=int)
        return UserSet(self.lat[idx], self.lon[idx])


@dataclass(frozen=True)
class SatelliteConfig:
    altitude: float = 550.0
    sub_lat: float = 0.0
    sub_lon: float = 0.0
    alpha_max: float = 3.2
    g_max: float = 50.0

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError("altitude must be positive")
        if not 0.0 < self.alpha_max < 180.0:
            raise ValueError("alpha_max must lie in (0, 180) degrees")
        if not np.isfinite(self.g_max):
            raise ValueError("g_max must be finite")

    @property
    def position(self) -> np.ndarray:
        return latlon_to_ecef(self.sub_lat, self.sub_lon, EARTH_RADIUS_KM + self.altitude)

    @property
    def horizon_angle(self) -> float:
        """Earth-central angle (degrees) from the sub-satellite point to the horizon."""
        return float(np.degrees(np.arccos(EARTH_RADIUS_KM / (EARTH_RADIUS_KM + self.altitude))))


def _ecef(u) -> np.ndarray:
    if isinstance(u, GroundUser):
        return u.ecef
    return np.asarray(u, dtype=float)


def slant_range(user, sat: SatelliteConfig) -> float:
    return float(np.linalg.norm(_ecef(user) - sat.position))


def slant_ranges(users: UserSet, sat: SatelliteConfig) -> np.ndarray:
    return np.linalg.norm(users.ecef - sat.position, axis=1)


def chord_distance(u1, u2) -> float:
    return float(np.linalg.norm(_ecef(u1) - _ecef(u2)))


def great_circle_distance(u1: GroundUser, u2: GroundUser) -> float:
    """Surface distance in km; provided for reference, never used for adjacency."""
    return float(EARTH_RADIUS_KM * vector_angle(u1.ecef, u2.ecef))


def separation_from_sides(s_i, s_k, d_ik) -> np.ndarray:
    """Angle (radians) opposite side ``d_ik`` in the triangle with sides s_i, s_k, d_ik.

    Algebraically this is arccos((s_i^2 + s_k^2 - d_ik^2) / (2 s_i s_k)),
    rewritten through the half-angle identity
    sin^2(a/2) = (d_ik^2 - (s_i - s_k)^2) / (4 s_i s_k) so that small angles
    keep full precision. The sine is clamped to [0, 1].
    """
    s_i = np.asarray(s_i, dtype=float)
    s_k = np.asarray(s_k, dtype=float)
    d_ik = np.asarray(d_ik, dtype=float)
    ds = s_i - s_k
    num = (d_ik - np.abs(ds)) * (d_ik + np.abs(ds))
    h = np.clip(num / (4.0 * (s_i * s_k)), 0.0, 1.0)
    return 2.0 * np.arctan2(np.sqrt(h), np.sqrt(1.0 - h))


def angular_separation(u1, u2, sat: SatelliteConfig, distance: str = "chord") -> float:
    """Angle in degrees subtended at the satellite by two ground users.

    ``distance="great_circle"`` feeds the surface arc length instead of the
    chord into the triangle; it exists for sensitivity studies only.
    """
    a, b = _ecef(u1), _ecef(u2)
    sp = sat.position
    s_i = np.linalg.norm(a - sp)
    s_k = np.linalg.norm(b - sp)
    d = _pair_distance(a[None, :], b[None, :], distance)
    return float(np.degrees(separation_from_sides(s_i, s_k, d))[0])


def _pair_distance(a: np.ndarray, b: np.ndarray, distance: str) -> np.ndarray:
    if distance == "chord":
        return np.linalg.norm(a - b, axis=-1)
    if distance == "great_circle":
        return EARTH_RADIUS_KM * vector_angle(a, b)
    raise ValueError(f"unknown distance metric {distance!r}")


def pairwise_separation(users: UserSet, sat: SatelliteConfig, distance: str = "chord") -> np.ndarray:
    """Dense N x N matrix of angular separations in degrees (zero diagonal)."""
    xyz = users.ecef
    s = slant_ranges(users, sat)
    n = len(users)
    out = np.empty((n, n))
    # row blocks bound the temporary (block, n, 3) difference array
    block = max(1, 4_000_000 // max(3 * n, 1))
    for start in range(0, n, block):
        stop = min(n, start + block)
        d = _pair_distance(xyz[start:stop, None, :], xyz[None, :, :], distance)
        out[start:stop] = np.degrees(separation_from_sides(s[start:stop, None], s[None, :], d))
    # mirror the upper triangle so the matrix is symmetric bit-for-bit
    upper = np.triu(out, 1)
    return upper + upper.T


def directions_from_satellite(users: UserSet, sat: SatelliteConfig) -> np.ndarray:
    """Unit vectors pointing from the satellite to each user."""
    v = users.ecef - sat.position
    return v / np.linalg.norm(v, axis=1, keepdims=True)
