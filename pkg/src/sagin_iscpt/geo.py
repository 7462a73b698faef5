"""Geodetic <-> Cartesian transforms and line-of-sight geometry.

Angles are degrees at the API boundary and radians internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

R_EARTH_MEAN = 6371000.0


class CoincidentPoints(ValueError):
    pass


@dataclass(frozen=True)
class EllipsoidParams:
    semi_major_m: float
    semi_minor_m: float

    def __post_init__(self):
        if not 0.0 < self.semi_minor_m <= self.semi_major_m:
            raise ValueError("need 0 < semi_minor <= semi_major")

    @property
    def first_eccentricity(self) -> float:
        a, b = self.semi_major_m, self.semi_minor_m
        return math.sqrt(a * a - b * b) / a

    @property
    def e2(self) -> float:
        a, b = self.semi_major_m, self.semi_minor_m
        return (a * a - b * b) / (a * a)

    def prime_vertical_radius(self, lat_rad: float) -> float:
        """Prime vertical radius of curvature N at geodetic latitude (radians)."""
        s = math.sin(lat_rad)
        return self.semi_major_m / math.sqrt(1.0 - self.e2 * s * s)


WGS84 = EllipsoidParams(6378137.0, 6356752.314245)


@dataclass(frozen=True)
class GeodeticPosition:
    latitude_deg: float
    longitude_deg: float
    altitude_m: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude_deg}")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude_deg}")
        if not self.altitude_m >= -500.0:
            raise ValueError(f"altitude below -500 m: {self.altitude_m}")


@dataclass(frozen=True)
class EcefPosition:
    x_m: float
    y_m: float
    z_m: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x_m, self.y_m, self.z_m)):
            raise ValueError("ECEF components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x_m, self.y_m, self.z_m])

    @classmethod
    def from_array(cls, xyz) -> "EcefPosition":
        return cls(float(xyz[0]), float(xyz[1]), float(xyz[2]))


@dataclass(frozen=True)
class EnuVector:
    east_m: float
    north_m: float
    up_m: float


def lla_to_ecef(p: GeodeticPosition, ell: EllipsoidParams = WGS84) -> EcefPosition:
    lat = math.radians(p.latitude_deg)
    lon = math.radians(p.longitude_deg)
    n = ell.prime_vertical_radius(lat)
    h = p.altitude_m
    cos_lat = math.cos(lat)
    return EcefPosition(
        (n + h) * cos_lat * math.cos(lon),
        (n + h) * cos_lat * math.sin(lon),
        (n * (1.0 - ell.e2) + h) * math.sin(lat),
    )


def ecef_to_enu(target: EcefPosition, ref_point: GeodeticPosition,
                ell: EllipsoidParams = WGS84) -> EnuVector:
    """Express ``target`` in the east-north-up frame anchored at ``ref_point``."""
    origin = lla_to_ecef(ref_point, ell)
    dx = target.x_m - origin.x_m
    dy = target.y_m - origin.y_m
    dz = target.z_m - origin.z_m
    lat = math.radians(ref_point.latitude_deg)
    lon = math.radians(ref_point.longitude_deg)
    sb, cb = math.sin(lat), math.cos(lat)
    sl, cl = math.sin(lon), math.cos(lon)
    east = -dx * sl + dy * cl
    north = -dx * sb * cl - dy * sb * sl + dz * cb
    up = dx * cb * cl + dy * cb * sl + dz * sb
    return EnuVector(east, north, up)


def elevation_angle(ap: EcefPosition, user: GeodeticPosition,
                    ell: EllipsoidParams = WGS84) -> float:
    """Elevation of ``ap`` seen from ``user``, radians in [-pi/2, pi/2]."""
    enu = ecef_to_enu(ap, user, ell)
    return math.atan2(enu.up_m, math.hypot(enu.north_m, enu.east_m))


def isl_min_distance_to_center(a: EcefPosition, b: EcefPosition,
                               segment_check: bool = False) -> float:
    """Distance from the Earth's center to the line through ``a`` and ``b``.

    With ``segment_check`` the distance is taken to the segment instead, so a
    closest point lying outside the two satellites falls back to the nearer
    endpoint.
    """
    va, vb = a.as_array(), b.as_array()
    diff = va - vb
    sep = float(np.linalg.norm(diff))
    if sep < 1e-6:
        raise CoincidentPoints("ISL endpoints coincide")
    na2 = float(va @ va)
    nb2 = float(vb @ vb)
    dot = float(va @ vb)
    # |a|^2 |b|^2 - (a.b)^2 equals |a x b|^2; the cross product avoids the
    # cancellation of the difference form for nearly parallel a and b
    dist = float(np.linalg.norm(np.cross(va, vb))) / sep
    if segment_check:
        # parameter of the foot of the perpendicular from 0 onto a + t (b - a)
        t = (na2 - dot) / (sep * sep)
        if t < 0.0:
            return math.sqrt(na2)
        if t > 1.0:
            return math.sqrt(nb2)
    return dist
