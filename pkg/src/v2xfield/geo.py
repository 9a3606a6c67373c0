"""WGS84 geodetic points, a local east/north planar frame, and distances.

The planar frame is an equirectangular projection about a fixed origin:
x = R * dlon * cos(origin.lat), y = R * dlat, on a sphere of radius
6,371,000 m.  Valid for small areas only (the projection guard rejects
points more than 0.1 degrees from the origin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

EARTH_RADIUS_M = 6_371_000.0

# Separation beyond which the small-area planar approximation is refused.
MAX_ENU_SEPARATION_DEG = 0.1


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 fix in degrees; altitude in meters is carried but unused."""

    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValidationError(f"latitude {self.lat!r} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValidationError(f"longitude {self.lon!r} outside [-180, 180]")
        if not math.isfinite(self.alt):
            raise ValidationError(f"altitude {self.alt!r} is not finite")


@dataclass(frozen=True)
class EnuPoint:
    """East/north offsets in meters from a projection origin."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"ENU coordinates ({self.x!r}, {self.y!r}) must be finite")


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters on the R = 6,371,000 m sphere.

    Altitude is ignored.
    """
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def to_enu(p: GeoPoint, origin: GeoPoint) -> EnuPoint:
    """Project ``p`` into the planar frame anchored at ``origin``.

    Raises ValidationError when ``p`` is more than 0.1 degrees away from the
    origin in either coordinate (the small-area assumption would not hold).
    """
    dlat = p.lat - origin.lat
    dlon = p.lon - origin.lon
    if abs(dlat) >= MAX_ENU_SEPARATION_DEG or abs(dlon) >= MAX_ENU_SEPARATION_DEG:
        raise ValidationError(
            f"point ({p.lat}, {p.lon}) too far from origin ({origin.lat}, {origin.lon}) "
            f"for the planar frame (limit {MAX_ENU_SEPARATION_DEG} deg per axis)"
        )
    x = EARTH_RADIUS_M * math.radians(dlon) * math.cos(math.radians(origin.lat))
    y = EARTH_RADIUS_M * math.radians(dlat)
    return EnuPoint(x, y)


def from_enu(e: EnuPoint, origin: GeoPoint) -> GeoPoint:
    """Inverse of :func:`to_enu` for the same origin."""
    lat = origin.lat + math.degrees(e.y / EARTH_RADIUS_M)
    lon = origin.lon + math.degrees(e.x / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))
    return GeoPoint(lat, lon)


def enu_distance(a: EnuPoint, b: EnuPoint) -> float:
    """Euclidean distance in meters within one planar frame."""
    return math.hypot(a.x - b.x, a.y - b.y)
