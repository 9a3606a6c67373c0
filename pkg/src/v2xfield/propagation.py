"""Line-of-sight channel model: FSPL, building losses, RSSI, reception decision."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ValidationError
from .geo import EnuPoint, enu_distance

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Distances below this are clamped before the path-loss log: the free-space
# formula is singular at zero and unphysical in the near field.
NEAR_FIELD_CLAMP_M = 1.0

REASON_OK = "ok"
REASON_BELOW_SENSITIVITY = "below_sensitivity"
REASON_BELOW_MIN_SNR = "below_min_snr"

_GEOM_EPS = 1e-9


@dataclass(frozen=True)
class ChannelParams:
    """Physical-layer constants shared by the simulator and the decider.

    Defaults are the stock 802.11p setup at 5.9 GHz: 20 mW transmit power,
    a -89 dBm decider floor, and a -98 dBm noise floor.
    """

    tx_power_dbm: float = 13.0
    freq_hz: float = 5.9e9
    sensitivity_dbm: float = -89.0
    noise_floor_dbm: float = -98.0
    wall_loss_db: float = 9.0
    interior_loss_db_per_m: float = 0.4
    min_snr_db: float = 4.0

    def __post_init__(self):
        if self.freq_hz <= 0:
            raise ValidationError(f"carrier frequency must be positive, got {self.freq_hz!r}")
        if self.wall_loss_db < 0 or self.interior_loss_db_per_m < 0:
            raise ValidationError("attenuation terms must be non-negative")
        if self.sensitivity_dbm <= self.noise_floor_dbm:
            warnings.warn(
                f"sensitivity {self.sensitivity_dbm} dBm does not exceed the noise floor "
                f"{self.noise_floor_dbm} dBm; reception will be noise-limited",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ReceptionDecision:
    received: bool
    rssi_dbm: float
    snr_db: float
    reason: str


@dataclass(frozen=True)
class Obstacle:
    """A simple (non-self-intersecting) building footprint in the planar frame."""

    id: str
    polygon: tuple[EnuPoint, ...]

    def __post_init__(self):
        if len(self.polygon) < 3:
            raise ValidationError(f"obstacle {self.id!r}: polygon needs at least 3 vertices")
        if _self_intersects(self.polygon):
            raise ValidationError(f"obstacle {self.id!r}: polygon is self-intersecting")
        if abs(_shoelace_area(self.polygon)) <= _GEOM_EPS:
            raise ValidationError(f"obstacle {self.id!r}: polygon has zero area")


def fspl_db(d_m: float, f_hz: float) -> float:
    """Free-space path loss: 20*log10(d) + 20*log10(f) + 20*log10(4*pi/c).

    Distances under 1 m are clamped to 1 m.
    """
    if f_hz <= 0:
        raise ValidationError(f"carrier frequency must be positive, got {f_hz!r}")
    if d_m < 0 or not math.isfinite(d_m):
        raise ValidationError(f"distance must be finite and >= 0, got {d_m!r}")
    d = max(d_m, NEAR_FIELD_CLAMP_M)
    return (
        20.0 * math.log10(d)
        + 20.0 * math.log10(f_hz)
        + 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT_M_S)
    )


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _shoelace_area(poly: tuple[EnuPoint, ...]) -> float:
    area = 0.0
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        area += a.x * b.y - b.x * a.y
    return 0.5 * area


def _on_segment(px, py, ax, ay, bx, by) -> bool:
    if abs(_cross(ax, ay, bx, by, px, py)) > _GEOM_EPS:
        return False
    return (
        min(ax, bx) - _GEOM_EPS <= px <= max(ax, bx) + _GEOM_EPS
        and min(ay, by) - _GEOM_EPS <= py <= max(ay, by) + _GEOM_EPS
    )


def _segments_properly_intersect(p0, p1, q0, q1) -> bool:
    d1 = _cross(q0.x, q0.y, q1.x, q1.y, p0.x, p0.y)
    d2 = _cross(q0.x, q0.y, q1.x, q1.y, p1.x, p1.y)
    d3 = _cross(p0.x, p0.y, p1.x, p1.y, q0.x, q0.y)
    d4 = _cross(p0.x, p0.y, p1.x, p1.y, q1.x, q1.y)
    return ((d1 > _GEOM_EPS and d2 < -_GEOM_EPS) or (d1 < -_GEOM_EPS and d2 > _GEOM_EPS)) and (
        (d3 > _GEOM_EPS and d4 < -_GEOM_EPS) or (d3 < -_GEOM_EPS and d4 > _GEOM_EPS)
    )


def _self_intersects(poly: tuple[EnuPoint, ...]) -> bool:
    n = len(poly)
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or j == (i + 1) % n or (j + 1) % n == i:
                continue  # adjacent edges share a vertex by construction
            if _segments_properly_intersect(*edges[i], *edges[j]):
                return True
    return False


def point_in_polygon(p: EnuPoint, poly: tuple[EnuPoint, ...]) -> bool:
    """True iff ``p`` lies strictly inside ``poly`` (boundary counts as outside)."""
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if _on_segment(p.x, p.y, a.x, a.y, b.x, b.y):
            return False
    inside = False
    j = n - 1
    for i in range(n):
        yi, yj = poly[i].y, poly[j].y
        if (yi > p.y) != (yj > p.y):
            x_int = poly[j].x + (p.y - yj) * (poly[i].x - poly[j].x) / (yi - yj)
            if p.x < x_int:
                inside = not inside
        j = i
    return inside


def _bbox_disjoint(p0: EnuPoint, p1: EnuPoint, poly: tuple[EnuPoint, ...]) -> bool:
    xs = [v.x for v in poly]
    ys = [v.y for v in poly]
    return (
        max(p0.x, p1.x) < min(xs) - _GEOM_EPS
        or min(p0.x, p1.x) > max(xs) + _GEOM_EPS
        or max(p0.y, p1.y) < min(ys) - _GEOM_EPS
        or min(p0.y, p1.y) > max(ys) + _GEOM_EPS
    )


def _boundary_params(p0: EnuPoint, p1: EnuPoint, poly: tuple[EnuPoint, ...]) -> list[float]:
    """Parameters t in [0, 1] where segment p0->p1 meets the polygon boundary."""
    dx, dy = p1.x - p0.x, p1.y - p0.y
    seg_len2 = dx * dx + dy * dy
    ts: list[float] = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ex, ey = b.x - a.x, b.y - a.y
        denom = dx * ey - dy * ex
        rx, ry = a.x - p0.x, a.y - p0.y
        if abs(denom) > _GEOM_EPS:
            t = (rx * ey - ry * ex) / denom
            u = (rx * dy - ry * dx) / denom
            if -_GEOM_EPS <= t <= 1 + _GEOM_EPS and -_GEOM_EPS <= u <= 1 + _GEOM_EPS:
                ts.append(min(max(t, 0.0), 1.0))
        elif abs(rx * dy - ry * dx) <= _GEOM_EPS and seg_len2 > 0:
            # Collinear edge: record the overlap window endpoints.
            ta = (rx * dx + ry * dy) / seg_len2
            tb = ((b.x - p0.x) * dx + (b.y - p0.y) * dy) / seg_len2
            lo, hi = sorted((ta, tb))
            if hi >= 0.0 and lo <= 1.0:
                ts.extend((max(lo, 0.0), min(hi, 1.0)))
    return ts


def obstacle_loss_db(
    tx: EnuPoint, rx: EnuPoint, obstacles: list[Obstacle], params: ChannelParams
) -> float:
    """Wall-crossing plus interior-propagation loss along the tx->rx segment.

    Each transition between outside and inside an obstacle counts as one wall;
    the interior term is proportional to the path length spent strictly inside.
    """
    total = 0.0
    seg_len = enu_distance(tx, rx)
    for obstacle in obstacles:
        if _bbox_disjoint(tx, rx, obstacle.polygon):
            continue
        ts = _boundary_params(tx, rx, obstacle.polygon)
        cuts = sorted(set((0.0, 1.0, *ts)))
        flags = []
        for lo, hi in zip(cuts, cuts[1:]):
            if hi - lo <= 1e-12:
                continue
            mid = 0.5 * (lo + hi)
            p = EnuPoint(tx.x + mid * (rx.x - tx.x), tx.y + mid * (rx.y - tx.y))
            flags.append((point_in_polygon(p, obstacle.polygon), hi - lo))
        walls = 0
        interior = 0.0
        prev_inside = None
        for inside, span in flags:
            if prev_inside is not None and inside != prev_inside:
                walls += 1
            if inside:
                interior += span * seg_len
            prev_inside = inside
        total += params.wall_loss_db * walls + params.interior_loss_db_per_m * interior
    return total


def rssi_dbm(
    tx: EnuPoint, rx: EnuPoint, obstacles: list[Obstacle], params: ChannelParams
) -> float:
    """Received power: transmit power minus path loss minus obstacle loss."""
    return (
        params.tx_power_dbm
        - fspl_db(enu_distance(tx, rx), params.freq_hz)
        - obstacle_loss_db(tx, rx, obstacles, params)
    )


def decide_reception(rssi: float, params: ChannelParams) -> ReceptionDecision:
    """Threshold check: received iff rssi >= sensitivity and SNR >= min SNR.

    Both bounds are inclusive; the reason names the first failing check.
    """
    if not math.isfinite(rssi):
        raise ValidationError(f"RSSI must be finite, got {rssi!r}")
    snr = rssi - params.noise_floor_dbm
    if rssi < params.sensitivity_dbm:
        return ReceptionDecision(False, rssi, snr, REASON_BELOW_SENSITIVITY)
    if snr < params.min_snr_db:
        return ReceptionDecision(False, rssi, snr, REASON_BELOW_MIN_SNR)
    return ReceptionDecision(True, rssi, snr, REASON_OK)
