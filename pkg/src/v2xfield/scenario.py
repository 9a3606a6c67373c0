"""Scenario configuration, beacon-schedule simulation, and synthetic field data.

A scenario is one vehicle replaying a GPS trace while every roadside unit
broadcasts on a shared 100 ms schedule.  Beacon times run from the first fix
up to (excluding) the last fix, so a trace spanning [t0, t0+1000) ms yields
ten beacons per station at the default period.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ParseError, ValidationError
from .geo import EnuPoint, GeoPoint, from_enu, to_enu
from .propagation import ChannelParams, Obstacle, decide_reception, rssi_dbm
from .records import SOURCE_FIELD, SOURCE_SIM, ReceptionRecord
from .trace import EnuTrack, Trace, load_trace


@dataclass(frozen=True)
class Rsu:
    station_id: int
    pos: GeoPoint

    def __post_init__(self):
        if self.station_id < 0:
            raise ValidationError(f"station_id must be unsigned, got {self.station_id}")


@dataclass(frozen=True)
class SynthModel:
    """Degradations applied on top of the ideal channel to fake field data.

    extra_loss_db shifts every message down uniformly; shadowing_sigma_db is
    the standard deviation of Gaussian dB noise; drop_prob removes messages
    independently before the reception decision.
    """

    extra_loss_db: float = 0.0
    shadowing_sigma_db: float = 0.0
    drop_prob: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.drop_prob <= 1.0):
            raise ValidationError(f"drop_prob must lie in [0, 1], got {self.drop_prob!r}")
        if self.shadowing_sigma_db < 0 or not math.isfinite(self.shadowing_sigma_db):
            raise ValidationError(f"shadowing sigma must be finite and >= 0, got {self.shadowing_sigma_db!r}")
        if not math.isfinite(self.extra_loss_db):
            raise ValidationError(f"extra loss must be finite, got {self.extra_loss_db!r}")


@dataclass(frozen=True)
class Scenario:
    rsus: tuple[Rsu, ...]
    trace: Trace
    obstacles: tuple[Obstacle, ...] = ()
    params: ChannelParams = field(default_factory=ChannelParams)
    beacon_period_ms: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.rsus:
            raise ValidationError("a scenario needs at least one RSU")
        if self.beacon_period_ms <= 0:
            raise ValidationError(f"beacon period must be positive, got {self.beacon_period_ms}")
        seen = set()
        for rsu in self.rsus:
            if rsu.station_id in seen:
                raise ValidationError(f"duplicate station_id {rsu.station_id}")
            seen.add(rsu.station_id)

    @property
    def enu_origin(self) -> GeoPoint:
        """Planar-frame anchor: the centroid of the RSU positions."""
        return GeoPoint(
            fmean(r.pos.lat for r in self.rsus),
            fmean(r.pos.lon for r in self.rsus),
        )

    def beacon_times(self) -> range:
        return range(self.trace.start_ms, self.trace.end_ms, self.beacon_period_ms)


def _prepared(s: Scenario):
    origin = s.enu_origin
    track = EnuTrack(s.trace, origin)
    rsus = [(r, to_enu(r.pos, origin)) for r in sorted(s.rsus, key=lambda r: r.station_id)]
    return origin, track, rsus


def run_simulation(s: Scenario, extra_loss_db: float = 0.0) -> list[ReceptionRecord]:
    """Simulate the beacon schedule and log every successfully received message.

    ``extra_loss_db`` is a flat additional attenuation subtracted from each
    message's RSSI before the reception decision (used by calibration).
    Output is sorted by (time, station_id) and is a pure function of the
    inputs: rerunning an identical scenario gives bit-identical records.
    """
    origin, track, rsus = _prepared(s)
    obstacles = list(s.obstacles)
    records = []
    for t in s.beacon_times():
        vehicle = track.position_at(t)
        rx_pos = from_enu(vehicle, origin)
        for rsu, rsu_enu in rsus:
            rssi = rssi_dbm(rsu_enu, vehicle, obstacles, s.params) - extra_loss_db
            if decide_reception(rssi, s.params).received:
                records.append(ReceptionRecord(t, rsu.station_id, rx_pos, rssi, SOURCE_SIM))
    return records


def synthesize_field_data(s: Scenario, model: SynthModel) -> list[ReceptionRecord]:
    """Generate a stand-in field dataset from the same beacon schedule.

    Per message, in a fixed order (shadowing draw, then drop draw, stations
    in ascending id per beacon time): RSSI = ideal - extra_loss + N(0, sigma);
    the message is discarded with probability drop_prob and otherwise kept iff
    it passes the reception decision.  The generator is a Mersenne Twister
    seeded from the scenario, so output is deterministic per seed.
    """
    origin, track, rsus = _prepared(s)
    obstacles = list(s.obstacles)
    rng = random.Random(s.seed)
    records = []
    for t in s.beacon_times():
        vehicle = track.position_at(t)
        rx_pos = from_enu(vehicle, origin)
        for rsu, rsu_enu in rsus:
            ideal = rssi_dbm(rsu_enu, vehicle, obstacles, s.params)
            noise = rng.gauss(0.0, model.shadowing_sigma_db)
            dropped = rng.random() < model.drop_prob
            if dropped:
                continue
            rssi = ideal - model.extra_loss_db + noise
            if decide_reception(rssi, s.params).received:
                records.append(ReceptionRecord(t, rsu.station_id, rx_pos, rssi, SOURCE_FIELD))
    return records


def _build_channel(table: dict) -> ChannelParams:
    allowed = {
        "tx_power_dbm",
        "freq_hz",
        "sensitivity_dbm",
        "noise_floor_dbm",
        "wall_loss_db",
        "interior_loss_db_per_m",
        "min_snr_db",
    }
    unknown = set(table) - allowed
    if unknown:
        raise ParseError(f"[channel]: unknown keys {sorted(unknown)}")
    return ChannelParams(**{k: float(v) for k, v in table.items()})


def _build_rsu(table: dict, index: int) -> Rsu:
    try:
        return Rsu(
            station_id=int(table["station_id"]),
            pos=GeoPoint(float(table["lat"]), float(table["lon"]), float(table.get("alt", 0.0))),
        )
    except KeyError as exc:
        raise ParseError(f"[[rsu]] #{index}: missing key {exc}") from None
    except ValidationError as exc:
        raise ParseError(f"[[rsu]] #{index}: {exc}") from None


def _build_obstacle(table: dict, index: int) -> Obstacle:
    try:
        oid = str(table["id"])
        vertices = tuple(EnuPoint(float(x), float(y)) for x, y in table["polygon"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"[[obstacle]] #{index}: malformed entry ({exc})") from None
    return Obstacle(oid, vertices)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and fully validate a TOML scenario file.

    The trace path inside [scenario] is resolved relative to the config file.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"scenario file not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: invalid TOML ({exc})") from None

    params = _build_channel(doc.get("channel", {}))
    meta = doc.get("scenario", {})
    if "trace" not in meta:
        raise ParseError(f"{path}: [scenario] must name a trace file")
    trace_path = Path(meta["trace"])
    if not trace_path.is_absolute():
        trace_path = path.parent / trace_path
    if not trace_path.exists():
        raise ParseError(f"{path}: trace file not found: {trace_path}")
    trace = load_trace(trace_path, meta.get("trace_format"))

    rsus = tuple(_build_rsu(t, i) for i, t in enumerate(doc.get("rsu", []), start=1))
    obstacles = tuple(_build_obstacle(t, i) for i, t in enumerate(doc.get("obstacle", []), start=1))
    return Scenario(
        rsus=rsus,
        trace=trace,
        obstacles=obstacles,
        params=params,
        beacon_period_ms=int(meta.get("beacon_period_ms", 100)),
        seed=int(meta.get("seed", 0)),
    )


def with_params(s: Scenario, **channel_overrides) -> Scenario:
    """A copy of the scenario with some channel parameters replaced."""
    return replace(s, params=replace(s.params, **channel_overrides))
