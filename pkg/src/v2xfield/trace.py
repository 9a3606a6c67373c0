"""GPS traces: loading, resampling, speed derivation, and trajectory deviation."""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import median

from .errors import ParseError, ValidationError
from .geo import EnuPoint, GeoPoint, enu_distance, from_enu, haversine_distance, to_enu

# Consecutive fixes farther apart than this are treated as a recording error.
MAX_FIX_GAP_MS = 10_000


@dataclass(frozen=True)
class TraceFix:
    t: int  # milliseconds since Unix epoch, UTC
    pos: GeoPoint


@dataclass(frozen=True)
class SpeedSample:
    t: int
    speed: float  # m/s

    def __post_init__(self):
        if not (math.isfinite(self.speed) and self.speed >= 0.0):
            raise ValidationError(f"speed {self.speed!r} must be finite and >= 0")


@dataclass(frozen=True)
class DeviationSample:
    t: int
    deviation: float  # meters

    def __post_init__(self):
        if not (math.isfinite(self.deviation) and self.deviation >= 0.0):
            raise ValidationError(f"deviation {self.deviation!r} must be finite and >= 0")


@dataclass(frozen=True)
class Trace:
    """An ordered, gap-checked sequence of GPS fixes."""

    fixes: tuple[TraceFix, ...]

    def __post_init__(self):
        if not self.fixes:
            raise ValidationError("a trace needs at least one fix")
        for prev, cur in zip(self.fixes, self.fixes[1:]):
            if cur.t <= prev.t:
                raise ValidationError(f"timestamps not strictly increasing at t={cur.t}")
            if cur.t - prev.t > MAX_FIX_GAP_MS:
                raise ValidationError(
                    f"gap of {(cur.t - prev.t) / 1000.0:.3f} s between fixes "
                    f"t={prev.t} and t={cur.t} exceeds {MAX_FIX_GAP_MS / 1000.0:.0f} s"
                )

    @property
    def start_ms(self) -> int:
        return self.fixes[0].t

    @property
    def end_ms(self) -> int:
        return self.fixes[-1].t


@dataclass(frozen=True)
class DeviationSummary:
    samples: tuple[DeviationSample, ...]
    max_m: float
    median_m: float


class EnuTrack:
    """A trace projected into one planar frame, supporting interpolation in time.

    Queries outside the time span clamp to the nearest endpoint position.
    """

    def __init__(self, trace: Trace, origin: GeoPoint):
        self.origin = origin
        self.times = [f.t for f in trace.fixes]
        self.points = [to_enu(f.pos, origin) for f in trace.fixes]

    def position_at(self, t_ms: int) -> EnuPoint:
        times = self.times
        if t_ms <= times[0]:
            return self.points[0]
        if t_ms >= times[-1]:
            return self.points[-1]
        i = bisect.bisect_right(times, t_ms) - 1
        if times[i] == t_ms:
            return self.points[i]
        a, b = self.points[i], self.points[i + 1]
        w = (t_ms - times[i]) / (times[i + 1] - times[i])
        return EnuPoint(a.x + w * (b.x - a.x), a.y + w * (b.y - a.y))


def _fix_from_row(t_raw, lat_raw, lon_raw, alt_raw, line_no: int) -> TraceFix:
    try:
        t = int(t_raw)
        lat = float(lat_raw)
        lon = float(lon_raw)
        alt = float(alt_raw) if alt_raw not in (None, "") else 0.0
    except (TypeError, ValueError) as exc:
        raise ParseError(f"line {line_no}: malformed trace row ({exc})") from None
    try:
        return TraceFix(t, GeoPoint(lat, lon, alt))
    except ValidationError as exc:
        raise ParseError(f"line {line_no}: {exc}") from None


def _load_fixes_csv(path: Path) -> list[TraceFix]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty trace file") from None
        if [h.strip() for h in header] not in (["t_ms", "lat", "lon"], ["t_ms", "lat", "lon", "alt"]):
            raise ParseError(f"{path}: expected header 't_ms,lat,lon[,alt]', got {','.join(header)!r}")
        fixes = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) not in (3, 4):
                raise ParseError(f"line {line_no}: expected 3 or 4 fields, got {len(row)}")
            alt = row[3] if len(row) == 4 else ""
            fixes.append(_fix_from_row(row[0], row[1], row[2], alt, line_no))
    return fixes


def _load_fixes_jsonl(path: Path) -> list[TraceFix]:
    fixes = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {line_no}: invalid JSON ({exc})") from None
            if not isinstance(obj, dict) or "t_ms" not in obj or "lat" not in obj or "lon" not in obj:
                raise ParseError(f"line {line_no}: object must carry t_ms, lat, lon")
            fixes.append(_fix_from_row(obj["t_ms"], obj["lat"], obj["lon"], obj.get("alt"), line_no))
    return fixes


def load_trace(path: str | Path, format: str | None = None) -> Trace:
    """Read a trace from disk, sort it by timestamp, and validate it.

    ``format`` is "csv" or "jsonl"; when omitted it is taken from the file
    suffix.  Duplicate timestamps and gaps above 10 s are rejected.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"trace file not found: {path}")
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format == "csv":
        fixes = _load_fixes_csv(path)
    elif format == "jsonl":
        fixes = _load_fixes_jsonl(path)
    else:
        raise ParseError(f"unsupported trace format {format!r} (expected csv or jsonl)")
    fixes.sort(key=lambda f: f.t)
    for prev, cur in zip(fixes, fixes[1:]):
        if cur.t == prev.t:
            raise ParseError(f"{path}: duplicate timestamp t={cur.t}")
    try:
        return Trace(tuple(fixes))
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def resample(trace: Trace, dt_ms: int) -> Trace:
    """Resample onto the grid t0, t0+dt, ... <= tN.

    Positions are interpolated linearly in the planar frame (anchored at the
    first fix) and converted back; grid points that coincide with an existing
    fix reuse that fix unchanged, so resampling an already-gridded trace is
    the identity.
    """
    if dt_ms <= 0:
        raise ValidationError(f"resample interval must be positive, got {dt_ms}")
    if len(trace.fixes) == 1:
        return trace
    origin = trace.fixes[0].pos
    track = EnuTrack(trace, origin)
    by_time = {f.t: f for f in trace.fixes}
    fixes = []
    t = trace.start_ms
    while t <= trace.end_ms:
        if t in by_time:
            fixes.append(by_time[t])
        else:
            fixes.append(TraceFix(t, from_enu(track.position_at(t), origin)))
        t += dt_ms
    return Trace(tuple(fixes))


def enforce_speeds(trace: Trace) -> list[SpeedSample]:
    """Per-pair speeds: distance over elapsed time for consecutive fixes.

    Each sample carries the timestamp of the pair's first fix.
    """
    if len(trace.fixes) < 2:
        raise ValidationError("speed derivation needs at least two fixes")
    samples = []
    for cur, nxt in zip(trace.fixes, trace.fixes[1:]):
        d = haversine_distance(cur.pos, nxt.pos)
        dt_s = (nxt.t - cur.t) / 1000.0
        samples.append(SpeedSample(cur.t, d / dt_s))
    return samples


def trace_deviation(a: Trace, b: Trace) -> DeviationSummary:
    """Distance from each fix of ``a`` to ``b``'s interpolated position.

    Only fix times inside the temporal overlap are evaluated; the overlap
    must span at least one second.
    """
    lo = max(a.start_ms, b.start_ms)
    hi = min(a.end_ms, b.end_ms)
    if hi - lo < 1000:
        raise ValidationError(
            f"traces overlap for {max(hi - lo, 0) / 1000.0:.3f} s; at least 1 s is required"
        )
    origin = a.fixes[0].pos
    track_b = EnuTrack(b, origin)
    samples = []
    for fix in a.fixes:
        if fix.t < lo or fix.t > hi:
            continue
        dev = enu_distance(to_enu(fix.pos, origin), track_b.position_at(fix.t))
        samples.append(DeviationSample(fix.t, dev))
    devs = [s.deviation for s in samples]
    return DeviationSummary(tuple(samples), max(devs), median(devs))
