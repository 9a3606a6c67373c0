"""Canonical reception records and their JSONL/CSV serialization.

Both formats carry the same fields in the same order:
``t_ms, station_id, lat, lon, rssi_dbm, source``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError
from .geo import GeoPoint

SOURCE_SIM = "sim"
SOURCE_FIELD = "field"

_FIELDS = ("t_ms", "station_id", "lat", "lon", "rssi_dbm", "source")


@dataclass(frozen=True)
class ReceptionRecord:
    """One received message: when, from which station, where, and how strong."""

    t: int
    station_id: int
    rx_pos: GeoPoint
    rssi_dbm: float
    source: str

    def __post_init__(self):
        if self.station_id < 0:
            raise ValidationError(f"station_id must be unsigned, got {self.station_id}")
        if self.source not in (SOURCE_SIM, SOURCE_FIELD):
            raise ValidationError(f"source must be 'sim' or 'field', got {self.source!r}")
        if not math.isfinite(self.rssi_dbm):
            raise ValidationError(f"rssi_dbm must be finite, got {self.rssi_dbm!r}")


def _as_row(r: ReceptionRecord) -> dict:
    return {
        "t_ms": r.t,
        "station_id": r.station_id,
        "lat": r.rx_pos.lat,
        "lon": r.rx_pos.lon,
        "rssi_dbm": r.rssi_dbm,
        "source": r.source,
    }


def _from_row(row: dict, context: str) -> ReceptionRecord:
    try:
        return ReceptionRecord(
            t=int(row["t_ms"]),
            station_id=int(row["station_id"]),
            rx_pos=GeoPoint(float(row["lat"]), float(row["lon"])),
            rssi_dbm=float(row["rssi_dbm"]),
            source=str(row["source"]),
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ParseError(f"{context}: bad record ({exc})") from None


def write_records(records: list[ReceptionRecord], path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(_as_row(r)) + "\n")
    elif fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_FIELDS)
            for r in records:
                row = _as_row(r)
                writer.writerow([row[k] for k in _FIELDS])
    else:
        raise ValidationError(f"unsupported record format {fmt!r} (expected jsonl or csv)")


def read_records(path: str | Path, format: str | None = None) -> list[ReceptionRecord]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"record file not found: {path}")
    fmt = format or path.suffix.lstrip(".").lower()
    records = []
    if fmt == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{path} line {line_no}: invalid JSON ({exc})") from None
                records.append(_from_row(obj, f"{path} line {line_no}"))
    elif fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or tuple(reader.fieldnames) != _FIELDS:
                raise ParseError(f"{path}: expected header {','.join(_FIELDS)!r}")
            for line_no, row in enumerate(reader, start=2):
                records.append(_from_row(row, f"{path} line {line_no}"))
    else:
        raise ValidationError(f"unsupported record format {fmt!r} (expected jsonl or csv)")
    return records
