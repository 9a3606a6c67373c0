"""Readers for the export CSV schemas produced by the analysis pipeline.

Schemas (one file per station, see the main package README):
  violin_<id>.csv: source,bin_left_dbm,bin_right_dbm,count,total_count,
                   out_of_range,mean_rssi_dbm,std_rssi_db,p5,p25,p50,p75,p95
  scatter_<id>.csv: source,t_ms,distance_m,rssi_dbm
  deviation.csv:    t_ms,lat,lon,deviation_m
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

QUANTILE_KEYS = ("p5", "p25", "p50", "p75", "p95")


class ExportError(Exception):
    """An export file is missing or does not match its schema."""


@dataclass
class ViolinSide:
    source: str
    total_count: int
    out_of_range: int
    mean_rssi_dbm: float
    std_rssi_db: float
    quantiles: dict[str, float]
    bin_left: np.ndarray
    counts: np.ndarray
    bin_width: float


@dataclass
class ScatterSeries:
    source: str
    t_ms: np.ndarray
    distance_m: np.ndarray
    rssi_dbm: np.ndarray


@dataclass
class DeviationSeries:
    t_ms: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    deviation_m: np.ndarray


def list_violin_exports(export_dir: str | Path) -> dict[int, Path]:
    export_dir = Path(export_dir)
    found = {}
    for path in sorted(export_dir.glob("violin_*.csv")):
        match = re.fullmatch(r"violin_(\d+)\.csv", path.name)
        if match:
            found[int(match.group(1))] = path
    return found


def read_violin_csv(path: str | Path) -> dict[str, ViolinSide]:
    path = Path(path)
    if not path.exists():
        raise ExportError(f"violin export not found: {path}")
    rows_by_source: dict[str, list[dict]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row.get("source") is None:
                raise ExportError(f"{path}: missing source column")
            rows_by_source.setdefault(row["source"], []).append(row)
    sides = {}
    for source, rows in rows_by_source.items():
        try:
            first = rows[0]
            left = np.array([float(r["bin_left_dbm"]) for r in rows])
            right0 = float(first["bin_right_dbm"])
            sides[source] = ViolinSide(
                source=source,
                total_count=int(first["total_count"]),
                out_of_range=int(first["out_of_range"]),
                mean_rssi_dbm=float(first["mean_rssi_dbm"]),
                std_rssi_db=float(first["std_rssi_db"]),
                quantiles={k: float(first[k]) for k in QUANTILE_KEYS},
                bin_left=left,
                counts=np.array([int(r["count"]) for r in rows]),
                bin_width=right0 - float(first["bin_left_dbm"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ExportError(f"{path}: malformed violin export ({exc})") from None
    if not sides:
        raise ExportError(f"{path}: no rows")
    return sides


def read_scatter_csv(path: str | Path) -> dict[str, ScatterSeries]:
    path = Path(path)
    if not path.exists():
        raise ExportError(f"scatter export not found: {path}")
    data: dict[str, list[tuple[float, float, float]]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                data.setdefault(row["source"], []).append(
                    (float(row["t_ms"]), float(row["distance_m"]), float(row["rssi_dbm"]))
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ExportError(f"{path}: malformed scatter export ({exc})") from None
    series = {}
    for source, rows in data.items():
        arr = np.array(rows)
        series[source] = ScatterSeries(source, arr[:, 0], arr[:, 1], arr[:, 2])
    if not series:
        raise ExportError(f"{path}: no rows")
    return series


def read_deviation_csv(path: str | Path) -> DeviationSeries:
    path = Path(path)
    if not path.exists():
        raise ExportError(f"deviation export not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                rows.append(
                    (float(row["t_ms"]), float(row["lat"]), float(row["lon"]),
                     float(row["deviation_m"]))
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ExportError(f"{path}: malformed deviation export ({exc})") from None
    if not rows:
        raise ExportError(f"{path}: no rows")
    arr = np.array(rows)
    return DeviationSeries(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
