"""Sim-vs-field analysis: per-station distributions, deltas, KS, exports.

The CSV exports written here (violin_<id>.csv, scatter_<id>.csv,
deviation.csv) are the contract consumed by the plotting package; their
column layouts are documented in the README and must stay stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean, pstdev

from .errors import ValidationError
from .geo import haversine_distance
from .records import SOURCE_FIELD, SOURCE_SIM, ReceptionRecord
from .scenario import Rsu
from .trace import DeviationSummary, Trace

HIST_MIN_DBM = -100.0
HIST_MAX_DBM = -30.0
HIST_BIN_DB = 1.0
HIST_BINS = int((HIST_MAX_DBM - HIST_MIN_DBM) / HIST_BIN_DB)

_QUANTILE_KEYS = ("p5", "p25", "p50", "p75", "p95")
_QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)

REPORT_SCHEMA = "v2xfield.compare/1"


@dataclass(frozen=True)
class RsuStats:
    station_id: int
    count: int
    mean_rssi_dbm: float
    std_rssi_db: float
    quantiles: dict[str, float]
    histogram: tuple[int, ...]  # 1 dB bins over [-100, -30)
    out_of_range: int


@dataclass(frozen=True)
class RsuPair:
    station_id: int
    sim: RsuStats | None
    field: RsuStats | None
    ks: float | None  # present only when both sides have samples


@dataclass(frozen=True)
class ComparisonReport:
    per_rsu: tuple[RsuPair, ...]
    total_msg_delta_pct: float
    mean_rssi_sim_dbm: float
    mean_rssi_field_dbm: float
    mean_rssi_delta_db: float
    per_rsu_ks: dict[int, float]


def _nearest_rank(sorted_sample: list[float], q: float) -> float:
    rank = max(1, math.ceil(q * len(sorted_sample)))
    return sorted_sample[rank - 1]


def _stats_for(station_id: int, values: list[float]) -> RsuStats:
    ordered = sorted(values)
    histogram = [0] * HIST_BINS
    out_of_range = 0
    for v in values:
        idx = math.floor((v - HIST_MIN_DBM) / HIST_BIN_DB)
        if 0 <= idx < HIST_BINS:
            histogram[idx] += 1
        else:
            out_of_range += 1
    return RsuStats(
        station_id=station_id,
        count=len(values),
        mean_rssi_dbm=fmean(values),
        std_rssi_db=pstdev(values),
        quantiles={k: _nearest_rank(ordered, q) for k, q in zip(_QUANTILE_KEYS, _QUANTILE_LEVELS)},
        histogram=tuple(histogram),
        out_of_range=out_of_range,
    )


def per_rsu_stats(records: list[ReceptionRecord]) -> list[RsuStats]:
    """Distribution summary per station id, sorted by id; empty input allowed."""
    groups: dict[int, list[float]] = {}
    for r in records:
        groups.setdefault(r.station_id, []).append(r.rssi_dbm)
    return [_stats_for(sid, vals) for sid, vals in sorted(groups.items())]


def message_delta_pct(sim_count: int, real_count: int) -> float:
    """Percent message-count difference, relative to the field count.

    Negative means the field dataset received more messages.
    """
    if real_count <= 0:
        raise ValidationError("field message count must be positive for a percent delta")
    return 100.0 * (sim_count - real_count) / real_count


def ks_statistic(a: list[float], b: list[float]) -> float:
    """Two-sample Kolmogorov-Smirnov D via an exact merged sweep."""
    if not a or not b:
        raise ValidationError("KS statistic needs two non-empty samples")
    xs, ys = sorted(a), sorted(b)
    n, m = len(xs), len(ys)
    i = j = 0
    d = 0.0
    while i < n or j < m:
        if j >= m or (i < n and xs[i] <= ys[j]):
            x = xs[i]
        else:
            x = ys[j]
        while i < n and xs[i] <= x:
            i += 1
        while j < m and ys[j] <= x:
            j += 1
        d = max(d, abs(i / n - j / m))
    return d


def rssi_vs_distance(
    records: list[ReceptionRecord], rsus: list[Rsu]
) -> list[tuple[int, float, float]]:
    """(station_id, distance to its RSU in meters, rssi) per record.

    Ordered by (station_id, time); unknown station ids are an error.
    """
    by_id = {r.station_id: r for r in rsus}
    out = []
    for rec in sorted(records, key=lambda r: (r.station_id, r.t)):
        rsu = by_id.get(rec.station_id)
        if rsu is None:
            raise ValidationError(f"record references unknown station_id {rec.station_id}")
        out.append((rec.station_id, haversine_distance(rec.rx_pos, rsu.pos), rec.rssi_dbm))
    return out


def build_report(
    sim: list[ReceptionRecord], field: list[ReceptionRecord], rsus: list[Rsu]
) -> ComparisonReport:
    """Assemble the full comparison: per-station pairs plus the global deltas."""
    if not sim or not field:
        raise ValidationError("comparison needs at least one record in each source")
    known = {r.station_id for r in rsus}
    for rec in (*sim, *field):
        if rec.station_id not in known:
            raise ValidationError(f"record references unknown station_id {rec.station_id}")

    sim_stats = {s.station_id: s for s in per_rsu_stats(sim)}
    field_stats = {s.station_id: s for s in per_rsu_stats(field)}
    sim_values: dict[int, list[float]] = {}
    field_values: dict[int, list[float]] = {}
    for r in sim:
        sim_values.setdefault(r.station_id, []).append(r.rssi_dbm)
    for r in field:
        field_values.setdefault(r.station_id, []).append(r.rssi_dbm)

    pairs = []
    per_rsu_ks = {}
    for sid in sorted(set(sim_stats) | set(field_stats)):
        ks = None
        if sid in sim_values and sid in field_values:
            ks = ks_statistic(sim_values[sid], field_values[sid])
            per_rsu_ks[sid] = ks
        pairs.append(RsuPair(sid, sim_stats.get(sid), field_stats.get(sid), ks))

    mean_sim = fmean(r.rssi_dbm for r in sim)
    mean_field = fmean(r.rssi_dbm for r in field)
    return ComparisonReport(
        per_rsu=tuple(pairs),
        total_msg_delta_pct=message_delta_pct(len(sim), len(field)),
        mean_rssi_sim_dbm=mean_sim,
        mean_rssi_field_dbm=mean_field,
        mean_rssi_delta_db=mean_sim - mean_field,
        per_rsu_ks=per_rsu_ks,
    )


def _stats_payload(stats: RsuStats | None) -> dict:
    if stats is None:
        return {"count": 0}
    return {
        "count": stats.count,
        "mean_rssi_dbm": stats.mean_rssi_dbm,
        "std_rssi_db": stats.std_rssi_db,
        "quantiles": stats.quantiles,
        "histogram": list(stats.histogram),
        "out_of_range": stats.out_of_range,
    }


def report_to_json(report: ComparisonReport) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "total_msg_delta_pct": report.total_msg_delta_pct,
        "mean_rssi_sim_dbm": report.mean_rssi_sim_dbm,
        "mean_rssi_field_dbm": report.mean_rssi_field_dbm,
        "mean_rssi_delta_db": report.mean_rssi_delta_db,
        "histogram_bins": {"min_dbm": HIST_MIN_DBM, "max_dbm": HIST_MAX_DBM, "width_db": HIST_BIN_DB},
        "per_rsu": [
            {
                "station_id": p.station_id,
                "ks": p.ks,
                "sim": _stats_payload(p.sim),
                "field": _stats_payload(p.field),
            }
            for p in report.per_rsu
        ],
    }


def write_report_json(report: ComparisonReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report_to_json(report), indent=2) + "\n", encoding="utf-8")


_VIOLIN_HEADER = (
    "source,bin_left_dbm,bin_right_dbm,count,total_count,out_of_range,"
    "mean_rssi_dbm,std_rssi_db,p5,p25,p50,p75,p95"
)


def write_violin_csvs(report: ComparisonReport, out_dir: str | Path) -> list[Path]:
    """One violin_<id>.csv per station: histogram rows with the summary repeated."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for pair in report.per_rsu:
        path = out_dir / f"violin_{pair.station_id}.csv"
        lines = [_VIOLIN_HEADER]
        for source, stats in ((SOURCE_SIM, pair.sim), (SOURCE_FIELD, pair.field)):
            if stats is None:
                continue
            q = stats.quantiles
            for i, count in enumerate(stats.histogram):
                left = HIST_MIN_DBM + i * HIST_BIN_DB
                lines.append(
                    f"{source},{left},{left + HIST_BIN_DB},{count},{stats.count},"
                    f"{stats.out_of_range},{stats.mean_rssi_dbm},{stats.std_rssi_db},"
                    f"{q['p5']},{q['p25']},{q['p50']},{q['p75']},{q['p95']}"
                )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written


def write_scatter_csvs(
    sim: list[ReceptionRecord],
    field: list[ReceptionRecord],
    rsus: list[Rsu],
    out_dir: str | Path,
) -> list[Path]:
    """One scatter_<id>.csv per station: source,t_ms,distance_m,rssi_dbm rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_id = {r.station_id: r for r in rsus}
    rows: dict[int, list[str]] = {}
    for records in (sim, field):
        for rec in sorted(records, key=lambda r: (r.station_id, r.t)):
            rsu = by_id.get(rec.station_id)
            if rsu is None:
                raise ValidationError(f"record references unknown station_id {rec.station_id}")
            d = haversine_distance(rec.rx_pos, rsu.pos)
            rows.setdefault(rec.station_id, []).append(f"{rec.source},{rec.t},{d},{rec.rssi_dbm}")
    written = []
    for sid, lines in sorted(rows.items()):
        path = out_dir / f"scatter_{sid}.csv"
        path.write_text("\n".join(["source,t_ms,distance_m,rssi_dbm", *lines]) + "\n", encoding="utf-8")
        written.append(path)
    return written


def write_deviation_csv(trace_a: Trace, summary: DeviationSummary, path: str | Path) -> None:
    """Deviation series joined back to the reference trace's positions."""
    pos_by_t = {f.t: f.pos for f in trace_a.fixes}
    lines = ["t_ms,lat,lon,deviation_m"]
    for s in summary.samples:
        pos = pos_by_t[s.t]
        lines.append(f"{s.t},{pos.lat},{pos.lon},{s.deviation}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
