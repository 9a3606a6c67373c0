"""RSSI-over-distance point clouds, one panel per station."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from matplotlib.figure import Figure

from .io import ExportError, read_scatter_csv

SOURCE_STYLE = {
    "field": {"color": "tab:blue", "marker": "o"},
    "sim": {"color": "tab:orange", "marker": "o"},
}


@dataclass
class ScatterFigureData:
    stations: list[int]
    sources: dict = field(default_factory=dict)  # station -> sorted source labels
    points: dict = field(default_factory=dict)  # (station, source) -> n points
    legend_labels: list = field(default_factory=list)


def build_scatter_figure(
    export_dir: str | Path, station_ids: list[int]
) -> tuple[Figure, ScatterFigureData]:
    if not station_ids:
        raise ExportError("at least one station id is required")
    export_dir = Path(export_dir)
    ncols = min(2, len(station_ids))
    nrows = math.ceil(len(station_ids) / ncols)
    fig = Figure(figsize=(5.2 * ncols, 3.6 * nrows))
    data = ScatterFigureData(stations=list(station_ids))
    axes = fig.subplots(nrows, ncols, squeeze=False)

    labels_seen = []
    for k, sid in enumerate(station_ids):
        ax = axes[k // ncols][k % ncols]
        series = read_scatter_csv(export_dir / f"scatter_{sid}.csv")
        data.sources[sid] = sorted(series)
        for source in ("field", "sim"):
            s = series.get(source)
            if s is None:
                continue
            style = SOURCE_STYLE[source]
            ax.scatter(s.distance_m, s.rssi_dbm, s=6, alpha=0.5, label=source, **style)
            data.points[(sid, source)] = len(s.rssi_dbm)
            if source not in labels_seen:
                labels_seen.append(source)
        ax.set_title(f"station {sid}")
        ax.set_xlabel("distance [m]")
        ax.set_ylabel("RSSI [dBm]")
        ax.grid(alpha=0.3)
        ax.legend(loc="upper right")
    for k in range(len(station_ids), nrows * ncols):
        axes[k // ncols][k % ncols].set_axis_off()
    data.legend_labels = labels_seen
    fig.tight_layout()
    return fig, data


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="RSSI over distance per station")
    parser.add_argument("--exports", required=True, help="directory with scatter_<id>.csv files")
    parser.add_argument("--ids", required=True, help="comma-separated station ids")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    args = parser.parse_args(argv)
    ids = [int(x) for x in args.ids.split(",")]
    try:
        fig, _ = build_scatter_figure(args.exports, ids)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150, bbox_inches="tight")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
