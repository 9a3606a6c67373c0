"""Paired per-station violins colored by message count."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from matplotlib import colormaps
from matplotlib.cm import ScalarMappable
from matplotlib.colors import Normalize
from matplotlib.figure import Figure

from .io import ExportError, list_violin_exports, read_violin_csv
from .kde import histogram_kde

# Color scale bounds for the message-count encoding.
DEFAULT_COUNT_BOUNDS = (1000, 5000)
SOURCES = ("sim", "field")
HALF_OFFSET = 0.21
HALF_WIDTH = 0.18


@dataclass
class ViolinFigureData:
    """Numbers actually rendered, for verification against the exports."""

    stations: list[int]
    quantiles: dict = field(default_factory=dict)  # (station, source) -> {p5..p95}
    counts: dict = field(default_factory=dict)  # (station, source) -> total messages
    colors: dict = field(default_factory=dict)  # (station, source) -> RGBA

    def median(self, station: int, source: str) -> float:
        return self.quantiles[(station, source)]["p50"]


def build_violin_figure(
    export_dir: str | Path,
    station_ids: list[int] | None = None,
    count_bounds: tuple[int, int] = DEFAULT_COUNT_BOUNDS,
) -> tuple[Figure, ViolinFigureData]:
    exports = list_violin_exports(export_dir)
    if not exports:
        raise ExportError(f"no violin_<id>.csv files in {export_dir}")
    if station_ids is None:
        station_ids = sorted(exports)
    missing = [sid for sid in station_ids if sid not in exports]
    if missing:
        raise ExportError(f"no violin export for station ids {missing}")

    fig = Figure(figsize=(max(8.0, 0.9 * len(station_ids)), 4.5))
    ax = fig.add_subplot(111)
    cmap = colormaps["viridis"]
    norm = Normalize(vmin=count_bounds[0], vmax=count_bounds[1], clip=True)
    data = ViolinFigureData(stations=list(station_ids))

    for i, sid in enumerate(station_ids):
        sides = read_violin_csv(exports[sid])
        for source in SOURCES:
            side = sides.get(source)
            if side is None or side.counts.sum() == 0:
                continue
            offset = i - HALF_OFFSET if source == "sim" else i + HALF_OFFSET
            grid, density = histogram_kde(side.bin_left, side.counts, side.bin_width)
            width = HALF_WIDTH * density / density.max()
            color = cmap(norm(side.total_count))
            ax.fill_betweenx(grid, offset - width, offset + width, color=color, lw=0.4)
            q = side.quantiles
            ax.vlines(offset, q["p25"], q["p75"], color="black", lw=2.2)
            ax.plot([offset], [q["p50"]], marker="o", ms=3.2, color="white", zorder=5)
            data.quantiles[(sid, source)] = dict(q)
            data.counts[(sid, source)] = side.total_count
            data.colors[(sid, source)] = color

    ax.set_xticks(range(len(station_ids)))
    ax.set_xticklabels([str(s) for s in station_ids], rotation=45)
    ax.set_xlabel("station id (left: sim, right: field)")
    ax.set_ylabel("RSSI [dBm]")
    colorbar = fig.colorbar(ScalarMappable(norm=norm, cmap=cmap), ax=ax)
    colorbar.set_label("messages received")
    ax.grid(axis="y", alpha=0.3)
    return fig, data


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="paired sim/field RSSI violins per station")
    parser.add_argument("--exports", required=True, help="directory with violin_<id>.csv files")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    parser.add_argument("--ids", help="comma-separated station ids (default: all found)")
    parser.add_argument("--count-min", type=int, default=DEFAULT_COUNT_BOUNDS[0])
    parser.add_argument("--count-max", type=int, default=DEFAULT_COUNT_BOUNDS[1])
    args = parser.parse_args(argv)
    ids = [int(x) for x in args.ids.split(",")] if args.ids else None
    try:
        fig, _ = build_violin_figure(args.exports, ids, (args.count_min, args.count_max))
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150, bbox_inches="tight")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
