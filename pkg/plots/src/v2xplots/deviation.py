"""Vehicle path colored by the deviation from a reference trajectory."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np
from matplotlib.cm import ScalarMappable
from matplotlib.collections import LineCollection
from matplotlib.colors import Normalize
from matplotlib.figure import Figure

from .io import ExportError, read_deviation_csv

# Same scale cap as the reference deployment's worst-case mismatch.
DEFAULT_SCALE_MAX_M = 50.0


@dataclass
class DeviationFigureData:
    annotation: str
    max_m: float
    color_values: np.ndarray  # normalized [0, 1] per path segment


def build_deviation_figure(
    csv_path, scale_max_m: float = DEFAULT_SCALE_MAX_M
) -> tuple[Figure, DeviationFigureData]:
    series = read_deviation_csv(csv_path)
    max_m = float(series.deviation_m.max())
    annotation = f"max deviation: {max_m:.2f} m"

    fig = Figure(figsize=(6.4, 5.6))
    ax = fig.add_subplot(111)
    pts = np.column_stack([series.lon, series.lat])
    norm = Normalize(vmin=0.0, vmax=scale_max_m, clip=True)
    if len(pts) > 1:
        segments = np.stack([pts[:-1], pts[1:]], axis=1)
        seg_dev = 0.5 * (series.deviation_m[:-1] + series.deviation_m[1:])
        lc = LineCollection(segments, cmap="viridis", norm=norm, linewidths=2.5)
        lc.set_array(seg_dev)
        ax.add_collection(lc)
        color_values = norm(seg_dev)
    else:
        ax.plot(pts[:, 0], pts[:, 1], ".")
        color_values = norm(series.deviation_m)
    ax.set_xlim(series.lon.min() - 1e-4, series.lon.max() + 1e-4)
    ax.set_ylim(series.lat.min() - 1e-4, series.lat.max() + 1e-4)
    ax.set_xlabel("longitude [deg]")
    ax.set_ylabel("latitude [deg]")
    ax.set_title("path colored by deviation from reference")
    ax.annotate(annotation, xy=(0.02, 0.02), xycoords="axes fraction")
    colorbar = fig.colorbar(ScalarMappable(norm=norm, cmap="viridis"), ax=ax)
    colorbar.set_label("deviation [m]")
    return fig, DeviationFigureData(annotation, max_m, np.asarray(color_values))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="trace-deviation path figure")
    parser.add_argument("--input", required=True, help="deviation.csv path")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    parser.add_argument("--scale-max", type=float, default=DEFAULT_SCALE_MAX_M)
    args = parser.parse_args(argv)
    try:
        fig, _ = build_deviation_figure(args.input, args.scale_max)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150, bbox_inches="tight")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
