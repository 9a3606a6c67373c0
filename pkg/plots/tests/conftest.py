"""Builds real exports by driving the analysis CLI, then tests figures on them."""

from __future__ import annotations

import csv
import math
import subprocess
import sys
from pathlib import Path
from types import SimpleNamespace

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
DEMO = REPO_ROOT / "demo"


def run_cli(*args: str) -> str:
    result = subprocess.run(
        [sys.executable, "-m", "v2xfield", *args], capture_output=True, text=True
    )
    assert result.returncode == 0, f"v2xfield {' '.join(args)} failed: {result.stderr}"
    return result.stdout


def shift_trace_east(src: Path, dst: Path, meters: float) -> None:
    with open(src, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = ["t_ms,lat,lon"]
    for row in rows:
        lat = float(row["lat"])
        dlon = math.degrees(meters / (6_371_000.0 * math.cos(math.radians(lat))))
        out.append(f"{row['t_ms']},{row['lat']},{float(row['lon']) + dlon:.9f}")
    dst.write_text("\n".join(out) + "\n")


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory) -> SimpleNamespace:
    root = tmp_path_factory.mktemp("pipeline")
    scenario = DEMO / "scenario.toml"
    sim = root / "sim.jsonl"
    run_cli("simulate", "--scenario", str(scenario), "--out", str(sim))

    # Self comparison: a degenerate synthetic run carries the same RSSI values
    # as the simulation, relabeled as field data.
    self_field = root / "self_field.jsonl"
    run_cli("synth", "--scenario", str(scenario), "--out", str(self_field))
    self_exports = root / "self_exports"
    run_cli(
        "compare", "--sim", str(sim), "--field", str(self_field),
        "--scenario", str(scenario), "--report", str(root / "self_report.json"),
        "--export-dir", str(self_exports),
    )

    # Demo comparison: field-hardware sensitivity, flat extra loss, shadowing.
    field = root / "field.jsonl"
    run_cli(
        "synth", "--scenario", str(DEMO / "scenario_field.toml"),
        "--extra-loss", "5.48", "--sigma", "3", "--out", str(field),
    )
    demo_exports = root / "demo_exports"
    run_cli(
        "compare", "--sim", str(sim), "--field", str(field),
        "--scenario", str(scenario), "--report", str(root / "report.json"),
        "--export-dir", str(demo_exports),
    )

    # Deviation series: identical traces, and a copy shifted 10 m east.
    dev_zero = root / "deviation_zero.csv"
    run_cli("deviation", "--trace-a", str(DEMO / "trace.csv"),
            "--trace-b", str(DEMO / "trace.csv"), "--out", str(dev_zero))
    shifted = root / "trace_shifted.csv"
    shift_trace_east(DEMO / "trace.csv", shifted, 10.0)
    dev_const = root / "deviation_const.csv"
    run_cli("deviation", "--trace-a", str(DEMO / "trace.csv"),
            "--trace-b", str(shifted), "--out", str(dev_const))

    return SimpleNamespace(
        self_exports=self_exports,
        demo_exports=demo_exports,
        deviation_zero=dev_zero,
        deviation_const=dev_const,
    )
