#!/usr/bin/env python3
"""Regenerate the bundled demo scenario under demo/.

Layout: 16 roadside units on a 20 m grid enclosed by a rectangular loop
route, plus one distant unit (station 12161) that sits beyond the simulated
decider's range but inside the range of the more sensitive field hardware
variant (scenario_field.toml).  The vehicle laps the loop at 12 m/s for
120 s with a fix every 100 ms.
"""

from __future__ import annotations

import sys
from datetime import datetime, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from v2xfield.geo import EnuPoint, GeoPoint, from_enu

OUT_DIR = Path(__file__).resolve().parents[1] / "demo"

DESIGN_ORIGIN = GeoPoint(44.6300, 10.9450)
SPEED_M_S = 12.0
HALF_SIDE = 45.0  # loop half-side, meters
DURATION_MS = 120_000
FIX_PERIOD_MS = 100
START_MS = int(datetime(2025, 6, 10, 9, 0, 0, tzinfo=timezone.utc).timestamp() * 1000)

# Seven station ids visible in public deployments of this size plus ten
# synthetic ones; 12161 is the distant unit.
GRID_IDS = [
    12103, 12108, 12112, 12117, 12120, 12125, 12127, 12128,
    12131, 12134, 12138, 12142, 12147, 12151, 12155, 12158,
]
FAR_ID = 12161
FAR_ENU = (620.0, 0.0)

SEED = 20250610


def loop_position(s: float) -> EnuPoint:
    """Point at arc length s along the counterclockwise rectangle."""
    side = 2 * HALF_SIDE
    s = s % (4 * side)
    if s < side:
        return EnuPoint(-HALF_SIDE + s, -HALF_SIDE)
    if s < 2 * side:
        return EnuPoint(HALF_SIDE, -HALF_SIDE + (s - side))
    if s < 3 * side:
        return EnuPoint(HALF_SIDE - (s - 2 * side), HALF_SIDE)
    return EnuPoint(-HALF_SIDE, HALF_SIDE - (s - 3 * side))


def write_trace(path: Path) -> None:
    lines = ["t_ms,lat,lon"]
    for k in range(DURATION_MS // FIX_PERIOD_MS + 1):
        t = k * FIX_PERIOD_MS
        pos = from_enu(loop_position(SPEED_M_S * t / 1000.0), DESIGN_ORIGIN)
        lines.append(f"{START_MS + t},{pos.lat:.9f},{pos.lon:.9f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def rsu_blocks() -> str:
    coords = [(x, y) for y in (-30.0, -10.0, 10.0, 30.0) for x in (-30.0, -10.0, 10.0, 30.0)]
    blocks = []
    for sid, (x, y) in zip(GRID_IDS, coords):
        pos = from_enu(EnuPoint(x, y), DESIGN_ORIGIN)
        blocks.append(f"[[rsu]]\nstation_id = {sid}\nlat = {pos.lat:.9f}\nlon = {pos.lon:.9f}\n")
    far = from_enu(EnuPoint(*FAR_ENU), DESIGN_ORIGIN)
    blocks.append(f"[[rsu]]\nstation_id = {FAR_ID}\nlat = {far.lat:.9f}\nlon = {far.lon:.9f}\n")
    return "\n".join(blocks)


def write_scenario(path: Path, sensitivity_dbm: float) -> None:
    text = f"""# Demo scenario: 17 roadside units, one vehicle lapping a 90 m square loop.
# Obstacle coordinates are meters east/north of the RSU-centroid origin.

[channel]
tx_power_dbm = 13.0
freq_hz = 5.9e9
sensitivity_dbm = {sensitivity_dbm}
noise_floor_dbm = -98.0
wall_loss_db = 9.0
interior_loss_db_per_m = 0.4
min_snr_db = 4.0

[scenario]
trace = "trace.csv"
beacon_period_ms = 100
seed = {SEED}

{rsu_blocks()}
[[obstacle]]
id = "north-hall"
polygon = [[-20.0, 60.0], [20.0, 60.0], [20.0, 90.0], [-20.0, 90.0]]
"""
    path.write_text(text, encoding="utf-8")


def write_calibration(path: Path) -> None:
    path.write_text(
        """[calibration]
budget = 10000

[calibration.extra_loss_db]
min = 0.0
max = 10.0
steps = 21
""",
        encoding="utf-8",
    )


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_trace(OUT_DIR / "trace.csv")
    write_scenario(OUT_DIR / "scenario.toml", sensitivity_dbm=-89.0)
    write_scenario(OUT_DIR / "scenario_field.toml", sensitivity_dbm=-97.0)
    write_calibration(OUT_DIR / "calibration.toml")
    print(f"wrote demo files to {OUT_DIR}")


if __name__ == "__main__":
    main()
