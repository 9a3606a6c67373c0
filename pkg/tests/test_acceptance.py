"""Acceptance gate: every release criterion at its stated tolerance.

Each test prints one `ACCEPTANCE PASS: ...` line (visible with `pytest -s`);
a pytest failure on any test here is an acceptance failure.
"""

import hashlib
import json
import math
import random
import re
import struct
import time

import pytest

from conftest import DEMO_DIR, make_radiotap_packet, single_rsu_scenario, write_pcap
from v2xfield.calibrate import Axis, ParamSpace, grid_search
from v2xfield.cli import main
from v2xfield.errors import ParseError
from v2xfield.geo import EnuPoint, GeoPoint, enu_distance, from_enu, haversine_distance, to_enu
from v2xfield.ingest import parse_pcap
from v2xfield.propagation import fspl_db
from v2xfield.records import read_records
from v2xfield.scenario import SynthModel, load_scenario, run_simulation, synthesize_field_data
from v2xfield.trace import Trace, TraceFix, trace_deviation

SCENARIO = DEMO_DIR / "scenario.toml"


def ok(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_fspl_oracle():
    assert fspl_db(1.0, 5.9e9) == pytest.approx(47.87, abs=0.01)
    assert fspl_db(100.0, 5.9e9) == pytest.approx(87.87, abs=0.01)
    rng = random.Random(101)
    for _ in range(1000):
        d = rng.uniform(1.0, 10_000.0)
        assert abs((fspl_db(2 * d, 5.9e9) - fspl_db(d, 5.9e9)) - 6.0206) < 1e-6
    ok("FSPL oracle (1 m, 100 m, doubling rule over 1000 distances)")


def test_reception_boundary_by_bisection():
    def received_at(distance: float) -> bool:
        return bool(run_simulation(single_rsu_scenario(distance, span_ms=1000)))

    lo, hi = 400.0, 600.0
    assert received_at(lo) and not received_at(hi)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if received_at(mid):
            lo = mid
        else:
            hi = mid
    boundary = 0.5 * (lo + hi)
    assert boundary == pytest.approx(509.4, abs=0.5)
    ok(f"reception boundary {boundary:.2f} m within 509.4 +/- 0.5 m")


def test_simulate_and_synth_are_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        assert main(["simulate", "--scenario", str(SCENARIO), "--out", str(out)]) == 0
    assert sha256(a) == sha256(b)

    c, d = tmp_path / "c.jsonl", tmp_path / "d.jsonl"
    synth_args = ["synth", "--scenario", str(SCENARIO), "--extra-loss", "5.48",
                  "--sigma", "3", "--drop", "0.1788"]
    for out in (c, d):
        assert main(synth_args + ["--out", str(out)]) == 0
    assert sha256(c) == sha256(d)
    ok("simulate and synth outputs are byte-identical across runs")


def test_pcap_fixtures(tmp_path):
    packets = [
        (10, 0, make_radiotap_packet({5: bytes([0xBA])})),
        (11, 0, make_radiotap_packet({5: bytes([0xB0])})),
        (12, 0, make_radiotap_packet({5: bytes([0xA6])})),
    ]
    result = parse_pcap(write_pcap(tmp_path / "three.pcap", packets))
    assert [c.rssi_dbm for c in result.captures] == [-70.0, -80.0, -90.0]

    with pytest.raises(ParseError, match="link-type 105"):
        parse_pcap(write_pcap(tmp_path / "wrong.pcap", packets, linktype=105))

    with pytest.raises(ParseError, match="packet 2"):
        parse_pcap(write_pcap(tmp_path / "short.pcap", packets, truncate_last_body=3))
    ok("pcap fixtures: exact RSSI bytes, link-type and truncation errors")


def test_paper_gap_reconstruction(tmp_path, capsys):
    sim_path = tmp_path / "sim.jsonl"
    field_path = tmp_path / "field.jsonl"
    report_path = tmp_path / "report.json"
    assert main(["simulate", "--scenario", str(SCENARIO), "--out", str(sim_path)]) == 0
    assert main(
        ["synth", "--scenario", str(SCENARIO), "--extra-loss", "5.48", "--sigma", "3",
         "--drop", "0.1788", "--out", str(field_path)]
    ) == 0
    assert len(read_records(field_path)) >= 10_000
    capsys.readouterr()
    assert main(
        ["compare", "--sim", str(sim_path), "--field", str(field_path),
         "--scenario", str(SCENARIO), "--report", str(report_path)]
    ) == 0
    out = capsys.readouterr().out
    match = re.search(r"msg_delta_pct=(-?\d+\.\d+) mean_rssi_delta_db=(-?\d+\.\d+)", out)
    assert match, out
    msg_delta = float(match.group(1))
    mean_delta = float(match.group(2))
    assert mean_delta == pytest.approx(5.48, abs=0.10)
    assert msg_delta == pytest.approx(21.77, abs=1.5)
    ok(
        f"headline gaps reconstructed: mean_rssi_delta={mean_delta:.2f} dB "
        f"(5.48 +/- 0.10), msg_delta={msg_delta:.2f}% (21.77 +/- 1.5)"
    )


def test_calibration_recovery():
    started = time.monotonic()
    scenario = load_scenario(SCENARIO)
    space = ParamSpace({"extra_loss_db": Axis(0.0, 10.0, 21)})

    clean = synthesize_field_data(scenario, SynthModel(extra_loss_db=5.5))
    exact = grid_search(space, clean, scenario)
    assert exact.best_extra_loss_db == 5.5

    noisy = synthesize_field_data(scenario, SynthModel(extra_loss_db=5.5, shadowing_sigma_db=3.0))
    assert len(noisy) >= 5000
    fitted = grid_search(space, noisy, scenario)
    assert abs(fitted.best_extra_loss_db - 5.5) <= 1.0

    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    ok(
        f"calibration recovery: exact 5.5 dB noiseless, {fitted.best_extra_loss_db:.1f} dB "
        f"under 3 dB shadowing, in {elapsed:.1f} s"
    )


def test_comparison_oracles():
    from v2xfield.compare import ks_statistic, message_delta_pct

    def brute_force(a, b):
        pts = sorted(set(a) | set(b))
        return max(
            abs(sum(v <= x for v in a) / len(a) - sum(v <= x for v in b) / len(b)) for x in pts
        )

    rng = random.Random(211)
    for _ in range(1000):
        n, m = rng.randint(1, 50), rng.randint(1, 50)
        a = [round(rng.uniform(-95, -55), rng.choice([0, 1])) for _ in range(n)]
        b = [round(rng.uniform(-95, -55), rng.choice([0, 1])) for _ in range(m)]
        assert ks_statistic(a, b) == brute_force(a, b)

    assert message_delta_pct(8212, 10_000) == -17.88
    ok("comparison oracles: KS equals brute force on 1000 samples; -17.88 exact")


def test_trace_properties():
    origin = GeoPoint(44.6300, 10.9450)

    def track(offset_x: float) -> Trace:
        fixes = [
            TraceFix(k * 100, from_enu(EnuPoint(offset_x + 1.2 * k, 0.0), origin))
            for k in range(100)
        ]
        return Trace(tuple(fixes))

    a = track(0.0)
    self_dev = trace_deviation(a, a)
    assert self_dev.max_m == 0.0 and all(s.deviation == 0.0 for s in self_dev.samples)

    b = Trace(tuple(
        TraceFix(f.t, from_enu(EnuPoint(to_enu(f.pos, origin).x + 10.0, 0.0), origin))
        for f in a.fixes
    ))
    offset_dev = trace_deviation(a, b)
    for s in offset_dev.samples:
        assert s.deviation == pytest.approx(10.0, abs=0.05)

    rng = random.Random(307)
    worst = 0.0
    for _ in range(10_000):
        anchor = GeoPoint(rng.uniform(-55.0, 55.0), rng.uniform(-170.0, 170.0))
        p = from_enu(EnuPoint(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)), anchor)
        q = from_enu(EnuPoint(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)), anchor)
        enu = enu_distance(to_enu(p, anchor), to_enu(q, anchor))
        worst = max(worst, abs(enu - haversine_distance(p, q)))
    assert worst < 0.5
    ok(f"trace properties: self-deviation 0, offset 10 m, ENU agreement {worst:.3f} m < 0.5 m")
