"""Shared fixtures: demo paths, pcap/radiotap byte builders, small scenarios."""

from __future__ import annotations

import struct
from pathlib import Path

import pytest

from v2xfield.geo import EnuPoint, GeoPoint, from_enu
from v2xfield.propagation import ChannelParams
from v2xfield.scenario import Rsu, Scenario
from v2xfield.trace import Trace, TraceFix

REPO_ROOT = Path(__file__).resolve().parents[1]
DEMO_DIR = REPO_ROOT / "demo"

# Radiotap field layout (size, alignment) up to the dBm antenna-signal bit,
# kept independent of the parser so fixtures act as an oracle.
RT_SIZES = {0: (8, 8), 1: (1, 1), 2: (1, 1), 3: (4, 2), 4: (2, 1), 5: (1, 1)}
PCAP_MAGIC_US = 0xA1B2C3D4
PCAP_MAGIC_NS = 0xA1B23C4D


def make_radiotap_packet(
    fields: dict[int, bytes], ext_words: int = 0, body: bytes = b""
) -> bytes:
    """Compose one radiotap frame from bit -> raw field bytes."""
    present = 0
    for bit in fields:
        present |= 1 << bit
    words = [present]
    for _ in range(ext_words):
        words[-1] |= 1 << 31
        words.append(0)
    offset = 4 + 4 * len(words)
    payload = bytearray()
    for bit in sorted(fields):
        size, align = RT_SIZES[bit]
        pad = (-offset) % align
        payload += b"\x00" * pad
        offset += pad
        assert len(fields[bit]) == size, f"bit {bit} wants {size} bytes"
        payload += fields[bit]
        offset += size
    header = struct.pack("<BBH", 0, 0, offset)
    header += b"".join(struct.pack("<I", w) for w in words)
    return header + bytes(payload) + body


def write_pcap(
    path: Path,
    packets: list[tuple[int, int, bytes]],
    linktype: int = 127,
    magic: int = PCAP_MAGIC_US,
    endian: str = "<",
    truncate_last_body: int = 0,
) -> Path:
    """Write a classic pcap; packets are (ts_sec, ts_subsec, frame bytes)."""
    out = struct.pack(endian + "IHHiIII", magic, 2, 4, 0, 0, 65535, linktype)
    for i, (ts_sec, ts_sub, frame) in enumerate(packets):
        body = frame
        if truncate_last_body and i == len(packets) - 1:
            body = frame[:-truncate_last_body]  # incl_len still claims full size
        out += struct.pack(endian + "IIII", ts_sec, ts_sub, len(frame), len(frame)) + body
    path.write_bytes(out)
    return path


def stationary_trace(pos: GeoPoint, start_ms: int = 0, span_ms: int = 1000) -> Trace:
    # Intermediate fixes keep long spans inside the 10 s gap limit.
    step = min(span_ms, 10_000)
    times = list(range(start_ms, start_ms + span_ms, step)) + [start_ms + span_ms]
    return Trace(tuple(TraceFix(t, pos) for t in dict.fromkeys(times)))


def single_rsu_scenario(
    distance_m: float,
    span_ms: int = 1000,
    params: ChannelParams | None = None,
    station_id: int = 12120,
    seed: int = 7,
) -> Scenario:
    """One RSU at the origin, a stationary vehicle ``distance_m`` east of it."""
    origin = GeoPoint(44.6300, 10.9450)
    vehicle = from_enu(EnuPoint(distance_m, 0.0), origin)
    return Scenario(
        rsus=(Rsu(station_id, origin),),
        trace=stationary_trace(vehicle, span_ms=span_ms),
        params=params or ChannelParams(),
        seed=seed,
    )


@pytest.fixture(scope="session")
def demo_dir() -> Path:
    assert DEMO_DIR.exists(), "demo data missing; run scripts/make_demo.py"
    return DEMO_DIR


@pytest.fixture(scope="session")
def demo_scenario_path(demo_dir) -> Path:
    return demo_dir / "scenario.toml"
