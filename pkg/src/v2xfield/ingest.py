"""Field-capture ingestion: classic pcap with radiotap RSSI, field CSV, GPS join.

Only the classic pcap container is supported (microsecond and nanosecond
magics, either byte order) with link-type 127 (radiotap).  The parser walks
the radiotap present-mask chain and extracts the dBm antenna-signal field,
honoring per-field alignment; packets without that field are counted and
skipped rather than failing the file.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError
from .geo import GeoPoint, from_enu
from .records import SOURCE_FIELD, ReceptionRecord
from .trace import EnuTrack, Trace

PCAP_MAGIC_US = 0xA1B2C3D4
PCAP_MAGIC_NS = 0xA1B23C4D
LINKTYPE_RADIOTAP = 127

# (size, alignment) of the radiotap fields up to and including bit 5,
# the dBm antenna-signal byte we are after.
_RADIOTAP_FIELDS = {
    0: (8, 8),  # TSFT
    1: (1, 1),  # flags
    2: (1, 1),  # rate
    3: (4, 2),  # channel (freq + flags)
    4: (2, 1),  # FHSS
    5: (1, 1),  # dBm antenna signal
}
_BIT_DBM_ANTSIGNAL = 5
_BIT_EXT = 31

# Physical plausibility window for a received-power reading.
RSSI_MIN_DBM = -120.0
RSSI_MAX_DBM = 0.0


@dataclass(frozen=True)
class RawCapture:
    """One monitor-mode packet reduced to the fields the analysis needs."""

    t: int  # epoch ms from the capture header
    rssi_dbm: float
    frame_len: int
    station_id: int | None = None


@dataclass(frozen=True)
class PcapParseResult:
    captures: tuple[RawCapture, ...]
    skipped: int  # packets without the antenna-signal field
    rejected: int  # packets whose RSSI falls outside the plausibility window


@dataclass(frozen=True)
class CorrelationResult:
    records: tuple[ReceptionRecord, ...]
    dropped: int  # captures outside the trace span by more than the skew


def _transmitter_mac(frame: bytes) -> str | None:
    # 802.11 header: frame control (2) + duration (2) + addr1 (6) + addr2 (6).
    if len(frame) < 16:
        return None
    return ":".join(f"{b:02x}" for b in frame[10:16])


def _parse_radiotap_rssi(data: bytes, index: int) -> float | None:
    """The dBm antenna-signal value of one radiotap frame, or None if absent."""
    if len(data) < 8:
        raise ParseError(f"packet {index}: truncated radiotap header")
    version, _, rt_len = struct.unpack_from("<BBH", data, 0)
    if version != 0:
        raise ParseError(f"packet {index}: unsupported radiotap version {version}")
    if rt_len > len(data):
        raise ParseError(f"packet {index}: radiotap length {rt_len} exceeds packet size {len(data)}")

    # Present-mask chain: bit 31 of each word announces another word.
    present_words = []
    offset = 4
    while True:
        if offset + 4 > rt_len:
            raise ParseError(f"packet {index}: truncated radiotap present mask")
        (word,) = struct.unpack_from("<I", data, offset)
        present_words.append(word)
        offset += 4
        if not word & (1 << _BIT_EXT):
            break

    present = present_words[0]
    if not present & (1 << _BIT_DBM_ANTSIGNAL):
        return None
    # Fields are packed after the present chain in bit order, each aligned
    # to its natural boundary relative to the start of the radiotap header.
    for bit in range(_BIT_DBM_ANTSIGNAL + 1):
        if not present & (1 << bit):
            continue
        size, align = _RADIOTAP_FIELDS[bit]
        offset += (-offset) % align
        if offset + size > rt_len:
            raise ParseError(f"packet {index}: radiotap field {bit} extends past the header")
        if bit == _BIT_DBM_ANTSIGNAL:
            return float(struct.unpack_from("<b", data, offset)[0])
        offset += size
    raise AssertionError("unreachable")


def parse_pcap(path: str | Path, bssid_map: dict[str, int] | None = None) -> PcapParseResult:
    """Extract per-packet RSSI (and optionally station ids) from a capture file.

    ``bssid_map`` maps lowercase transmitter MACs to station ids; without it
    captures carry no station_id and must be mapped before correlation.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"pcap file not found: {path}")
    data = path.read_bytes()
    if len(data) < 24:
        raise ParseError(f"{path}: too short for a pcap global header")
    (magic,) = struct.unpack_from("<I", data, 0)
    if magic in (PCAP_MAGIC_US, PCAP_MAGIC_NS):
        endian = "<"
    else:
        (magic,) = struct.unpack_from(">I", data, 0)
        if magic in (PCAP_MAGIC_US, PCAP_MAGIC_NS):
            endian = ">"
        else:
            raise ParseError(f"{path}: not a classic pcap file (bad magic)")
    subsec_per_ms = 1_000_000 if magic == PCAP_MAGIC_NS else 1_000
    _, _, _, _, _, linktype = struct.unpack_from(endian + "HHiIII", data, 4)
    if linktype != LINKTYPE_RADIOTAP:
        raise ParseError(f"{path}: link-type {linktype} is not radiotap ({LINKTYPE_RADIOTAP})")

    captures = []
    skipped = 0
    rejected = 0
    offset = 24
    index = 0
    while offset < len(data):
        if offset + 16 > len(data):
            raise ParseError(f"packet {index}: truncated packet header")
        ts_sec, ts_sub, incl_len, orig_len = struct.unpack_from(endian + "IIII", data, offset)
        offset += 16
        if offset + incl_len > len(data):
            raise ParseError(f"packet {index}: truncated packet body")
        packet = data[offset : offset + incl_len]
        offset += incl_len

        rssi = _parse_radiotap_rssi(packet, index)
        if rssi is None:
            skipped += 1
        elif not (RSSI_MIN_DBM <= rssi <= RSSI_MAX_DBM):
            rejected += 1
        else:
            station_id = None
            if bssid_map:
                rt_len = struct.unpack_from("<H", packet, 2)[0]
                mac = _transmitter_mac(packet[rt_len:])
                if mac is not None:
                    station_id = bssid_map.get(mac)
            t_ms = ts_sec * 1000 + ts_sub // subsec_per_ms
            captures.append(RawCapture(t_ms, rssi, orig_len, station_id))
        index += 1
    return PcapParseResult(tuple(captures), skipped, rejected)


def load_bssid_map(path: str | Path) -> dict[str, int]:
    """Read a `aa:bb:cc:dd:ee:ff <station_id>` mapping file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"BSSID map not found: {path}")
    mapping: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path} line {line_no}: expected 'mac station_id'")
            mac = parts[0].lower()
            if len(mac.split(":")) != 6:
                raise ParseError(f"{path} line {line_no}: malformed MAC {parts[0]!r}")
            try:
                mapping[mac] = int(parts[1])
            except ValueError:
                raise ParseError(f"{path} line {line_no}: station_id must be an integer") from None
    return mapping


def parse_field_csv(path: str | Path) -> list[ReceptionRecord]:
    """Read a pre-extracted field log with header t_ms,station_id,lat,lon,rssi_dbm."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"field CSV not found: {path}")
    expected = ("t_ms", "station_id", "lat", "lon", "rssi_dbm")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != expected:
            raise ParseError(f"{path}: expected header {','.join(expected)!r}, got {','.join(header)!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(f"line {line_no}: expected 5 fields, got {len(row)}")
            try:
                record = ReceptionRecord(
                    t=int(row[0]),
                    station_id=int(row[1]),
                    rx_pos=GeoPoint(float(row[2]), float(row[3])),
                    rssi_dbm=float(row[4]),
                    source=SOURCE_FIELD,
                )
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"line {line_no}: {exc}") from None
            records.append(record)
    records.sort(key=lambda r: (r.t, r.station_id))
    return records


def correlate_gps(
    captures: list[RawCapture], trace: Trace, max_skew_ms: int = 200
) -> CorrelationResult:
    """Join captures to interpolated trace positions at their timestamps.

    Captures more than ``max_skew_ms`` outside the trace span are dropped
    (counted, not an error); captures inside the skew but outside the span
    take the nearest endpoint position.  Every capture must carry a
    station_id by this point.
    """
    origin = trace.fixes[0].pos
    track = EnuTrack(trace, origin)
    lo = trace.start_ms - max_skew_ms
    hi = trace.end_ms + max_skew_ms
    records = []
    dropped = 0
    for cap in captures:
        if cap.t < lo or cap.t > hi:
            dropped += 1
            continue
        if cap.station_id is None:
            raise ValidationError(
                f"capture at t={cap.t} has no station_id; supply a BSSID map or mapped captures"
            )
        pos = from_enu(track.position_at(cap.t), origin)
        records.append(ReceptionRecord(cap.t, cap.station_id, pos, cap.rssi_dbm, SOURCE_FIELD))
    records.sort(key=lambda r: (r.t, r.station_id))
    return CorrelationResult(tuple(records), dropped)
