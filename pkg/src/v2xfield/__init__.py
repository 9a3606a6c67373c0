"""Trace-driven V2X link simulation and field-measurement comparison toolkit."""

__version__ = "0.1.0"

from .errors import BudgetExceededError, ParseError, V2xFieldError, ValidationError
from .geo import EnuPoint, GeoPoint, enu_distance, from_enu, haversine_distance, to_enu
from .propagation import (
    ChannelParams,
    Obstacle,
    ReceptionDecision,
    decide_reception,
    fspl_db,
    obstacle_loss_db,
    rssi_dbm,
)
from .records import ReceptionRecord, read_records, write_records
from .scenario import (
    Rsu,
    Scenario,
    SynthModel,
    load_scenario,
    run_simulation,
    synthesize_field_data,
)
from .trace import (
    DeviationSample,
    DeviationSummary,
    SpeedSample,
    Trace,
    TraceFix,
    enforce_speeds,
    load_trace,
    resample,
    trace_deviation,
)
from .compare import (
    ComparisonReport,
    RsuStats,
    build_report,
    ks_statistic,
    message_delta_pct,
    per_rsu_stats,
    rssi_vs_distance,
)
from .calibrate import Axis, CalibrationResult, ParamSpace, grid_search, objective
from .ingest import RawCapture, correlate_gps, parse_field_csv, parse_pcap

__all__ = [
    "Axis",
    "BudgetExceededError",
    "CalibrationResult",
    "ChannelParams",
    "ComparisonReport",
    "DeviationSample",
    "DeviationSummary",
    "EnuPoint",
    "GeoPoint",
    "Obstacle",
    "ParamSpace",
    "ParseError",
    "RawCapture",
    "ReceptionDecision",
    "ReceptionRecord",
    "Rsu",
    "RsuStats",
    "Scenario",
    "SpeedSample",
    "SynthModel",
    "Trace",
    "TraceFix",
    "V2xFieldError",
    "ValidationError",
    "build_report",
    "correlate_gps",
    "decide_reception",
    "enforce_speeds",
    "enu_distance",
    "from_enu",
    "fspl_db",
    "grid_search",
    "haversine_distance",
    "ks_statistic",
    "load_scenario",
    "load_trace",
    "message_delta_pct",
    "objective",
    "obstacle_loss_db",
    "parse_field_csv",
    "parse_pcap",
    "per_rsu_stats",
    "read_records",
    "resample",
    "rssi_dbm",
    "rssi_vs_distance",
    "run_simulation",
    "synthesize_field_data",
    "to_enu",
    "trace_deviation",
    "write_records",
]
