"""Channel-parameter fitting: exhaustive grid search against field records.

The objective blends the two headline gaps (mean RSSI delta, total message
delta) with the mean per-station KS divergence.  A flat ``extra_loss_db``
attenuation is the primary knob; transmit power, sensitivity, and the SNR
threshold can be swept as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from statistics import fmean

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .compare import build_report
from .errors import BudgetExceededError, ParseError, ValidationError
from .propagation import ChannelParams
from .records import ReceptionRecord
from .scenario import Scenario, run_simulation

# Sweep axes in their documented order; ties in score resolve to the
# lexicographically smallest value tuple in this order.
AXIS_ORDER = ("tx_power_dbm", "extra_loss_db", "sensitivity_dbm", "min_snr_db")

DEFAULT_BUDGET = 10_000
DEFAULT_WEIGHTS = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValidationError(f"axis needs at least one step, got {self.steps}")
        if self.min > self.max:
            raise ValidationError(f"axis range [{self.min}, {self.max}] is inverted")

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.min]
        return [self.min + i * (self.max - self.min) / (self.steps - 1) for i in range(self.steps)]


@dataclass(frozen=True)
class ParamSpace:
    """Axes to sweep; absent axes stay fixed at the scenario's values."""

    axes: dict[str, Axis]
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        unknown = set(self.axes) - set(AXIS_ORDER)
        if unknown:
            raise ValidationError(f"unknown calibration axes {sorted(unknown)}")
        if self.budget < 1:
            raise ValidationError(f"budget must be positive, got {self.budget}")

    def point_count(self) -> int:
        n = 1
        for axis in self.axes.values():
            n *= axis.steps
        return n


@dataclass(frozen=True)
class EvaluatedPoint:
    values: dict[str, float]
    score: float


@dataclass(frozen=True)
class CalibrationResult:
    best_channel: ChannelParams
    best_extra_loss_db: float
    best_values: dict[str, float]  # swept axes only
    best_score: float
    evaluations: int
    score_table: tuple[EvaluatedPoint, ...]


def objective(
    channel: ChannelParams,
    extra_loss_db: float,
    field: list[ReceptionRecord],
    scenario: Scenario,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
) -> float:
    """Non-negative mismatch score between a simulated run and field records.

    score = w1*|mean RSSI delta| + w2*|message delta %|/100 + w3*mean(KS).
    A parameter point whose simulation receives nothing scores +inf; when the
    two sources share no station, the KS term saturates at 1.
    """
    if not field:
        raise ValidationError("calibration needs at least one field record")
    sim = run_simulation(replace(scenario, params=channel), extra_loss_db=extra_loss_db)
    if not sim:
        return math.inf
    report = build_report(sim, field, list(scenario.rsus))
    ks_values = list(report.per_rsu_ks.values())
    ks_term = fmean(ks_values) if ks_values else 1.0
    w1, w2, w3 = weights
    return (
        w1 * abs(report.mean_rssi_delta_db)
        + w2 * abs(report.total_msg_delta_pct) / 100.0
        + w3 * ks_term
    )


def grid_search(
    space: ParamSpace,
    field: list[ReceptionRecord],
    scenario: Scenario,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
) -> CalibrationResult:
    """Evaluate the objective on the full lattice and return the minimizer.

    The lattice size is checked against the budget before any evaluation.
    Evaluation order never affects the result: ties are broken toward the
    lexicographically smallest value tuple in AXIS_ORDER.
    """
    total = space.point_count()
    if total > space.budget:
        raise BudgetExceededError(
            f"grid has {total} points, exceeding the budget of {space.budget}"
        )
    active = [name for name in AXIS_ORDER if name in space.axes]
    value_lists = [space.axes[name].values() for name in active]

    table = []
    best_key = None
    best = None
    for combo in product(*value_lists):
        values = dict(zip(active, combo))
        extra_loss = values.get("extra_loss_db", 0.0)
        channel_overrides = {k: v for k, v in values.items() if k != "extra_loss_db"}
        channel = replace(scenario.params, **channel_overrides)
        score = objective(channel, extra_loss, field, scenario, weights)
        table.append(EvaluatedPoint(values, score))
        key = (score, combo)
        if best_key is None or key < best_key:
            best_key = key
            best = (channel, extra_loss, values, score)
    channel, extra_loss, values, score = best
    return CalibrationResult(
        best_channel=channel,
        best_extra_loss_db=extra_loss,
        best_values=values,
        best_score=score,
        evaluations=len(table),
        score_table=tuple(table),
    )


def load_param_space(path: str | Path) -> ParamSpace:
    """Read the [calibration] section of a TOML config into a ParamSpace."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"calibration config not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: invalid TOML ({exc})") from None
    section = doc.get("calibration")
    if section is None:
        raise ParseError(f"{path}: missing [calibration] section")
    budget = int(section.get("budget", DEFAULT_BUDGET))
    axes = {}
    for name, table in section.items():
        if name == "budget":
            continue
        if name not in AXIS_ORDER:
            raise ParseError(f"{path}: unknown calibration axis {name!r}")
        try:
            axes[name] = Axis(float(table["min"]), float(table["max"]), int(table["steps"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: axis {name!r} needs min/max/steps ({exc})") from None
        except ValidationError as exc:
            raise ParseError(f"{path}: axis {name!r}: {exc}") from None
    return ParamSpace(axes=axes, budget=budget)


def result_to_json(result: CalibrationResult) -> dict:
    best = {
        "tx_power_dbm": result.best_channel.tx_power_dbm,
        "freq_hz": result.best_channel.freq_hz,
        "sensitivity_dbm": result.best_channel.sensitivity_dbm,
        "noise_floor_dbm": result.best_channel.noise_floor_dbm,
        "wall_loss_db": result.best_channel.wall_loss_db,
        "interior_loss_db_per_m": result.best_channel.interior_loss_db_per_m,
        "min_snr_db": result.best_channel.min_snr_db,
        "extra_loss_db": result.best_extra_loss_db,
    }
    return {
        "best_params": best,
        "best_score": result.best_score,
        "evaluations": result.evaluations,
        "score_table": [{"params": p.values, "score": p.score} for p in result.score_table],
    }


def write_result_json(result: CalibrationResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result_to_json(result), indent=2) + "\n", encoding="utf-8")
