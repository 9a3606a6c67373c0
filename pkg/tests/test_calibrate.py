"""Objective behavior and grid-search recovery of known channel degradations."""

import pytest

from conftest import single_rsu_scenario
from v2xfield.calibrate import (
    Axis,
    ParamSpace,
    grid_search,
    load_param_space,
    objective,
)
from v2xfield.errors import BudgetExceededError, ParseError, ValidationError
from v2xfield.scenario import SynthModel, synthesize_field_data


@pytest.fixture(scope="module")
def strong_link_scenario():
    # 5000 beacon slots, all comfortably above the decider floor.
    return single_rsu_scenario(60.0, span_ms=500_000)


class TestObjective:
    def test_self_match_scores_zero(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel())
        assert objective(s.params, 0.0, field, s) == 0.0

    def test_uncompensated_shift_scores_at_least_the_shift(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=5.48))
        assert objective(s.params, 0.0, field, s) >= 5.48

    def test_exact_compensation_cancels(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=5.48))
        assert objective(s.params, 5.48, field, s) == pytest.approx(0.0, abs=0.01)

    def test_empty_field_rejected(self, strong_link_scenario):
        with pytest.raises(ValidationError):
            objective(strong_link_scenario.params, 0.0, [], strong_link_scenario)

    def test_dead_simulation_scores_infinite(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel())
        assert objective(s.params, 80.0, field, s) == float("inf")

    def test_non_negative(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=3.0, shadowing_sigma_db=2.0))
        for extra in (0.0, 1.5, 3.0, 7.0):
            assert objective(s.params, extra, field, s) >= 0.0


class TestAxis:
    def test_values_hit_grid_points_exactly(self):
        values = Axis(0.0, 10.0, 21).values()
        assert len(values) == 21
        assert values[0] == 0.0
        assert values[11] == 5.5
        assert values[-1] == 10.0

    def test_single_step_uses_min(self):
        assert Axis(2.5, 2.5, 1).values() == [2.5]

    def test_rejects_inverted_range(self):
        with pytest.raises(ValidationError):
            Axis(3.0, 1.0, 5)


class TestGridSearch:
    def test_single_point_space(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel())
        space = ParamSpace({"extra_loss_db": Axis(0.0, 0.0, 1)})
        result = grid_search(space, field, s)
        assert result.evaluations == 1
        assert result.best_extra_loss_db == 0.0
        assert result.best_score == 0.0

    def test_noiseless_recovery_is_exact(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=5.5))
        space = ParamSpace({"extra_loss_db": Axis(0.0, 10.0, 21)})
        result = grid_search(space, field, s)
        assert result.best_extra_loss_db == 5.5
        assert result.best_score == 0.0
        assert result.evaluations == 21
        assert len(result.score_table) == 21

    def test_noisy_recovery_within_one_db(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=5.5, shadowing_sigma_db=3.0))
        assert len(field) >= 5000
        space = ParamSpace({"extra_loss_db": Axis(0.0, 10.0, 21)})
        result = grid_search(space, field, s)
        assert abs(result.best_extra_loss_db - 5.5) <= 1.0

    def test_budget_checked_before_evaluation(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel())
        space = ParamSpace({"extra_loss_db": Axis(0.0, 10.0, 10_001)})
        with pytest.raises(BudgetExceededError, match="10001"):
            grid_search(space, field, s)

    def test_adding_worse_points_keeps_the_minimizer(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=5.5))
        tight = grid_search(ParamSpace({"extra_loss_db": Axis(0.0, 10.0, 21)}), field, s)
        wide = grid_search(ParamSpace({"extra_loss_db": Axis(0.0, 12.0, 25)}), field, s)
        assert wide.best_extra_loss_db == tight.best_extra_loss_db == 5.5

    def test_tie_breaks_to_lexicographically_smallest(self, strong_link_scenario):
        # Both sensitivity values sit far below every link, so all points
        # produce identical records and tie at the same score.
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel())
        space = ParamSpace({"sensitivity_dbm": Axis(-89.0, -85.0, 3)})
        result = grid_search(space, field, s)
        assert result.best_values == {"sensitivity_dbm": -89.0}

    def test_two_axis_sweep(self, strong_link_scenario):
        s = strong_link_scenario
        field = synthesize_field_data(s, SynthModel(extra_loss_db=2.0))
        space = ParamSpace(
            {
                "extra_loss_db": Axis(0.0, 4.0, 5),
                "min_snr_db": Axis(4.0, 6.0, 2),
            }
        )
        result = grid_search(space, field, s)
        assert result.evaluations == 10
        assert result.best_values["extra_loss_db"] == 2.0


class TestParamSpaceConfig:
    def test_load(self, tmp_path):
        p = tmp_path / "cal.toml"
        p.write_text(
            "[calibration]\nbudget = 500\n\n"
            "[calibration.extra_loss_db]\nmin = 0.0\nmax = 10.0\nsteps = 21\n"
        )
        space = load_param_space(p)
        assert space.budget == 500
        assert space.axes["extra_loss_db"].steps == 21

    def test_unknown_axis_rejected(self, tmp_path):
        p = tmp_path / "cal.toml"
        p.write_text("[calibration.antenna_gain]\nmin = 0.0\nmax = 1.0\nsteps = 2\n")
        with pytest.raises(ParseError, match="antenna_gain"):
            load_param_space(p)

    def test_missing_section(self, tmp_path):
        p = tmp_path / "cal.toml"
        p.write_text("[other]\nx = 1\n")
        with pytest.raises(ParseError, match="calibration"):
            load_param_space(p)

    def test_unknown_axis_in_space(self):
        with pytest.raises(ValidationError):
            ParamSpace({"bandwidth": Axis(0.0, 1.0, 2)})
