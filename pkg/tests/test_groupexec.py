import pytest
from pydantic import ValidationError

from src.channelize import caa_forward
from src.core import InfeasibleBudgetError, PlanError, ShapeError
from src.groupexec import grouped_caa, measure, padding_for, plan
from src.schemas import AttnDims, GateConfig, GateStage, GroupPlan
from src.tensor import DType, Rng, reshape, slice_axis
from src.utils import init_attn_params, init_gate_params, init_input
from tests.helpers import assert_close


def _setup(height: int, width: int = 5, channels: int = 3, *, batch: int = 2, dtype=DType.FLOAT64):
    rng = Rng(11)
    dims = AttnDims(
        height=height, width=width, channels=channels, query_channels=channels, value_channels=channels
    )
    config = GateConfig(depth=2, width=4)
    x = init_input(rng, dims, batch=batch, dtype=dtype)
    params = init_attn_params(rng, dims, dtype)
    gc = init_gate_params(rng, GateStage.COLUMN, channels, config, dtype)
    gr = init_gate_params(rng, GateStage.ROW, channels, config, dtype)
    return x, params, gc, gr


class TestPlanner:
    @pytest.mark.parametrize("height, groups, padding", [(33, 4, 3), (32, 4, 0), (5, 7, 2), (1, 1, 0)])
    def test_padding(self, height, groups, padding):
        assert padding_for(height, groups) == padding

    def test_ranges_cover_padded_rows(self):
        p = plan(33, groups=4)
        assert p.padding == 3
        assert p.rows_per_group == 9
        assert p.ranges == [(0, 9), (9, 18), (18, 27), (27, 36)]
        assert p.predicted_peak_elements is None

    def test_real_ranges_skip_padding_only_groups(self):
        p = plan(5, groups=4)
        assert p.ranges == [(0, 2), (2, 4), (4, 6), (6, 8)]
        assert p.real_ranges == [(0, 2), (2, 4), (4, 5)]

    def test_prediction_needs_dims(self):
        dims = AttnDims.square(8, 2)
        p = plan(8, groups=2, dims=dims)
        assert p.group_buffer_elements == 2 * 4 * 8 * 8 * 2
        assert p.predicted_peak_elements == p.group_buffer_elements + p.stat_buffer_elements

    def test_prediction_never_grows_with_groups(self):
        dims = AttnDims.square(17, 4)
        peaks = [plan(17, groups=g, dims=dims, gate_width=4).predicted_peak_elements for g in range(1, 20)]
        assert peaks == sorted(peaks, reverse=True)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"groups": 2, "memory_budget": 10**6},
            {"groups": 0},
            {"memory_budget": 10**6},
            {"groups": 2, "dims": AttnDims.square(4, 2)},
        ],
    )
    def test_invalid_requests(self, kwargs):
        with pytest.raises(PlanError):
            plan(8, **kwargs)

    def test_non_positive_height(self):
        with pytest.raises(PlanError):
            plan(0, groups=1)

    def test_budget_picks_smallest_group_count(self):
        dims = AttnDims.square(16, 4)
        target = plan(16, groups=4, dims=dims)
        chosen = plan(16, memory_budget=target.predicted_peak_elements * 4, dims=dims, dtype="float32")
        assert chosen.groups <= 4
        assert chosen.predicted_peak_elements <= target.predicted_peak_elements
        if chosen.groups > 1:
            smaller = plan(16, groups=chosen.groups - 1, dims=dims)
            assert smaller.predicted_peak_elements > target.predicted_peak_elements

    def test_infeasible_budget(self):
        with pytest.raises(InfeasibleBudgetError):
            plan(16, memory_budget=8, dims=AttnDims.square(16, 4))

    def test_plan_validation(self):
        with pytest.raises(ValidationError):
            GroupPlan(groups=4, height=33, padding=1, rows_per_group=9, ranges=[(0, 9)])
        with pytest.raises(ValidationError):
            GroupPlan(
                groups=2, height=4, padding=0, rows_per_group=2, ranges=[(0, 2), (1, 3)]
            )


class TestGroupedExecution:
    @pytest.mark.parametrize("height", [5, 33])
    def test_single_group_matches_reference(self, height):
        x, params, gc, gr = _setup(height)
        y = grouped_caa(x, params, gc, gr, plan(height, groups=1))
        assert y.shape == (2, 3, height, 5)
        for s in range(2):
            sample = reshape(slice_axis(x, 0, s, s + 1), (3, height, 5))
            expected = caa_forward(sample, params, gc, gr)
            assert_close(reshape(slice_axis(y, 0, s, s + 1), expected.shape), expected, 1e-12)

    @pytest.mark.parametrize("dtype", [DType.FLOAT64, DType.FLOAT32])
    @pytest.mark.parametrize("height", [5, 33])
    def test_bitwise_across_group_counts(self, height, dtype):
        x, params, gc, gr = _setup(height, dtype=dtype)
        reference = grouped_caa(x, params, gc, gr, plan(height, groups=1)).numpy().tobytes()
        for groups in (2, 3, 4, 7, height):
            y = grouped_caa(x, params, gc, gr, plan(height, groups=groups))
            assert y.numpy().tobytes() == reference, f"G={groups}"

    def test_bypass_gates(self):
        x, params, _, _ = _setup(6)
        gc = init_gate_params(Rng(1), GateStage.COLUMN, 3, bypass=True)
        gr = init_gate_params(Rng(1), GateStage.ROW, 3, bypass=True)
        one = grouped_caa(x, params, gc, gr, plan(6, groups=1)).numpy().tobytes()
        assert grouped_caa(x, params, gc, gr, plan(6, groups=4)).numpy().tobytes() == one

    def test_rejects_wrong_layout(self):
        x, params, gc, gr = _setup(5)
        single = reshape(slice_axis(x, 0, 0, 1), (3, 5, 5))
        with pytest.raises(ShapeError):
            grouped_caa(single, params, gc, gr, plan(5, groups=1))

    def test_rejects_plan_for_other_height(self):
        x, params, gc, gr = _setup(5)
        with pytest.raises(PlanError):
            grouped_caa(x, params, gc, gr, plan(6, groups=2))


class TestMeasure:
    def test_stats_per_group_count(self):
        x, params, gc, gr = _setup(8, batch=3)
        stats = measure(x, params, (gc, gr), [1, 2, 3], repeats=2)
        assert [s.groups for s in stats] == [1, 2, 3]
        assert [s.groups_executed for s in stats] == [3, 6, 9]
        assert [s.padding for s in stats] == [0, 0, 1]
        assert all(s.repeats == 2 and s.wall_time >= 0 for s in stats)

    def test_peak_bounded_and_scales(self):
        dims = AttnDims.square(16, 4)
        rng = Rng(3)
        config = GateConfig(depth=2, width=4)
        x = init_input(rng, dims, batch=1, dtype="float32")
        params = init_attn_params(rng, dims, "float32")
        gc = init_gate_params(rng, GateStage.COLUMN, 4, config, "float32")
        gr = init_gate_params(rng, GateStage.ROW, 4, config, "float32")

        stats = {s.groups: s for s in measure(x, params, (gc, gr), [1, 2, 4], repeats=1)}
        base = stats[1].peak_intermediate_elements

        for groups, s in stats.items():
            assert s.peak_intermediate_elements <= s.predicted_peak_elements
            stat = plan(16, groups=groups, dims=dims, gate_width=4).stat_buffer_elements
            assert abs(s.peak_intermediate_elements - base / groups) <= stat

    def test_peak_never_grows_with_groups(self):
        # H=17 deixa padding grande em G=8 (7 linhas) e G=16 (15 linhas)
        dims = AttnDims.square(17, 4)
        rng = Rng(5)
        config = GateConfig(depth=2, width=4)
        x = init_input(rng, dims, batch=1, dtype="float32")
        params = init_attn_params(rng, dims, "float32")
        gc = init_gate_params(rng, GateStage.COLUMN, 4, config, "float32")
        gr = init_gate_params(rng, GateStage.ROW, 4, config, "float32")

        stats = measure(x, params, (gc, gr), [1, 2, 4, 8, 16], repeats=1)
        assert [s.padding for s in stats] == [0, 1, 3, 7, 15]
        assert [s.groups_executed for s in stats] == [1, 2, 4, 6, 9]

        measured = [s.peak_intermediate_elements for s in stats]
        predicted = [s.predicted_peak_elements for s in stats]
        assert measured == sorted(measured, reverse=True)
        assert predicted == sorted(predicted, reverse=True)
        assert all(m <= p for m, p in zip(measured, predicted, strict=True))

    def test_peak_is_deterministic(self):
        x, params, gc, gr = _setup(6, batch=1)
        first = measure(x, params, (gc, gr), [2], repeats=1)[0]
        second = measure(x, params, (gc, gr), [2], repeats=1)[0]
        assert first.peak_intermediate_elements == second.peak_intermediate_elements

    def test_empty_group_list(self):
        x, params, gc, gr = _setup(4)
        with pytest.raises(PlanError):
            measure(x, params, (gc, gr), [])
