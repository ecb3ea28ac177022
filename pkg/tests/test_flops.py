from fractions import Fraction

import pytest

from src.kernels import flops
from src.schemas import AttentionKind, AttnDims, GateConfig
from src.services import GATE_SWEEP_DIMS, FlopReporter


def _dims(h: int, w: int, c: int = 8, cq: int | None = None, cv: int | None = None) -> AttnDims:
    return AttnDims(height=h, width=w, channels=c, query_channels=cq or c, value_channels=cv or c)


class TestCostModel:
    def test_small_example(self):
        dims = _dims(4, 4, 1)
        assert flops("self", dims).attention_macs == 512
        assert flops("axial", dims).attention_macs == 256

    @pytest.mark.parametrize("h, w", [(1, 1), (3, 5), (16, 16), (33, 33), (64, 17)])
    def test_axial_to_self_ratio(self, h, w):
        dims = _dims(h, w, 6, 3, 5)
        ratio = Fraction(flops("axial", dims).attention_macs, flops("self", dims).attention_macs)
        assert ratio == Fraction(h + w, h * w)

    def test_doubling_resolution(self):
        small, large = _dims(5, 7), _dims(10, 14)
        assert flops("self", large).attention_macs == 16 * flops("self", small).attention_macs
        assert flops("axial", large).attention_macs == 8 * flops("axial", small).attention_macs

    def test_projection_counts(self):
        dims = _dims(2, 3, 4, 2, 5)
        assert flops("self", dims).projection_macs == 6 * 4 * (2 + 5)
        assert flops("axial", dims).projection_macs == 6 * 4 * (2 * 2 + 5)

    def test_gate_sites(self):
        dims = _dims(6, 6)
        gate = GateConfig(depth=3, width=16)
        per_gate = 8 * 16 + 2 * 16 * 16 + 16 * 8

        channelized = flops(AttentionKind.CHANNELIZED, dims, gate)
        assert channelized.gate_sites == 2
        assert channelized.gate_macs == 2 * per_gate
        assert channelized.gate_evaluations == 36 + 6
        assert channelized.gate_macs_dense == per_gate * 42

        channelized_self = flops(AttentionKind.CHANNELIZED_SELF, dims, gate)
        assert channelized_self.gate_sites == 1
        assert channelized_self.gate_macs == per_gate

        assert flops(AttentionKind.AXIAL, dims, gate).gate_macs == 0

    def test_channelized_adds_only_gates(self):
        dims = _dims(9, 7)
        axial = flops("axial", dims)
        channelized = flops("channelized", dims)
        assert channelized.total_macs == axial.total_macs + channelized.gate_macs
        assert channelized.flops == 2 * channelized.total_macs

    def test_gate_overhead_at_reference_geometry(self):
        report = flops("channelized", GATE_SWEEP_DIMS, GateConfig(depth=5, width=128))
        assert report.gate_overhead_fraction < 1e-3

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            flops("dense", _dims(2, 2))


class TestFlopReporter:
    def test_compare_covers_all_kinds(self):
        reports = FlopReporter().compare(_dims(8, 8))
        assert [r.kind for r in reports] == list(AttentionKind)

    def test_gate_sweep(self):
        sweep = FlopReporter().gate_sweep()
        assert [(g.depth, g.width) for g, _ in sweep] == [
            (1, 128),
            (3, 128),
            (5, 128),
            (7, 128),
            (5, 64),
            (5, 256),
        ]
        costs = [r.gate_macs for _, r in sweep[:4]]
        assert costs == sorted(costs)

    def test_render(self):
        reporter = FlopReporter()
        gate = GateConfig()
        reports = reporter.compare(_dims(4, 4), gate)
        table = reporter.render([(gate, r) for r in reports])
        assert "channelized_self" in table
        assert "axial/self" in reporter.ratios(reports)
