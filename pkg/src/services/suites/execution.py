"""
Suítes de execução: invariância aos grupos, escala de memória, modelo de custo,
determinismo e replay de fixtures.
"""

import logging
import tempfile
from collections.abc import Iterator
from functools import cached_property, partial
from pathlib import Path

from src.channelize import caa_forward
from src.groupexec import grouped_caa, measure, plan
from src.kernels import flops
from src.schemas import AttentionKind, AttnDims, ExecStats, GateConfig, GateStage
from src.services.fixtures import DEFAULT_FIXTURE_SIZES, FixtureWriter, replay_fixtures
from src.services.flop_report import GATE_SWEEP_DIMS
from src.services.suites.base import BaseSuite, Case, GridPoint, draw_sample
from src.tensor import DType, Rng, Tensor, reshape
from src.utils import (
    bitwise_equal,
    init_attn_params,
    init_gate_params,
    init_input,
    relative_error,
)

logger = logging.getLogger(__name__)


class GroupSuite(BaseSuite):
    """
    A execução em grupos devolve o mesmo resultado, bit a bit, para qualquer G.
    """

    name = "groups"

    HEIGHTS = (5, 32, 33)
    WIDTH = 6
    CHANNELS = 3
    BATCH = 2

    def cases(self) -> Iterator[Case]:
        for height in self.HEIGHTS:
            for dtype in DType:
                size = (height * self.WIDTH, height, self.WIDTH, self.CHANNELS)
                yield Case(
                    f"H={height} W={self.WIDTH} {dtype.value} G=1 × caa_forward",
                    size,
                    partial(self._check_reference, height, dtype),
                )
                for groups in sorted({2, 3, 4, 7, height}):
                    yield Case(
                        f"H={height} W={self.WIDTH} {dtype.value} G={groups}",
                        (*size, groups),
                        partial(self._check_groups, height, dtype, groups),
                    )

    def _setup(self, height: int, dtype: DType):
        dims = AttnDims(
            height=height,
            width=self.WIDTH,
            channels=self.CHANNELS,
            query_channels=self.CHANNELS,
            value_channels=self.CHANNELS,
        )
        rng = Rng(self.config.seed).child(f"{self.name}/{height}/{dtype.value}")
        gate = GateConfig(depth=2, width=self.config.gate_width)
        x = init_input(rng, dims, batch=self.BATCH, dtype=dtype)
        params = init_attn_params(rng, dims, dtype)
        gc = init_gate_params(rng, GateStage.COLUMN, self.CHANNELS, gate, dtype)
        gr = init_gate_params(rng, GateStage.ROW, self.CHANNELS, gate, dtype)
        return x, params, gc, gr

    def _run(self, height: int, dtype: DType, groups: int) -> Tensor:
        x, params, gc, gr = self._setup(height, dtype)
        return grouped_caa(x, params, gc, gr, plan(height, groups=groups, dims=params.dims))

    def _check_reference(self, height: int, dtype: DType) -> str | None:
        x, params, gc, gr = self._setup(height, dtype)
        grouped = self._run(height, dtype, 1)
        tol = 1e-12 if dtype is DType.FLOAT64 else 1e-5

        for n in range(self.BATCH):
            sample = Tensor(x.numpy()[n], dtype)
            direct = caa_forward(sample, params, gc, gr)
            err = relative_error(Tensor(grouped.numpy()[n], dtype), direct)
            if err > tol:
                return f"amostra {n}: erro relativo {err:.3e} contra caa_forward"
        return None

    def _check_groups(self, height: int, dtype: DType, groups: int) -> str | None:
        if not bitwise_equal(self._run(height, dtype, groups), self._run(height, dtype, 1)):
            return f"G={groups} difere de G=1 bit a bit"
        return None


class MemorySuite(BaseSuite):
    """
    Pico de elementos intermediários × G: escala em 1/G a menos da constante aditiva dos
    buffers de estatística, fica abaixo do previsto e respeita o orçamento do planejador.
    """

    name = "memory"

    HEIGHT = 64
    WIDTH = 64
    CHANNELS = 32
    GROUPS = (1, 2, 4)

    @property
    def _dims(self) -> AttnDims:
        return AttnDims(
            height=self.HEIGHT,
            width=self.WIDTH,
            channels=self.CHANNELS,
            query_channels=self.CHANNELS,
            value_channels=self.CHANNELS,
        )

    @cached_property
    def _measured(self) -> dict[int, tuple[ExecStats, int]]:
        dims = self._dims
        rng = Rng(self.config.seed).child(self.name)
        gate = GateConfig(depth=2, width=self.config.gate_width)
        x = init_input(rng, dims, batch=1, dtype=DType.FLOAT32)
        params = init_attn_params(rng, dims, DType.FLOAT32)
        gc = init_gate_params(rng, GateStage.COLUMN, self.CHANNELS, gate, DType.FLOAT32)
        gr = init_gate_params(rng, GateStage.ROW, self.CHANNELS, gate, DType.FLOAT32)

        stats = measure(x, params, (gc, gr), list(self.GROUPS), repeats=1)
        measured = {}
        for s in stats:
            current = plan(self.HEIGHT, groups=s.groups, dims=dims, gate_width=gate.width)
            measured[s.groups] = (s, current.stat_buffer_elements)
        return measured

    @property
    def _size(self) -> tuple[int, ...]:
        return (self.HEIGHT * self.WIDTH, self.HEIGHT, self.WIDTH, self.CHANNELS)

    def cases(self) -> Iterator[Case]:
        for groups in self.GROUPS:
            yield Case(f"G={groups} pico ≤ previsto", (*self._size, groups), partial(self._check_bound, groups))
        for groups in self.GROUPS[1:]:
            yield Case(f"G={groups} escala 1/G", (*self._size, groups), partial(self._check_scaling, groups))
        yield Case("pico não cresce com G", (*self._size, self.GROUPS[-1]), self._check_monotone)
        yield Case("orçamento do planejador", (*self._size, self.GROUPS[-1]), self._check_budget)

    def _check_bound(self, groups: int) -> str | None:
        stats, _ = self._measured[groups]
        if stats.peak_intermediate_elements > stats.predicted_peak_elements:
            return (
                f"pico medido {stats.peak_intermediate_elements} acima do previsto "
                f"{stats.predicted_peak_elements}"
            )
        return None

    def _check_scaling(self, groups: int) -> str | None:
        base, _ = self._measured[1]
        stats, stat_buffer = self._measured[groups]
        deviation = abs(stats.peak_intermediate_elements - base.peak_intermediate_elements / groups)
        logger.debug(
            f"G={groups}: pico {stats.peak_intermediate_elements}, G=1/G = "
            f"{base.peak_intermediate_elements / groups:.0f}, constante {stat_buffer}"
        )
        if deviation > stat_buffer:
            return f"desvio {deviation:.0f} acima da constante de estatísticas {stat_buffer}"
        return None

    def _check_monotone(self) -> str | None:
        previous = None
        for groups in self.GROUPS:
            stats, _ = self._measured[groups]
            current = (stats.peak_intermediate_elements, stats.predicted_peak_elements)
            if previous is not None and (current[0] > previous[0] or current[1] > previous[1]):
                return f"G={groups}: pico (medido, previsto) {current} acima de {previous}"
            previous = current
        return None

    def _check_budget(self) -> str | None:
        target, _ = self._measured[self.GROUPS[-1]]
        budget = target.predicted_peak_elements * DType.FLOAT32.itemsize
        chosen = plan(
            self.HEIGHT,
            memory_budget=budget,
            dims=self._dims,
            dtype=DType.FLOAT32,
            gate_width=self.config.gate_width,
        )
        if chosen.groups > self.GROUPS[-1]:
            return f"orçamento de G={self.GROUPS[-1]} levou a G={chosen.groups}"

        measured = self._measured.get(chosen.groups)
        if measured is not None and measured[0].peak_intermediate_elements * DType.FLOAT32.itemsize > budget:
            return f"G={chosen.groups} mediu pico acima do orçamento de {budget} bytes"
        return None


class FlopSuite(BaseSuite):
    """
    Álgebra do modelo de custo.
    """

    name = "flops"

    def cases(self) -> Iterator[Case]:
        seen = set()
        for point in self.grid():
            key = (point.height, point.width, point.value_channels)
            if key in seen:
                continue
            seen.add(key)
            yield Case(f"{point.label} razão e escala", point.size, partial(self._check_algebra, point))

        yield Case("H=W=4 Cv=1", (16, 4, 4, 1, 1), self._check_small)
        yield Case(
            "overhead dos portões depth=5 width=128",
            (GATE_SWEEP_DIMS.height * GATE_SWEEP_DIMS.width,),
            self._check_overhead,
        )

    def _check_algebra(self, point: GridPoint) -> str | None:
        dims = point.dims
        hw = dims.height * dims.width
        axial = flops(AttentionKind.AXIAL, dims).attention_macs
        full = flops(AttentionKind.SELF, dims).attention_macs
        if axial * hw != full * (dims.height + dims.width):
            return f"axial/self = {axial}/{full}, esperado (H+W)/(HW)"

        doubled = dims.model_copy(update={"height": 2 * dims.height, "width": 2 * dims.width})
        if flops(AttentionKind.SELF, doubled).attention_macs != 16 * full:
            return "dobrar H e W deveria multiplicar a autoatenção por 16"
        if flops(AttentionKind.AXIAL, doubled).attention_macs != 8 * axial:
            return "dobrar H e W deveria multiplicar a axial por 8"
        return None

    def _check_small(self) -> str | None:
        dims = AttnDims(height=4, width=4, channels=1, query_channels=1, value_channels=1)
        full = flops(AttentionKind.SELF, dims).attention_macs
        axial = flops(AttentionKind.AXIAL, dims).attention_macs
        if (full, axial) != (512, 256):
            return f"esperado self=512 e axial=256, obtido {full} e {axial}"
        return None

    def _check_overhead(self) -> str | None:
        report = flops(AttentionKind.CHANNELIZED, GATE_SWEEP_DIMS, GateConfig(depth=5, width=128))
        if report.gate_overhead_fraction >= 1e-3:
            return f"overhead dos portões {report.gate_overhead_fraction:.3e} ≥ 1e-3"
        return None


class DeterminismSuite(BaseSuite):
    """
    Mesma semente, mesmos bits: pesos, saídas, picos de memória e fixtures gravadas.
    """

    name = "determinism"

    def cases(self) -> Iterator[Case]:
        point = GridPoint(4, 4, 3, 3, Rng(self.config.seed).child(self.name).seed)
        yield Case(f"{point.label} pesos e saídas", point.size, partial(self._check_forward, point))
        yield Case(f"{point.label} pico de memória", point.size, partial(self._check_peak, point))
        yield Case("fixtures regravadas", (0,), self._check_fixtures)

    def _check_forward(self, point: GridPoint) -> str | None:
        gate = GateConfig(depth=3, width=self.config.gate_width)
        first, second = draw_sample(point, gate), draw_sample(point, gate)
        for name, t in first.params.tensors().items():
            if not bitwise_equal(t, second.params.tensors()[name]):
                return f"{name} difere entre sorteios com a mesma semente"

        a = caa_forward(first.x, first.params, first.gate_col, first.gate_row)
        b = caa_forward(second.x, second.params, second.gate_col, second.gate_row)
        if not bitwise_equal(a, b):
            return "caa_forward difere entre execuções"
        return None

    def _check_peak(self, point: GridPoint) -> str | None:
        s = draw_sample(point, GateConfig(depth=2, width=self.config.gate_width))
        x = reshape(s.x, (1, *s.x.shape))
        runs = [
            measure(x, s.params, (s.gate_col, s.gate_row), [1, 2], repeats=1) for _ in range(2)
        ]
        peaks = [[r.peak_intermediate_elements for r in run] for run in runs]
        if peaks[0] != peaks[1]:
            return f"picos diferentes entre execuções: {peaks[0]} e {peaks[1]}"
        return None

    def _check_fixtures(self) -> str | None:
        with tempfile.TemporaryDirectory() as tmp:
            roots = [Path(tmp) / "a", Path(tmp) / "b"]
            for root in roots:
                FixtureWriter(self.config.seed).write(root, DEFAULT_FIXTURE_SIZES[:1])

            files = sorted(p.relative_to(roots[0]) for p in roots[0].rglob("*") if p.is_file())
            for rel in files:
                if (roots[0] / rel).read_bytes() != (roots[1] / rel).read_bytes():
                    return f"{rel} difere entre gravações"
        return None


class FixtureSuite(BaseSuite):
    """
    Replay das fixtures: usa a pasta configurada quando existe; senão grava um conjunto
    temporário com a semente global e o reproduz.
    """

    name = "fixtures"

    def cases(self) -> Iterator[Case]:
        yield Case("replay", (0,), self._check)

    def _check(self) -> str | None:
        fixture_dir = self.config.fixture_dir
        if fixture_dir is not None and fixture_dir.is_dir():
            mismatches = replay_fixtures(fixture_dir)
        else:
            with tempfile.TemporaryDirectory() as tmp:
                FixtureWriter(self.config.seed).write(Path(tmp))
                mismatches = replay_fixtures(Path(tmp))

        if mismatches:
            return f"{len(mismatches)} divergências; primeira: {mismatches[0]}"
        return None
