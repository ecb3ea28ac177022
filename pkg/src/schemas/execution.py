from __future__ import annotations

from src.core.compat import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from src.core import (
    DEFAULT_BENCH_CHANNELS,
    DEFAULT_BENCH_GATE_DEPTH,
    DEFAULT_BENCH_GATE_WIDTH,
    DEFAULT_BENCH_GROUPS,
    DEFAULT_BENCH_HEIGHTS,
    DEFAULT_BENCH_REPEATS,
    DEFAULT_BENCH_WIDTHS,
    DEFAULT_GATE_DEPTH,
    DEFAULT_GATE_WIDTH,
    DEFAULT_LEAKY_SLOPE,
    DEFAULT_SEED,
    FLOPS_PER_MAC,
    oracle_cap_from_env,
)
from src.schemas.params import Activation
from src.tensor import DType


class AttentionKind(StrEnum):
    SELF = "self"
    AXIAL = "axial"
    CHANNELIZED = "channelized"
    CHANNELIZED_SELF = "channelized_self"


class GateConfig(BaseModel):
    """
    Configuração (sem pesos) do MLP dos portões: profundidade, largura e ativação.
    """

    model_config = ConfigDict(frozen=True)

    depth: int = Field(default=DEFAULT_GATE_DEPTH, ge=1, description="Camadas ocultas.")
    width: int = Field(default=DEFAULT_GATE_WIDTH, ge=1, description="Largura das camadas ocultas.")
    activation: Activation = Field(default=Activation.LEAKY_RELU)
    slope: float = Field(default=DEFAULT_LEAKY_SLOPE, ge=0.0, lt=1.0)

    def macs_per_evaluation(self, value_channels: int) -> int:
        """
        Multiplicações-acumulações de uma avaliação do MLP sobre um vetor de Cv canais.
        """
        hidden = (self.depth - 1) * self.width * self.width
        return value_channels * self.width + hidden + self.width * value_channels


class OracleCaps(BaseModel):
    """
    Limites dos oráculos: recusam entradas grandes em vez de truncar silenciosamente.
    """

    model_config = ConfigDict(frozen=True)

    max_rank5_elements: int = Field(default_factory=oracle_cap_from_env, gt=0)
    dtype: DType = Field(default=DType.FLOAT64, frozen=True)

    @model_validator(mode="after")
    def check_dtype(self) -> OracleCaps:
        if self.dtype is not DType.FLOAT64:
            raise ValueError("Os oráculos operam apenas em float64")
        return self


class GroupPlan(BaseModel):
    """
    Plano da vetorização em grupos sobre o eixo de linhas de saída.
    """

    model_config = ConfigDict(frozen=True)

    groups: int = Field(..., ge=1, description="Quantidade G de grupos.")
    height: int = Field(..., ge=1, description="Linhas originais H.")
    padding: int = Field(..., ge=0, description="Linhas acrescentadas para H + padding ser divisível por G.")
    rows_per_group: int = Field(..., ge=1)
    ranges: list[tuple[int, int]] = Field(..., description="Intervalos semiabertos sobre o eixo estendido.")
    group_buffer_elements: int | None = Field(
        default=None, description="Buffers de posto 4 de um grupo vivos ao mesmo tempo (R × W × W × Cv cada)."
    )
    stat_buffer_elements: int | None = Field(
        default=None, description="Limite aditivo dos demais buffers (mapas, projeções, estatísticas, saída)."
    )

    @computed_field
    @property
    def predicted_peak_elements(self) -> int | None:
        if self.group_buffer_elements is None or self.stat_buffer_elements is None:
            return None
        return self.group_buffer_elements + self.stat_buffer_elements

    @property
    def real_ranges(self) -> list[tuple[int, int]]:
        """
        Intervalos recortados a [0, H), omitindo grupos formados só por linhas de padding.
        """
        clipped = [(start, min(stop, self.height)) for start, stop in self.ranges]
        return [(start, stop) for start, stop in clipped if stop > start]

    @model_validator(mode="after")
    def check_partition(self) -> GroupPlan:
        if self.padding != (self.groups - self.height % self.groups) % self.groups:
            raise ValueError("padding deve ser o menor valor que torna H + padding divisível por G")

        padded = self.height + self.padding
        if self.rows_per_group * self.groups != padded:
            raise ValueError("rows_per_group × G deve cobrir as linhas estendidas")

        expected = [(g * self.rows_per_group, (g + 1) * self.rows_per_group) for g in range(self.groups)]
        if list(self.ranges) != expected:
            raise ValueError("Os intervalos devem particionar [0, H + padding) em partes iguais")
        return self


class ExecStats(BaseModel):
    """
    Resultado instrumentado de uma execução em grupos.
    """

    groups: int = Field(..., ge=1)
    height: int
    width: int
    channels: int
    padding: int
    peak_intermediate_elements: int = Field(..., ge=0)
    predicted_peak_elements: int | None = None
    wall_time: float = Field(..., ge=0.0, description="Menor tempo entre as repetições (segundos).")
    repeats: int = Field(..., ge=1)
    groups_executed: int = Field(..., ge=0)

    def csv_row(self) -> list[str]:
        return [
            str(self.groups),
            str(self.height),
            str(self.width),
            str(self.channels),
            str(self.padding),
            str(self.peak_intermediate_elements),
            f"{self.wall_time:.6f}",
            str(self.repeats),
        ]


class FlopReport(BaseModel):
    """
    Contagem analítica de multiplicações-acumulações (MACs) de uma camada de atenção.
    """

    kind: AttentionKind
    height: int
    width: int
    channels: int
    query_channels: int
    value_channels: int
    projection_macs: int = Field(..., ge=0, description="Projeções 1×1 (θ, φ, g).")
    attention_macs: int = Field(..., ge=0, description="Cálculo dos mapas e aplicação aos valores.")
    gate_sites: int = Field(default=0, ge=0, description="Portões inseridos na camada.")
    gate_macs: int = Field(default=0, ge=0, description="Custo do MLP dos portões por ponto de inserção.")
    gate_evaluations: int = Field(default=0, ge=0, description="Posições espaciais onde os MLPs são avaliados.")
    gate_macs_dense: int = Field(default=0, ge=0, description="Custo do MLP avaliado em cada posição mantida.")

    @computed_field
    @property
    def total_macs(self) -> int:
        return self.projection_macs + self.attention_macs + self.gate_macs

    @computed_field
    @property
    def flops(self) -> int:
        return FLOPS_PER_MAC * self.total_macs

    @computed_field
    @property
    def gate_overhead_fraction(self) -> float:
        base = self.projection_macs + self.attention_macs
        return self.gate_macs / base if base else 0.0


class BenchConfig(BaseModel):
    """
    Configuração do estudo de velocidade × quantidade de grupos.

    As resoluções pareiam `heights[k]` com `widths[k]`; cada resolução é cruzada com todos os
    canais e todos os valores de G.
    """

    heights: list[int] = Field(default_factory=lambda: list(DEFAULT_BENCH_HEIGHTS))
    widths: list[int] = Field(default_factory=lambda: list(DEFAULT_BENCH_WIDTHS))
    channels: list[int] = Field(default_factory=lambda: list(DEFAULT_BENCH_CHANNELS))
    groups: list[int] = Field(default_factory=lambda: list(DEFAULT_BENCH_GROUPS))
    repeats: int = Field(default=DEFAULT_BENCH_REPEATS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    dtype: DType = Field(default=DType.FLOAT32)
    out_path: Path = Field(default=Path("bench.csv"))
    gate: GateConfig = Field(
        default_factory=lambda: GateConfig(depth=DEFAULT_BENCH_GATE_DEPTH, width=DEFAULT_BENCH_GATE_WIDTH)
    )

    @model_validator(mode="after")
    def check_lists(self) -> BenchConfig:
        if len(self.heights) != len(self.widths):
            raise ValueError("heights e widths devem ter o mesmo comprimento (uma resolução por par)")
        for name in ("heights", "widths", "channels", "groups"):
            values = getattr(self, name)
            if not values or any(v < 1 for v in values):
                raise ValueError(f"{name} deve conter apenas inteiros positivos")
        return self

    @property
    def resolutions(self) -> list[tuple[int, int]]:
        return list(zip(self.heights, self.widths))


class SuiteResult(BaseModel):
    """
    Resumo de uma suíte de verificação.
    """

    name: str
    passed: bool
    cases: int = Field(default=0, ge=0)
    failures: int = Field(default=0, ge=0)
    first_failure: str | None = Field(default=None, description="Menor caso que falhou.")
    seconds: float = Field(default=0.0, ge=0.0)


class VerifyConfig(BaseModel):
    """
    Configuração do comando de verificação.

    A grade pequena cruza H × W com C × Cv (valores de `channels`), profundidades,
    ativações e `seeds_per_case` sementes derivadas da semente global.
    """

    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    heights: list[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5])
    widths: list[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5])
    channels: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    depths: list[int] = Field(default_factory=lambda: [1, 3, 5])
    activations: list[Activation] = Field(
        default_factory=lambda: [Activation.RELU, Activation.LEAKY_RELU]
    )
    gate_width: int = Field(default=4, ge=1, description="Largura dos portões na grade pequena.")
    seeds_per_case: int = Field(default=3, ge=1)
    suites: list[str] | None = Field(default=None, description="Subconjunto de suítes; None roda todas.")
    mutate: bool = Field(default=False, description="Perturba um peso de portão só no caminho eficiente.")
    fixture_dir: Path | None = Field(default=None, description="Pasta de fixtures para replay.")

    @model_validator(mode="after")
    def check_grid(self) -> VerifyConfig:
        for name in ("heights", "widths", "channels", "depths"):
            values = getattr(self, name)
            if not values or any(v < 1 for v in values):
                raise ValueError(f"{name} deve conter apenas inteiros positivos")
        return self


class FixtureCase(BaseModel):
    """
    Metadados de um caso de fixture, gravados ao lado do pacote de tensores.
    """

    name: str
    seed: int = Field(..., ge=0, lt=2**64)
    height: int = Field(..., ge=1)
    width: int = Field(..., ge=1)
    channels: int = Field(..., ge=1)
    gate: GateConfig
    se_reduction: int = Field(..., ge=1)
    outputs: list[str] = Field(default_factory=list, description="Nomes das saídas do oráculo no pacote.")
