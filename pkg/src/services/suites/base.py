import logging
import time
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from itertools import product

from src.schemas import AttnDims, AttnParams, GateConfig, GateParams, GateStage, SuiteResult, VerifyConfig
from src.tensor import DType, Rng, Tensor
from src.utils import init_attn_params, init_gate_params, init_input

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Case:
    """
    Um caso de verificação.

    `size` ordena os casos do menor para o maior; `check` devolve None quando o caso passa
    ou uma descrição curta da divergência.
    """

    label: str
    size: tuple[int, ...]
    check: Callable[[], str | None]


@dataclass(frozen=True)
class GridPoint:
    height: int
    width: int
    channels: int
    value_channels: int
    seed: int

    @property
    def dims(self) -> AttnDims:
        return AttnDims(
            height=self.height,
            width=self.width,
            channels=self.channels,
            query_channels=self.channels,
            value_channels=self.value_channels,
        )

    @property
    def size(self) -> tuple[int, ...]:
        return (
            self.height * self.width,
            self.height,
            self.width,
            self.channels,
            self.value_channels,
        )

    @property
    def label(self) -> str:
        return (
            f"H={self.height} W={self.width} C={self.channels} "
            f"Cv={self.value_channels} seed={self.seed}"
        )


@dataclass(frozen=True)
class Sample:
    """
    Entrada e pesos sorteados para um ponto da grade.
    """

    x: Tensor
    params: AttnParams
    gate_col: GateParams
    gate_row: GateParams
    gate_self: GateParams


def draw_sample(
    point: GridPoint, gate: GateConfig, dtype: DType | str = DType.FLOAT64
) -> Sample:
    rng = Rng(point.seed)
    dims = point.dims
    cv = dims.value_channels
    return Sample(
        x=init_input(rng, dims, dtype=dtype),
        params=init_attn_params(rng, dims, dtype),
        gate_col=init_gate_params(rng, GateStage.COLUMN, cv, gate, dtype),
        gate_row=init_gate_params(rng, GateStage.ROW, cv, gate, dtype),
        gate_self=init_gate_params(rng, GateStage.SELF, cv, gate, dtype),
    )


class BaseSuite(ABC):
    """
    Classe base para todas as suítes de verificação.

    Cada suíte gera seus casos sob demanda; a execução conta falhas, registra exceções como
    falhas do caso e reporta o menor caso divergente.
    """

    name: str = ""

    def __init__(self, config: VerifyConfig):
        self.config = config

    @abstractmethod
    def cases(self) -> Iterator[Case]:
        """
        Gera os casos da suíte.

        Returns:
            Iterator[Case]: Casos na ordem de execução.
        """
        pass

    def grid(self) -> Iterator[GridPoint]:
        """
        Percorre a grade pequena: H × W × C × Cv × sementes derivadas da semente global.
        """
        root = Rng(self.config.seed)
        cfg = self.config
        for h, w, c, cv in product(cfg.heights, cfg.widths, cfg.channels, cfg.channels):
            for k in range(cfg.seeds_per_case):
                seed = root.child(f"{self.name}/{h}x{w}x{c}x{cv}/{k}").seed
                yield GridPoint(h, w, c, cv, seed)

    def gate_configs(self) -> Iterator[GateConfig]:
        for depth, activation in product(self.config.depths, self.config.activations):
            yield GateConfig(depth=depth, width=self.config.gate_width, activation=activation)

    def run(self) -> SuiteResult:
        logger.info(f"=== Iniciando suíte: {self.name} ===")
        start = time.perf_counter()

        count = 0
        failures: list[tuple[Case, str]] = []
        for case in self.cases():
            count += 1
            try:
                reason = case.check()
            except Exception as e:
                reason = f"{type(e).__name__}: {e}"

            if reason is not None:
                logger.debug(f"[{self.name}] falhou em {case.label}: {reason}")
                failures.append((case, reason))

        first = None
        if failures:
            smallest, reason = min(failures, key=lambda item: item[0].size)
            first = f"{smallest.label}: {reason}"
            logger.error(f"[{self.name}] {len(failures)}/{count} casos falharam; menor: {first}")

        seconds = time.perf_counter() - start
        logger.info(f"Suíte {self.name}: {count} casos em {seconds:.2f}s")
        return SuiteResult(
            name=self.name,
            passed=not failures,
            cases=count,
            failures=len(failures),
            first_failure=first,
            seconds=seconds,
        )
