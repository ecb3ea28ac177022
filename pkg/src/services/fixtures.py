"""
Fixtures dos oráculos: gravação de casos semeados em pacotes de tensores e replay.
"""

import logging
from collections.abc import Sequence
from pathlib import Path

from src.channelize import caa_forward, channelized_self_attention, se_block
from src.core import DEFAULT_SE_REDUCTION, ORACLE_REL_TOL, OracleCapError
from src.kernels import axial_attention, self_attention
from src.oracle import (
    oracle_alpha,
    oracle_axial,
    oracle_caa,
    oracle_channelized_self_attention,
    oracle_se_block,
    oracle_self_attention,
)
from src.schemas import (
    AttnDims,
    AttnParams,
    FixtureCase,
    GateConfig,
    GateParams,
    GateStage,
    OracleCaps,
    SEParams,
)
from src.tensor import Rng, Tensor, read_bundle, write_bundle
from src.utils import (
    bitwise_equal,
    init_attn_params,
    init_gate_params,
    init_input,
    init_se_params,
    relative_error,
)

logger = logging.getLogger(__name__)

CASE_FILE = "case.json"

# Tamanhos (H, W, C) padrão das fixtures
DEFAULT_FIXTURE_SIZES = ((3, 3, 2), (4, 4, 3), (5, 4, 3))


def _dims(case: FixtureCase) -> AttnDims:
    return AttnDims(
        height=case.height,
        width=case.width,
        channels=case.channels,
        query_channels=case.channels,
        value_channels=case.channels,
    )


def _oracle_outputs(
    x: Tensor,
    p: AttnParams,
    gates: dict[GateStage, GateParams],
    se: SEParams,
    caps: OracleCaps,
) -> dict[str, Tensor]:
    gc, gr, gs = gates[GateStage.COLUMN], gates[GateStage.ROW], gates[GateStage.SELF]
    return {
        "out.alpha": oracle_alpha(x, p, caps),
        "out.axial": oracle_axial(x, p, caps),
        "out.self": oracle_self_attention(x, p, caps),
        "out.caa": oracle_caa(x, p, gc, gr, caps),
        "out.channelized_self": oracle_channelized_self_attention(x, p, gs, caps),
        "out.se": oracle_se_block(x, se),
    }


class FixtureWriter:
    """
    Gera casos semeados (entrada, pesos e saídas dos oráculos) em float64.

    Cada caso ocupa uma pasta com um pacote de tensores e um `case.json` com a semente e a
    configuração dos portões; regravar com a mesma semente produz arquivos idênticos.
    """

    def __init__(
        self,
        seed: int,
        gate: GateConfig | None = None,
        caps: OracleCaps | None = None,
        se_reduction: int = DEFAULT_SE_REDUCTION,
    ):
        self.seed = seed
        self.gate = gate or GateConfig(depth=3, width=8)
        self.caps = caps or OracleCaps()
        self.se_reduction = se_reduction

    def write(
        self, out_dir: Path, sizes: Sequence[tuple[int, int, int]] = DEFAULT_FIXTURE_SIZES
    ) -> list[Path]:
        """
        Grava um caso por tamanho (H, W, C).

        Args:
            out_dir (Path): Pasta raiz das fixtures.
            sizes (Sequence[tuple[int, int, int]]): Tamanhos dos casos.

        Returns:
            list[Path]: Pastas gravadas, na ordem de `sizes`.

        Raises:
            OracleCapError: Algum tamanho excede o limite dos oráculos (nada é gravado).
        """
        logger.info(f"=== Gravando {len(sizes)} fixtures em {out_dir} ===")

        # Recusa antes de gravar qualquer caso
        for height, width, channels in sizes:
            elements = height * width * height * width * channels
            if elements > self.caps.max_rank5_elements:
                raise OracleCapError(
                    f"Fixture {height}x{width}x{channels} exige α com {elements} elementos, "
                    f"acima do limite de {self.caps.max_rank5_elements}"
                )

        written = []
        for height, width, channels in sizes:
            name = f"case_{height}x{width}x{channels}"
            case_dir = out_dir / name
            case, tensors = self._build_case(name, height, width, channels)
            write_bundle(case_dir, tensors)
            (case_dir / CASE_FILE).write_text(case.model_dump_json(indent=2), encoding="utf-8")
            logger.info(f"Fixture {name}: {len(tensors)} tensores")
            written.append(case_dir)

        return written

    def _build_case(
        self, name: str, height: int, width: int, channels: int
    ) -> tuple[FixtureCase, dict[str, Tensor]]:
        case_seed = Rng(self.seed).child(name).seed
        rng = Rng(case_seed)
        case = FixtureCase(
            name=name,
            seed=case_seed,
            height=height,
            width=width,
            channels=channels,
            gate=self.gate,
            se_reduction=self.se_reduction,
        )
        dims = _dims(case)

        x = init_input(rng, dims)
        p = init_attn_params(rng, dims)
        gates = {stage: init_gate_params(rng, stage, channels, self.gate) for stage in GateStage}
        se = init_se_params(rng, channels, reduction=self.se_reduction)

        inputs: dict[str, Tensor] = {"x": x, **p.tensors()}
        for gate in gates.values():
            inputs |= gate.tensors()
        inputs |= se.tensors()

        outputs = _oracle_outputs(x, p, gates, se, self.caps)
        case = case.model_copy(update={"outputs": list(outputs)})
        return case, inputs | outputs


def _load_case(case_dir: Path) -> tuple[FixtureCase, dict[str, Tensor]]:
    case = FixtureCase.model_validate_json((case_dir / CASE_FILE).read_text(encoding="utf-8"))
    return case, read_bundle(case_dir)


def replay_fixtures(fixture_dir: Path, caps: OracleCaps | None = None) -> list[str]:
    """
    Recalcula cada fixture a partir das entradas gravadas.

    Os oráculos precisam reproduzir as saídas gravadas bit a bit; os kernels eficientes,
    dentro da tolerância de concordância.

    Args:
        fixture_dir (Path): Pasta raiz com um subdiretório por caso.
        caps (OracleCaps | None): Limites dos oráculos.

    Returns:
        list[str]: Divergências encontradas (vazia quando tudo confere).

    Raises:
        FileNotFoundError: Pasta inexistente ou sem casos.
    """
    if not fixture_dir.is_dir():
        raise FileNotFoundError(f"Pasta de fixtures não encontrada: {fixture_dir}")

    case_dirs = sorted(d for d in fixture_dir.iterdir() if (d / CASE_FILE).is_file())
    if not case_dirs:
        raise FileNotFoundError(f"Nenhuma fixture em {fixture_dir}")

    caps = caps or OracleCaps()
    mismatches = []
    for case_dir in case_dirs:
        case, stored = _load_case(case_dir)
        dims = _dims(case)

        p = AttnParams(theta=stored["attn.theta"], phi=stored["attn.phi"], g=stored["attn.g"], dims=dims)
        gates = {}
        for stage in GateStage:
            layers = [stored[f"gate.{stage.value}.w{k}"] for k in range(case.gate.depth + 1)]
            gates[stage] = GateParams(
                layers=layers, activation=case.gate.activation, slope=case.gate.slope, stage=stage
            )
        se = SEParams(w1=stored["se.w1"], w2=stored["se.w2"])
        x = stored["x"]

        for name, value in _oracle_outputs(x, p, gates, se, caps).items():
            if not bitwise_equal(value, stored[name]):
                mismatches.append(f"{case.name}/{name}: oráculo difere da saída gravada")

        efficient = {
            "out.axial": axial_attention(x, p),
            "out.self": self_attention(x, p),
            "out.caa": caa_forward(x, p, gates[GateStage.COLUMN], gates[GateStage.ROW]),
            "out.channelized_self": channelized_self_attention(x, p, gates[GateStage.SELF]),
            "out.se": se_block(x, se),
        }
        for name, value in efficient.items():
            err = relative_error(value, stored[name])
            if err > ORACLE_REL_TOL:
                mismatches.append(f"{case.name}/{name}: kernel com erro relativo {err:.3e}")

        logger.debug(f"Replay de {case.name} concluído")

    return mismatches
