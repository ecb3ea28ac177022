"""
Inicialização determinística de entradas e parâmetros.

Cada tensor recebe um subfluxo próprio do gerador, identificado pelo nome, com valores
uniformes simétricos em ±1/sqrt(fan_in). Assim a mesma semente reconstrói os mesmos pesos
em qualquer ordem de criação.
"""

import math

from src.core import DEFAULT_SE_REDUCTION
from src.schemas import AttnDims, AttnParams, GateConfig, GateParams, GateStage, SEParams
from src.tensor import DType, Rng, Tensor, zeros


def _fan_in_uniform(rng: Rng, name: str, shape: tuple[int, int], dtype: DType | str) -> Tensor:
    bound = 1.0 / math.sqrt(shape[0])
    return rng.uniform(name, shape, -bound, bound, dtype)


def init_input(
    rng: Rng,
    dims: AttnDims,
    *,
    batch: int | None = None,
    dtype: DType | str = DType.FLOAT64,
    name: str = "x",
) -> Tensor:
    """
    Entrada uniforme em [-1, 1): [C, H, W], ou [N, C, H, W] quando `batch` é informado.
    """
    shape = (dims.channels, dims.height, dims.width)
    if batch is not None:
        shape = (batch, *shape)
    return rng.uniform(name, shape, -1.0, 1.0, dtype)


def init_attn_params(
    rng: Rng, dims: AttnDims, dtype: DType | str = DType.FLOAT64
) -> AttnParams:
    c, cq, cv = dims.channels, dims.query_channels, dims.value_channels
    return AttnParams(
        theta=_fan_in_uniform(rng, "attn.theta", (c, cq), dtype),
        phi=_fan_in_uniform(rng, "attn.phi", (c, cq), dtype),
        g=_fan_in_uniform(rng, "attn.g", (c, cv), dtype),
        dims=dims,
    )


def gate_shapes(value_channels: int, config: GateConfig) -> list[tuple[int, int]]:
    """
    Formatos das matrizes do MLP: Cv→w, (depth − 1) × w→w, w→Cv.
    """
    w = config.width
    return [(value_channels, w)] + [(w, w)] * (config.depth - 1) + [(w, value_channels)]


def init_gate_params(
    rng: Rng,
    stage: GateStage | str,
    value_channels: int,
    config: GateConfig | None = None,
    dtype: DType | str = DType.FLOAT64,
    *,
    zero: bool = False,
    bypass: bool = False,
) -> GateParams:
    """
    Cria os pesos de um portão.

    Args:
        rng (Rng): Gerador com a semente global.
        stage (GateStage | str): column, row ou self.
        value_channels (int): Cv.
        config (GateConfig | None): Profundidade, largura e ativação.
        dtype (DType | str): Tipo dos pesos.
        zero (bool): Pesos nulos (portão constante em 0.5).
        bypass (bool): Portão congelado em 1, sem pesos.

    Returns:
        GateParams: Pesos do estágio pedido.
    """
    stage = GateStage(stage)
    config = config or GateConfig()

    if bypass:
        return GateParams(
            layers=[], activation=config.activation, slope=config.slope, stage=stage, bypass=True
        )

    layers = []
    for k, shape in enumerate(gate_shapes(value_channels, config)):
        if zero:
            layers.append(zeros(shape, dtype))
        else:
            layers.append(_fan_in_uniform(rng, f"gate.{stage.value}.w{k}", shape, dtype))

    return GateParams(
        layers=layers, activation=config.activation, slope=config.slope, stage=stage
    )


def init_se_params(
    rng: Rng,
    channels: int,
    *,
    reduction: int = DEFAULT_SE_REDUCTION,
    dtype: DType | str = DType.FLOAT64,
    zero: bool = False,
    bypass: bool = False,
) -> SEParams:
    hidden = max(1, channels // reduction)
    if zero:
        w1, w2 = zeros((channels, hidden), dtype), zeros((hidden, channels), dtype)
    else:
        w1 = _fan_in_uniform(rng, "se.w1", (channels, hidden), dtype)
        w2 = _fan_in_uniform(rng, "se.w2", (hidden, channels), dtype)
    return SEParams(w1=w1, w2=w2, bypass=bypass)
