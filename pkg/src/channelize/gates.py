"""
Portões de atenção de canal espacialmente variáveis.

Cada portão reduz um intermediário da atenção sobre os eixos somados pelo seu estágio,
passa a média por um MLP (ativação nas camadas ocultas, sigmoid na saída) e devolve pesos
em (0, 1) que ainda variam ao longo dos eixos espaciais mantidos.
"""

import logging
import math

from src.core import ShapeError, StageMismatchError
from src.schemas import Activation, Breakdown, GateField, GateParams, GateStage
from src.tensor import (
    Tensor,
    contract,
    leaky_relu,
    ones,
    reduce,
    relu,
    reshape,
    scale,
    sigmoid,
)

logger = logging.getLogger(__name__)


def require_stage(p: GateParams, stage: GateStage) -> None:
    if p.stage is not stage:
        raise StageMismatchError(
            f"Portão do estágio '{p.stage.value}' usado no estágio '{stage.value}'"
        )


def gate_mlp(stat: Tensor, p: GateParams) -> Tensor:
    """
    Aplica o MLP do portão sobre o último eixo de `stat`.

    Args:
        stat (Tensor): Estatística [..., Cv].
        p (GateParams): Pilha de pesos.

    Returns:
        Tensor: Pesos [..., Cv] em (0, 1); com bypass, exatamente 1.

    Raises:
        ShapeError: Se o último eixo não tiver a largura de entrada do MLP.
    """
    if p.bypass:
        return ones(stat.shape, stat.dtype)

    if stat.shape[-1] != p.value_channels:
        raise ShapeError(
            f"Estatística com {stat.shape[-1]} canais para portão de largura {p.value_channels}"
        )

    positions = math.prod(stat.shape[:-1])
    h = reshape(stat, (positions, stat.shape[-1]))

    last = len(p.layers) - 1
    for k, weight in enumerate(p.layers):
        h = contract(h, weight, "pc,cd->pd")
        if k == last:
            break
        if p.activation is Activation.RELU:
            h = relu(h)
        else:
            h = leaky_relu(h, p.slope)

    return reshape(sigmoid(h), stat.shape)


def gate_preactivations(stat: Tensor, p: GateParams) -> list[Tensor]:
    """
    Entradas das ativações ocultas do MLP do portão, uma por camada oculta.

    Onde alguma delas passa perto de zero a saída do portão tem uma dobra; a suíte de
    gradientes usa isso para evitar pontos em que as diferenças centrais cruzam a dobra.
    """
    if p.bypass:
        return []

    positions = math.prod(stat.shape[:-1])
    h = reshape(stat, (positions, stat.shape[-1]))

    hidden = []
    for weight in p.layers[:-1]:
        z = contract(h, weight, "pc,cd->pd")
        hidden.append(z)
        h = relu(z) if p.activation is Activation.RELU else leaky_relu(z, p.slope)
    return hidden


def column_stat(alpha_sum: Tensor, height: int, width: int) -> Tensor:
    """
    stat(i, n, c) = Σ_j alpha_sum[i, j, n, c] / (H · W).

    Igual à média de α sobre (m, j), pois alpha_sum já somou m. Aceita um recorte de
    linhas i; `height` e `width` são sempre os do mapa inteiro.
    """
    return scale(reduce(alpha_sum, (1,)), 1.0 / (height * width))


def row_stat(row_sums: Tensor, height: int, width: int) -> Tensor:
    """
    Converte Σ_{i,n} do intermediário β (já acumulado) na média stat(j, c).
    """
    return scale(row_sums, 1.0 / (height * width))


def column_gate(breakdown: Breakdown, x: Tensor, p: GateParams) -> GateField:
    """
    Portão de coluna: média de α sobre (m, j), indexado por (i, n, c).

    Args:
        breakdown (Breakdown): Decomposição da mesma entrada.
        x (Tensor): Entrada [C, H, W] (fornece H e W).
        p (GateParams): Pesos do estágio de coluna.

    Returns:
        GateField: Valores H × W × Cv.
    """
    require_stage(p, GateStage.COLUMN)
    _, height, width = x.shape

    if p.bypass:
        shape = (height, width, breakdown.alpha_sum.shape[-1])
        return GateField(stage=p.stage, values=ones(shape, x.dtype), bypass=True)

    stat = column_stat(breakdown.alpha_sum, height, width)
    return GateField(stage=p.stage, values=gate_mlp(stat, p))


def row_gate(gated_beta: Tensor, p: GateParams) -> GateField:
    """
    Portão de linha: média sobre (i, n) do β já canalizado pela coluna, indexado por (j, c).

    Args:
        gated_beta (Tensor): Intermediário (i, j, n, c).
        p (GateParams): Pesos do estágio de linha.

    Returns:
        GateField: Valores W × Cv.
    """
    require_stage(p, GateStage.ROW)
    height, width = gated_beta.shape[0], gated_beta.shape[1]

    if p.bypass:
        shape = (width, gated_beta.shape[-1])
        return GateField(stage=p.stage, values=ones(shape, gated_beta.dtype), bypass=True)

    # Soma em n dentro de cada linha e depois acumula as linhas em ordem crescente de i
    sums = reduce(reduce(gated_beta, (2,)), (0,))
    return GateField(stage=p.stage, values=gate_mlp(row_stat(sums, height, width), p))
