"""
Atenção axial canalizada e autoatenção canalizada.

Os portões são constantes ao longo dos eixos somados pelo seu estágio, então cada um pode
ser aplicado depois da soma correspondente sem materializar α de posto 5:
    Σ_m C_col(α) = gate_col(i, n) ⊙ alpha_sum(i, j, n)
    Σ_n C_row(β) = Σ_n gate_row(j) ⊙ β(i, j, n)
"""

import logging

from src.channelize.gates import column_stat, gate_mlp, require_stage, row_gate
from src.core import ShapeError
from src.kernels import attention_maps, attention_sum, column_aggregate, project, row_weighted
from src.schemas import AttnParams, GateParams, GateStage
from src.tensor import Tensor, mul, reduce, reshape, scale, transpose

logger = logging.getLogger(__name__)


def _check_gate_width(p: AttnParams, *gates: GateParams) -> None:
    cv = p.dims.value_channels
    for gate in gates:
        if not gate.bypass and gate.value_channels != cv:
            raise ShapeError(
                f"Portão de {gate.stage.value} com largura {gate.value_channels}, esperado Cv={cv}"
            )


def column_gated(alpha_sum: Tensor, gate_col: Tensor) -> Tensor:
    """
    Aplica gate_col[i, n, c] sobre alpha_sum[i, j, n, c] (broadcast sobre j).
    """
    rows, width, channels = gate_col.shape
    return mul(alpha_sum, reshape(gate_col, (rows, 1, width, channels)))


def row_gated_sum(gated_beta: Tensor, gate_row: Tensor) -> Tensor:
    """
    Σ_n gate_row[j, c] · gated_beta[i, j, n, c], no layout (i, j, c).
    """
    width, channels = gate_row.shape
    return reduce(mul(gated_beta, reshape(gate_row, (width, 1, channels))), (2,))


def caa_forward(x: Tensor, p: AttnParams, gc: GateParams, gr: GateParams) -> Tensor:
    """
    Atenção axial canalizada.

    y_{i,j} = Σ_n C_row(a_row[i,j,n] · Σ_m C_col(α_{i,j,m,n})), com os portões avaliados sobre
    as médias de α (coluna) e de β já canalizado (linha). Com os dois portões em bypass o
    resultado é bit a bit igual a `axial_attention`.

    Args:
        x (Tensor): Entrada [C, H, W].
        p (AttnParams): Parâmetros da atenção.
        gc (GateParams): Portão do estágio de coluna.
        gr (GateParams): Portão do estágio de linha.

    Returns:
        Tensor: Saída [Cv, H, W].

    Raises:
        StageMismatchError: Portões trocados de estágio.
    """
    require_stage(gc, GateStage.COLUMN)
    require_stage(gr, GateStage.ROW)
    _check_gate_width(p, gc, gr)
    d = p.dims

    maps = attention_maps(x, p)
    v = project(x, p.g)
    alpha_sum = column_aggregate(maps.a_col, v)

    if gc.bypass:
        colgated = alpha_sum
    else:
        gate_col = gate_mlp(column_stat(alpha_sum, d.height, d.width), gc)
        colgated = column_gated(alpha_sum, gate_col)
    del alpha_sum

    gated_beta = row_weighted(colgated, maps.a_row)
    del colgated

    if gr.bypass:
        y = reduce(gated_beta, (2,))
    else:
        y = row_gated_sum(gated_beta, row_gate(gated_beta, gr).values)

    return transpose(y, (2, 0, 1))


def channelized_self_attention(x: Tensor, p: AttnParams, g: GateParams) -> Tensor:
    """
    Autoatenção com portão de canal por posição de consulta.

    stat(i, j, c) é a média de α_{i,j,m,n} = f(x_{i,j}, x_{m,n}) · g(x_{m,n}) sobre (m, n), e a
    saída é gate(i, j) ⊙ Σ_{m,n} α.

    Returns:
        Tensor: Saída [Cv, H, W].
    """
    require_stage(g, GateStage.SELF)
    _check_gate_width(p, g)
    d = p.dims

    total = attention_sum(x, p)
    if g.bypass:
        return transpose(total, (2, 0, 1))

    gate = gate_mlp(scale(total, 1.0 / (d.height * d.width)), g)
    return transpose(mul(gate, total), (2, 0, 1))
