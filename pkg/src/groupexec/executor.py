"""
Execução da atenção axial canalizada em grupos de linhas de saída.

Cada amostra passa por duas fases sobre os mesmos grupos:
    1. calcula, grupo a grupo, os portões de coluna (guardados) e acumula a estatística do
       portão de linha, que soma sobre todas as linhas i e por isso cruza os grupos;
    2. recalcula cada grupo aplicando os dois portões e a soma em n.

As linhas do padding só existem no plano: cada grupo recorta apenas as suas linhas reais
[início, min(fim, H)), e um grupo inteiramente de padding é pulado. As saídas dessas linhas
seriam descartadas de qualquer forma, então nenhum buffer cresce com o padding.
"""

import logging

from src.channelize import column_gated, column_stat, gate_mlp, require_stage, row_gated_sum, row_stat
from src.core import PlanError, ShapeError
from src.kernels import attention_maps, column_aggregate, project, row_weighted
from src.schemas import AttnParams, GateParams, GateStage, GroupPlan
from src.tensor import Tensor, add, concat, reduce, reshape, slice_axis, transpose, zeros

logger = logging.getLogger(__name__)


def _column_weighted(a_col_g: Tensor, v: Tensor, gate_col: Tensor | None) -> Tensor:
    """
    Σ_m C_col(α) das linhas de um grupo, no layout (i, j, n, c).
    """
    alpha_g = column_aggregate(a_col_g, v)
    if gate_col is None:
        return alpha_g
    return column_gated(alpha_g, gate_col)


def _grouped_sample(
    x: Tensor, p: AttnParams, gc: GateParams, gr: GateParams, plan: GroupPlan
) -> Tensor:
    d = p.dims
    height, width = d.height, d.width
    ranges = plan.real_ranges

    maps = attention_maps(x, p)
    v = project(x, p.g)
    a_col, a_row = maps.a_col, maps.a_row
    del maps

    # Fase 1: portões de coluna por grupo e soma Σ_{i,n} do β canalizado
    column_gates: list[Tensor | None] = []
    row_sums = zeros((width, d.value_channels), p.dtype)

    for start, stop in ranges:
        a_col_g = slice_axis(a_col, 0, start, stop)
        gate_col = None
        if not gc.bypass:
            alpha_g = column_aggregate(a_col_g, v)
            gate_col = gate_mlp(column_stat(alpha_g, height, width), gc)
            del alpha_g
        column_gates.append(gate_col)

        if not gr.bypass:
            a_row_g = slice_axis(a_row, 0, start, stop)
            gated_beta = row_weighted(_column_weighted(a_col_g, v, gate_col), a_row_g)
            sums = reduce(gated_beta, (2,))
            del gated_beta, a_row_g

            # Linhas em ordem crescente de i, como na soma sem grupos
            for r in range(stop - start):
                row = reshape(slice_axis(sums, 0, r, r + 1), (width, d.value_channels))
                row_sums = add(row_sums, row)
                del row
            del sums

        del a_col_g

    gate_row = None
    if not gr.bypass:
        gate_row = gate_mlp(row_stat(row_sums, height, width), gr)
    del row_sums

    # Fase 2: aplica os portões e reduz em n, grupo a grupo
    parts: list[Tensor] = []
    for (start, stop), gate_col in zip(ranges, column_gates, strict=True):
        a_col_g = slice_axis(a_col, 0, start, stop)
        a_row_g = slice_axis(a_row, 0, start, stop)
        gated_beta = row_weighted(_column_weighted(a_col_g, v, gate_col), a_row_g)
        del a_col_g, a_row_g

        if gate_row is None:
            parts.append(reduce(gated_beta, (2,)))
        else:
            parts.append(row_gated_sum(gated_beta, gate_row))
        del gated_beta

    y = concat(parts, axis=0)
    del parts
    return transpose(y, (2, 0, 1))


def grouped_caa(
    x: Tensor, p: AttnParams, gc: GateParams, gr: GateParams, plan: GroupPlan
) -> Tensor:
    """
    Atenção axial canalizada executada em G grupos de linhas de saída.

    O resultado é bit a bit igual para qualquer G válido: cada linha de saída percorre as
    mesmas parcelas na mesma ordem, e a estatística do portão de linha acumula as linhas
    reais em ordem crescente, grupo após grupo.

    Args:
        x (Tensor): Lote [N, C, H, W], processado amostra por amostra.
        p (AttnParams): Parâmetros da atenção.
        gc (GateParams): Portão de coluna.
        gr (GateParams): Portão de linha.
        plan (GroupPlan): Plano com H igual ao da entrada.

    Returns:
        Tensor: Saída [N, Cv, H, W].

    Raises:
        ShapeError: Entrada fora do layout [N, C, H, W] dos parâmetros.
        PlanError: Plano feito para outra altura.
    """
    require_stage(gc, GateStage.COLUMN)
    require_stage(gr, GateStage.ROW)

    d = p.dims
    if x.ndim != 4 or x.shape[1:] != (d.channels, d.height, d.width):
        raise ShapeError(
            f"Entrada com formato {x.shape}, esperado [N, {d.channels}, {d.height}, {d.width}]"
        )
    if plan.height != d.height:
        raise PlanError(f"Plano para H={plan.height} aplicado a entrada com H={d.height}")

    batch = x.shape[0]
    logger.debug(
        f"grouped_caa: N={batch}, G={plan.groups}, padding={plan.padding}, "
        f"{plan.rows_per_group} linhas por grupo"
    )

    outputs = []
    for s in range(batch):
        sample = reshape(slice_axis(x, 0, s, s + 1), (d.channels, d.height, d.width))
        y = _grouped_sample(sample, p, gc, gr, plan)
        del sample
        outputs.append(reshape(y, (1, *y.shape)))
        del y

    return concat(outputs, axis=0)
