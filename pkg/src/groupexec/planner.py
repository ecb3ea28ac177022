"""
Planejamento da vetorização em grupos sobre o eixo de linhas de saída.
"""

import logging

from src.core import LIVE_GROUP_BUFFERS, InfeasibleBudgetError, PlanError
from src.schemas import AttnDims, GroupPlan
from src.tensor import DType

logger = logging.getLogger(__name__)


def padding_for(height: int, groups: int) -> int:
    """
    Menor padding não negativo que torna `height + padding` divisível por `groups`.
    """
    return (groups - height % groups) % groups


def stat_buffer_elements(
    dims: AttnDims,
    rows_per_group: int,
    *,
    gate_width: int = 0,
    batch: int = 1,
) -> int:
    """
    Limite superior dos elementos vivos fora dos buffers de posto 4 de um grupo.

    Soma tudo que pode coexistir com eles em algum momento: recorte da amostra, projeções e
    logits dos mapas, mapas, recortes do grupo, portões de coluna guardados entre as fases,
    temporários dos MLPs, acumulador da estatística de linha e as saídas parciais e finais.
    Nenhum termo depende do padding, e todos são constantes ou crescem com as linhas por
    grupo, então o limite nunca aumenta com G.
    """
    h, w = dims.height, dims.width
    c, cq, cv = dims.channels, dims.query_channels, dims.value_channels
    hw = h * w
    r = rows_per_group
    mlp = max(gate_width, cv)

    sample = c * hw
    maps_stage = 2 * cq * hw + 2 * h * h * w + 2 * h * w * w
    values = cv * hw
    group_slices = r * h * w + r * w * w
    column_gates = h * w * cv
    column_gate_work = 2 * r * w * cv + 4 * r * w * mlp
    row_work = r * w * cv + 3 * w * cv + 2 * w * cv + 4 * w * mlp
    outputs = 2 * batch * cv * hw + 3 * hw * cv

    return (
        sample
        + maps_stage
        + values
        + group_slices
        + column_gates
        + column_gate_work
        + row_work
        + outputs
    )


def group_buffer_elements(dims: AttnDims, rows_per_group: int) -> int:
    return LIVE_GROUP_BUFFERS * rows_per_group * dims.width * dims.width * dims.value_channels


def _build(
    height: int,
    groups: int,
    dims: AttnDims | None,
    gate_width: int,
    batch: int,
) -> GroupPlan:
    padding = padding_for(height, groups)
    rows = (height + padding) // groups

    dominant = stats = None
    if dims is not None:
        dominant = group_buffer_elements(dims, rows)
        stats = stat_buffer_elements(
            dims, rows, gate_width=gate_width, batch=batch
        )

    return GroupPlan(
        groups=groups,
        height=height,
        padding=padding,
        rows_per_group=rows,
        ranges=[(g * rows, (g + 1) * rows) for g in range(groups)],
        group_buffer_elements=dominant,
        stat_buffer_elements=stats,
    )


def plan(
    height: int,
    *,
    groups: int | None = None,
    memory_budget: int | None = None,
    dims: AttnDims | None = None,
    dtype: DType | str = DType.FLOAT32,
    gate_width: int = 0,
    batch: int = 1,
) -> GroupPlan:
    """
    Monta o plano de grupos a partir de G fixo ou de um orçamento de memória.

    Args:
        height (int): Linhas H do mapa.
        groups (int | None): Quantidade de grupos desejada.
        memory_budget (int | None): Orçamento em bytes; escolhe o menor G cujo pico previsto cabe.
        dims (AttnDims | None): Geometria, obrigatória com orçamento (sem ela não há previsão).
        dtype (DType | str): Tipo usado para converter o orçamento em elementos.
        gate_width (int): Largura oculta dos portões (dimensiona os temporários dos MLPs).
        batch (int): Amostras N processadas pela mesma chamada.

    Returns:
        GroupPlan: Plano com padding, intervalos e previsão de pico.

    Raises:
        PlanError: Parâmetros inválidos ou ambos/nenhum dos alvos informados.
        InfeasibleBudgetError: Nem G = H cabe no orçamento.
    """
    if height < 1:
        raise PlanError(f"A altura deve ser positiva, recebido {height}")
    if (groups is None) == (memory_budget is None):
        raise PlanError("Informe exatamente um alvo: groups ou memory_budget")
    if dims is not None and dims.height != height:
        raise PlanError(f"Geometria com H={dims.height} para plano de {height} linhas")

    if groups is not None:
        if groups < 1:
            raise PlanError(f"G deve ser ao menos 1, recebido {groups}")
        return _build(height, groups, dims, gate_width, batch)

    if dims is None:
        raise PlanError("O planejamento por orçamento exige a geometria da camada")

    itemsize = DType.of(dtype).itemsize
    budget_elements = memory_budget // itemsize

    for candidate in range(1, height + 1):
        current = _build(height, candidate, dims, gate_width, batch)
        if current.predicted_peak_elements <= budget_elements:
            logger.debug(
                f"Orçamento de {memory_budget} bytes atendido com G={candidate} "
                f"({current.predicted_peak_elements} elementos previstos)"
            )
            return current

    raise InfeasibleBudgetError(
        f"Orçamento de {memory_budget} bytes ({budget_elements} elementos) não comporta "
        f"nem G={height}: pico previsto de {current.predicted_peak_elements} elementos"
    )
