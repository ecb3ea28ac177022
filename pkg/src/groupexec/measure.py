import logging
import time
from collections.abc import Sequence

from src.core import DEFAULT_BENCH_REPEATS, PlanError
from src.groupexec.executor import grouped_caa
from src.groupexec.planner import plan as build_plan
from src.schemas import AttnParams, ExecStats, GateParams
from src.tensor import Tensor, track_memory

logger = logging.getLogger(__name__)


def measure(
    x: Tensor,
    params: AttnParams,
    gates: tuple[GateParams, GateParams],
    group_list: Sequence[int],
    *,
    repeats: int = DEFAULT_BENCH_REPEATS,
) -> list[ExecStats]:
    """
    Executa a atenção canalizada em grupos para cada G e instrumenta tempo e memória.

    O tempo reportado é o menor entre `repeats` execuções; o pico de elementos
    intermediários é o maior observado (é o mesmo em todas, pois as liberações são
    determinísticas).

    Args:
        x (Tensor): Lote [N, C, H, W].
        params (AttnParams): Parâmetros da atenção.
        gates (tuple[GateParams, GateParams]): Portões de coluna e de linha.
        group_list (Sequence[int]): Valores de G, na ordem de execução.
        repeats (int): Repetições por G.

    Returns:
        list[ExecStats]: Um registro por G.
    """
    if not group_list:
        raise PlanError("A lista de grupos não pode ser vazia")
    if repeats < 1:
        raise PlanError(f"repeats deve ser positivo, recebido {repeats}")

    gc, gr = gates
    d = params.dims
    gate_width = max(gc.hidden_width, gr.hidden_width)

    results = []
    for groups in group_list:
        current = build_plan(
            d.height,
            groups=groups,
            dims=d,
            dtype=params.dtype,
            gate_width=gate_width,
            batch=x.shape[0],
        )

        best_time = float("inf")
        peak = 0
        for _ in range(repeats):
            with track_memory() as tracker:
                start = time.perf_counter()
                out = grouped_caa(x, params, gc, gr, current)
                elapsed = time.perf_counter() - start
                del out
            best_time = min(best_time, elapsed)
            peak = max(peak, tracker.peak_elements)

        logger.debug(
            f"G={groups}: pico de {peak} elementos (previsto {current.predicted_peak_elements}), "
            f"{best_time:.6f}s"
        )
        results.append(
            ExecStats(
                groups=groups,
                height=d.height,
                width=d.width,
                channels=d.channels,
                padding=current.padding,
                peak_intermediate_elements=peak,
                predicted_peak_elements=current.predicted_peak_elements,
                wall_time=best_time,
                repeats=repeats,
                groups_executed=len(current.real_ranges) * x.shape[0],
            )
        )

    return results
