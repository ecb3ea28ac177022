"""
Canalização: portões de canal espacialmente variáveis, atenção axial canalizada,
autoatenção canalizada e as linhas de base de atenção dupla (SE paralelo e sequencial).
"""

from src.channelize.baselines import dual_parallel, dual_sequential, se_block
from src.channelize.caa import (
    caa_forward,
    channelized_self_attention,
    column_gated,
    row_gated_sum,
)
from src.channelize.gates import (
    column_gate,
    column_stat,
    gate_mlp,
    gate_preactivations,
    require_stage,
    row_gate,
    row_stat,
)

__all__ = [
    "caa_forward",
    "channelized_self_attention",
    "column_gate",
    "column_gated",
    "column_stat",
    "dual_parallel",
    "dual_sequential",
    "gate_mlp",
    "gate_preactivations",
    "require_stage",
    "row_gate",
    "row_gated_sum",
    "row_stat",
    "se_block",
]
