"""
Kernels de atenção: autoatenção, atenção axial, decomposição em α e β e o modelo de custo.
"""

from src.kernels.attention import (
    attention_maps,
    attention_sum,
    axial_attention,
    breakdown,
    check_input,
    column_aggregate,
    project,
    row_weighted,
    self_attention,
)
from src.kernels.flops import flops

__all__ = [
    "attention_maps",
    "attention_sum",
    "axial_attention",
    "breakdown",
    "check_input",
    "column_aggregate",
    "flops",
    "project",
    "row_weighted",
    "self_attention",
]
