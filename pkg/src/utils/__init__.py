"""
Funções utilitárias puras.
Este pacote centraliza a inicialização determinística de entradas e pesos, a comparação
numérica entre tensores e a escrita do CSV do benchmark, sem dependências de estado.
"""

from .comparison import bitwise_equal, permute_axis, relative_error
from .csv_output import csv_header_comment, read_bench_csv, write_bench_csv
from .initializers import (
    gate_shapes,
    init_attn_params,
    init_gate_params,
    init_input,
    init_se_params,
)

__all__ = [
    "bitwise_equal",
    "csv_header_comment",
    "gate_shapes",
    "init_attn_params",
    "init_gate_params",
    "init_input",
    "init_se_params",
    "permute_axis",
    "read_bench_csv",
    "relative_error",
    "write_bench_csv",
]
