"""
Vetorização em grupos: planejamento do padding e dos intervalos de linhas, execução em duas
fases com resultado idêntico para qualquer G e medição de tempo e pico de memória.
"""

from src.groupexec.executor import grouped_caa
from src.groupexec.measure import measure
from src.groupexec.planner import (
    group_buffer_elements,
    padding_for,
    plan,
    stat_buffer_elements,
)

__all__ = [
    "group_buffer_elements",
    "grouped_caa",
    "measure",
    "padding_for",
    "plan",
    "stat_buffer_elements",
]
