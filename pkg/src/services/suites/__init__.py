"""
Suítes de verificação executadas pelo comando `verify`.
"""

from src.services.suites.base import BaseSuite, Case, GridPoint, Sample, draw_sample
from src.services.suites.execution import (
    DeterminismSuite,
    FixtureSuite,
    FlopSuite,
    GroupSuite,
    MemorySuite,
)
from src.services.suites.numerics import (
    BypassSuite,
    EquivarianceSuite,
    GateSuite,
    GradientSuite,
    NormalizationSuite,
    OracleSuite,
    perturb_gate,
)

# Ordem de execução do comando verify
ALL_SUITES: tuple[type[BaseSuite], ...] = (
    OracleSuite,
    NormalizationSuite,
    BypassSuite,
    GateSuite,
    EquivarianceSuite,
    GroupSuite,
    MemorySuite,
    GradientSuite,
    FlopSuite,
    DeterminismSuite,
    FixtureSuite,
)

__all__ = [
    "ALL_SUITES",
    "BaseSuite",
    "BypassSuite",
    "Case",
    "DeterminismSuite",
    "EquivarianceSuite",
    "FixtureSuite",
    "FlopSuite",
    "GateSuite",
    "GradientSuite",
    "GridPoint",
    "GroupSuite",
    "MemorySuite",
    "NormalizationSuite",
    "OracleSuite",
    "Sample",
    "draw_sample",
    "perturb_gate",
]
