"""
Modelos de dados e validação do sistema.
Contém os schemas do Pydantic para parâmetros de atenção e portões, planos de execução,
relatórios de custo e configurações dos comandos.
"""

from src.schemas.execution import (
    AttentionKind,
    BenchConfig,
    ExecStats,
    FixtureCase,
    FlopReport,
    GateConfig,
    GroupPlan,
    OracleCaps,
    SuiteResult,
    VerifyConfig,
)
from src.schemas.params import (
    Activation,
    AttentionMaps,
    AttnDims,
    AttnParams,
    Breakdown,
    GateField,
    GateParams,
    GateStage,
    SEParams,
)

__all__ = [
    "Activation",
    "AttentionKind",
    "AttentionMaps",
    "AttnDims",
    "AttnParams",
    "BenchConfig",
    "Breakdown",
    "ExecStats",
    "FixtureCase",
    "FlopReport",
    "GateConfig",
    "GateField",
    "GateParams",
    "GateStage",
    "GroupPlan",
    "OracleCaps",
    "SEParams",
    "SuiteResult",
    "VerifyConfig",
]
