"""
Configurações centrais do projeto.
Guarda constantes imutáveis, tolerâncias numéricas, variáveis de ambiente, a hierarquia de
exceções e a configuração de logging.
"""

from .constants import (
    CONTAINER_MAGIC,
    CONTAINER_SUFFIX,
    CONTAINER_VERSION,
    CSV_COLUMNS,
    CSV_SCHEMA_VERSION,
    DEFAULT_BENCH_CHANNELS,
    DEFAULT_BENCH_GATE_DEPTH,
    DEFAULT_BENCH_GATE_WIDTH,
    DEFAULT_BENCH_GROUPS,
    DEFAULT_BENCH_HEIGHTS,
    DEFAULT_BENCH_REPEATS,
    DEFAULT_BENCH_WIDTHS,
    DEFAULT_GATE_DEPTH,
    DEFAULT_GATE_WIDTH,
    DEFAULT_LEAKY_SLOPE,
    DEFAULT_ORACLE_CAP,
    DEFAULT_SE_REDUCTION,
    DEFAULT_SEED,
    FINITE_DIFF_EPS,
    FLOPS_PER_MAC,
    GRADIENT_KINK_MARGIN,
    GRADIENT_MAX_REDRAWS,
    GRADIENT_REL_TOL,
    LIVE_GROUP_BUFFERS,
    MANIFEST_NAME,
    ORACLE_REL_TOL,
    SOFTMAX_SUM_TOL_F32,
    SOFTMAX_SUM_TOL_F64,
    GATE_SWEEP_CONFIGS,
    check_finite_enabled,
    oracle_cap_from_env,
)
from .exceptions import (
    AxisError,
    BroadcastError,
    CAAError,
    ContainerFormatError,
    DTypeError,
    InfeasibleBudgetError,
    NonFiniteError,
    OracleCapError,
    PlanError,
    ShapeError,
    StageMismatchError,
    TapeError,
)
from .logger_config import setup_logging

__all__ = [
    "CONTAINER_MAGIC",
    "CONTAINER_SUFFIX",
    "CONTAINER_VERSION",
    "CSV_COLUMNS",
    "CSV_SCHEMA_VERSION",
    "DEFAULT_BENCH_CHANNELS",
    "DEFAULT_BENCH_GATE_DEPTH",
    "DEFAULT_BENCH_GATE_WIDTH",
    "DEFAULT_BENCH_GROUPS",
    "DEFAULT_BENCH_HEIGHTS",
    "DEFAULT_BENCH_REPEATS",
    "DEFAULT_BENCH_WIDTHS",
    "DEFAULT_GATE_DEPTH",
    "DEFAULT_GATE_WIDTH",
    "DEFAULT_LEAKY_SLOPE",
    "DEFAULT_ORACLE_CAP",
    "DEFAULT_SE_REDUCTION",
    "DEFAULT_SEED",
    "FINITE_DIFF_EPS",
    "FLOPS_PER_MAC",
    "GRADIENT_KINK_MARGIN",
    "GRADIENT_MAX_REDRAWS",
    "GRADIENT_REL_TOL",
    "LIVE_GROUP_BUFFERS",
    "MANIFEST_NAME",
    "ORACLE_REL_TOL",
    "SOFTMAX_SUM_TOL_F32",
    "SOFTMAX_SUM_TOL_F64",
    "GATE_SWEEP_CONFIGS",
    "AxisError",
    "BroadcastError",
    "CAAError",
    "ContainerFormatError",
    "DTypeError",
    "InfeasibleBudgetError",
    "NonFiniteError",
    "OracleCapError",
    "PlanError",
    "ShapeError",
    "StageMismatchError",
    "TapeError",
    "check_finite_enabled",
    "oracle_cap_from_env",
    "setup_logging",
]
