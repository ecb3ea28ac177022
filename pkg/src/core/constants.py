import os

# =========================================================================
# VARIÁVEIS DE AMBIENTE
# =========================================================================

# Sobrescreve o limite de elementos do tensor α de posto 5 usado pelos oráculos
ORACLE_CAP_ENV = "CAA_ORACLE_CAP"

# Desliga (valor "0") a checagem de finitude executada após cada operação
CHECK_FINITE_ENV = "CAA_CHECK_FINITE"


# =========================================================================
# LIMITES DOS ORÁCULOS E DA MATERIALIZAÇÃO DE α
# =========================================================================

# Limite padrão de elementos para materializar α_{i,j,m,n} (H·W·H·W·Cv)
DEFAULT_ORACLE_CAP = 2**22


def oracle_cap_from_env() -> int:
    """
    Lê o limite dos oráculos a partir da variável de ambiente, se definida.

    Returns:
        int: Limite de elementos do tensor de posto 5.
    """
    raw = os.environ.get(ORACLE_CAP_ENV, "").strip()
    if not raw:
        return DEFAULT_ORACLE_CAP

    return int(raw)


def check_finite_enabled() -> bool:
    return os.environ.get(CHECK_FINITE_ENV, "1").strip() != "0"


# =========================================================================
# TOLERÂNCIAS NUMÉRICAS
# =========================================================================

# Soma das fatias de softmax em float32 e float64
SOFTMAX_SUM_TOL_F32 = 1e-6
SOFTMAX_SUM_TOL_F64 = 1e-12

# Erro relativo máximo entre kernel eficiente e oráculo (float64)
ORACLE_REL_TOL = 1e-10

# Erro relativo máximo entre gradiente reverso e diferenças finitas
GRADIENT_REL_TOL = 1e-5

# Passo padrão das diferenças centrais
FINITE_DIFF_EPS = 1e-5

# Distância mínima entre uma pré-ativação oculta e a dobra da (Leaky) ReLU nos pontos de
# checagem de gradiente; pontos mais próximos são sorteados de novo
GRADIENT_KINK_MARGIN = 10 * FINITE_DIFF_EPS

# Tentativas de sorteio antes de desistir de um caso de gradiente
GRADIENT_MAX_REDRAWS = 32


# =========================================================================
# PORTÕES DE CANAL (GATES)
# =========================================================================

# Melhor configuração da varredura de profundidade/largura (camadas, canais)
DEFAULT_GATE_DEPTH = 5
DEFAULT_GATE_WIDTH = 128

# Inclinação da Leaky ReLU usada dentro dos portões
DEFAULT_LEAKY_SLOPE = 0.01

# Configurações da varredura de profundidade e largura dos portões
GATE_SWEEP_CONFIGS = ((1, 128), (3, 128), (5, 128), (7, 128), (5, 64), (5, 256))

# Razão de redução padrão do bloco SE
DEFAULT_SE_REDUCTION = 16


# =========================================================================
# EXECUÇÃO EM GRUPOS E BENCHMARK
# =========================================================================

# Buffers de posto 4 (R × W × W × Cv) vivos simultaneamente em um grupo
LIVE_GROUP_BUFFERS = 2

# Valores padrão do benchmark (três resoluções × cinco quantidades de grupos)
DEFAULT_BENCH_HEIGHTS = (16, 32, 64)
DEFAULT_BENCH_WIDTHS = (16, 32, 64)
DEFAULT_BENCH_CHANNELS = (32,)
DEFAULT_BENCH_GROUPS = (1, 2, 4, 8, 16)
DEFAULT_BENCH_REPEATS = 5
DEFAULT_BENCH_GATE_DEPTH = 5
DEFAULT_BENCH_GATE_WIDTH = 32

# Semente global padrão
DEFAULT_SEED = 42

# Cabeçalho versionado do CSV de benchmark
CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("G", "H", "W", "C", "padding", "peak_elements", "wall_time_s", "repeats")


# =========================================================================
# FORMATO DO CONTÊINER DE TENSORES
# =========================================================================

CONTAINER_MAGIC = b"CAAT"
CONTAINER_VERSION = 1
CONTAINER_SUFFIX = ".caat"
MANIFEST_NAME = "manifest.txt"


# =========================================================================
# MODELO DE CUSTO
# =========================================================================

# Uma multiplicação-acumulação equivale a duas operações de ponto flutuante
FLOPS_PER_MAC = 2
