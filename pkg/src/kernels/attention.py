"""
Kernels de autoatenção e de atenção axial, e a decomposição da atenção axial nas
características intermediárias α (agregada por coluna) e β.

Layout: entradas e saídas são [C, H, W]. Os mapas e intermediários usam os índices
(i, j) da posição de consulta, m da linha percorrida pela atenção de coluna e n da coluna
percorrida pela atenção de linha.
"""

import logging

from src.core import DTypeError, OracleCapError, ShapeError, oracle_cap_from_env
from src.schemas import AttentionMaps, AttnParams, Breakdown
from src.tensor import Tensor, contract, mul, reduce, reshape, softmax, transpose

logger = logging.getLogger(__name__)


def check_input(x: Tensor, p: AttnParams) -> None:
    """
    Confere se `x` está no layout [C, H, W] declarado pela geometria dos parâmetros.

    Raises:
        ShapeError: Posto ou dimensões diferentes de (C, H, W).
        DTypeError: Tipo de `x` diferente do tipo dos parâmetros.
    """
    d = p.dims
    expected = (d.channels, d.height, d.width)
    if x.shape != expected:
        raise ShapeError(f"Entrada com formato {x.shape}, esperado {expected} (C, H, W)")
    if x.dtype is not p.dtype:
        raise DTypeError(f"Entrada em {x.dtype.value} e parâmetros em {p.dtype.value}")


def project(x: Tensor, m: Tensor) -> Tensor:
    """
    Aplica uma projeção 1×1 (mapa linear por pixel, sem bias).

    Args:
        x (Tensor): Entrada [C, H, W].
        m (Tensor): Matriz C × C'.

    Returns:
        Tensor: Saída [C', H, W].

    Raises:
        ShapeError: Se os canais de `x` não corresponderem às linhas de `m`.
    """
    if x.ndim != 3 or m.ndim != 2:
        raise ShapeError(f"project espera [C, H, W] e matriz, recebido {x.shape} e {m.shape}")
    if x.shape[0] != m.shape[0]:
        raise ShapeError(f"Entrada com {x.shape[0]} canais para matriz {m.shape}")

    return contract(x, m, "chw,cd->dhw")


def attention_maps(x: Tensor, p: AttnParams) -> AttentionMaps:
    """
    Calcula os mapas de atenção de coluna (θ) e de linha (φ).

    Consulta e chave usam a mesma projeção em cada estágio. `a_col` é normalizado sobre m
    (eixo 1) e `a_row` sobre n (eixo 2).

    Args:
        x (Tensor): Entrada [C, H, W].
        p (AttnParams): Parâmetros da camada.

    Returns:
        AttentionMaps: a_col (H × H × W) e a_row (H × W × W).
    """
    check_input(x, p)

    qc = project(x, p.theta)
    a_col = softmax(contract(qc, qc, "kij,kmj->imj"), axis=1)
    del qc

    qr = project(x, p.phi)
    a_row = softmax(contract(qr, qr, "kij,kin->ijn"), axis=2)

    return AttentionMaps(a_col=a_col, a_row=a_row)


def column_aggregate(a_col: Tensor, v: Tensor) -> Tensor:
    """
    alpha_sum[i, j, n, c] = Σ_m a_col[i, m, j] · v[c, m, n].

    Os pesos de coluna são os da coluna de consulta j, aplicados aos valores da coluna n.
    Aceita um recorte de linhas de `a_col` (execução em grupos).
    """
    return contract(a_col, v, "imj,cmn->ijnc")


def row_weighted(features: Tensor, a_row: Tensor) -> Tensor:
    """
    Multiplica características (i, j, n, c) pelo peso de linha a_row[i, j, n].
    """
    rows, width = a_row.shape[0], a_row.shape[1]
    return mul(features, reshape(a_row, (rows, width, width, 1)))


def breakdown(
    x: Tensor,
    maps: AttentionMaps,
    p: AttnParams,
    *,
    materialize_alpha: bool = False,
    max_alpha_elements: int | None = None,
) -> Breakdown:
    """
    Decompõe a atenção axial em reponderação (α, β) e soma.

    Args:
        x (Tensor): Entrada [C, H, W] usada para gerar `maps`.
        maps (AttentionMaps): Mapas de atenção da mesma entrada e dos mesmos parâmetros.
        p (AttnParams): Parâmetros da camada.
        materialize_alpha (bool): Materializa α completo (H × W × H × W × Cv).
        max_alpha_elements (int | None): Limite de elementos de α; padrão lido do ambiente.

    Returns:
        Breakdown: values, alpha_sum, beta e, se pedido, alpha_full.

    Raises:
        OracleCapError: Se α completo exceder o limite.
    """
    check_input(x, p)
    d = p.dims

    v = project(x, p.g)
    alpha_sum = column_aggregate(maps.a_col, v)
    beta = row_weighted(alpha_sum, maps.a_row)

    alpha_full = None
    if materialize_alpha:
        cap = max_alpha_elements if max_alpha_elements is not None else oracle_cap_from_env()
        elements = d.height * d.width * d.height * d.width * d.value_channels
        if elements > cap:
            raise OracleCapError(
                f"α completo teria {elements} elementos, acima do limite de {cap}"
            )
        alpha_full = contract(maps.a_col, v, "imj,cmn->ijmnc")
        logger.debug(f"α materializado com formato {alpha_full.shape}")

    return Breakdown(values=v, alpha_sum=alpha_sum, beta=beta, alpha_full=alpha_full)


def axial_attention(x: Tensor, p: AttnParams) -> Tensor:
    """
    Atenção axial: y_{i,j} = Σ_n a_row[i,j,n] · Σ_m a_col[i,m,j] · g(x)_{m,n}.

    Returns:
        Tensor: Saída [Cv, H, W].
    """
    maps = attention_maps(x, p)
    parts = breakdown(x, maps, p)
    return transpose(reduce(parts.beta, (2,)), (2, 0, 1))


def attention_sum(x: Tensor, p: AttnParams) -> Tensor:
    """
    Soma ponderada da autoatenção no layout (i, j, c): Σ_{m,n} f(x_{i,j}, x_{m,n}) · g(x_{m,n}).
    """
    check_input(x, p)
    d = p.dims
    hw = d.height * d.width

    q = project(x, p.theta)
    logits = reshape(contract(q, q, "kij,kmn->ijmn"), (d.height, d.width, hw))
    weights = softmax(logits, axis=2)
    del q, logits

    v = project(x, p.g)
    v_flat = reshape(transpose(v, (1, 2, 0)), (hw, d.value_channels))
    return contract(weights, v_flat, "ijk,kc->ijc")


def self_attention(x: Tensor, p: AttnParams) -> Tensor:
    """
    Autoatenção espacial 2D com softmax sobre todas as posições (m, n).

    Args:
        x (Tensor): Entrada [C, H, W].
        p (AttnParams): θ é usado para consulta e chave; g para os valores (φ não participa).

    Returns:
        Tensor: Saída [Cv, H, W].
    """
    return transpose(attention_sum(x, p), (2, 0, 1))
