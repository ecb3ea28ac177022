"""
Linhas de base de atenção dupla: bloco Squeeze-and-Excitation e suas combinações paralela e
sequencial com a atenção axial.
"""

from src.core import ShapeError
from src.kernels import axial_attention
from src.schemas import AttnParams, SEParams
from src.tensor import Tensor, add, contract, mul, reduce, relu, reshape, sigmoid


def se_block(x: Tensor, p: SEParams) -> Tensor:
    """
    y = x ⊙ sigmoid(relu(média_{H,W}(x) · w1) · w2), um vetor de portão por canal.

    Args:
        x (Tensor): Entrada [C, H, W].
        p (SEParams): Pesos C→r→C.

    Returns:
        Tensor: Saída [C, H, W]; com bypass, a própria entrada.

    Raises:
        ShapeError: Se C não corresponder à largura de w1.
    """
    if x.ndim != 3 or x.shape[0] != p.channels:
        raise ShapeError(f"SE com {p.channels} canais para entrada de formato {x.shape}")
    if p.bypass:
        return x

    pooled = reduce(x, (1, 2), "mean")
    hidden = relu(contract(pooled, p.w1, "c,cr->r"))
    gate = sigmoid(contract(hidden, p.w2, "r,rc->c"))
    return mul(x, reshape(gate, (p.channels, 1, 1)))


def _require_square_values(p: AttnParams) -> None:
    if p.dims.value_channels != p.dims.channels:
        raise ShapeError(
            f"Combinação com SE exige Cv = C, recebido Cv={p.dims.value_channels} "
            f"e C={p.dims.channels}"
        )


def dual_parallel(x: Tensor, p: AttnParams, se: SEParams) -> Tensor:
    """
    Ramos espacial e de canal em paralelo: axial_attention(x) + se_block(x).
    """
    _require_square_values(p)
    return add(axial_attention(x, p), se_block(x, se))


def dual_sequential(x: Tensor, p: AttnParams, se: SEParams, *, se_first: bool = False) -> Tensor:
    """
    Ramos em sequência. Padrão: SE aplicado sobre a saída da atenção axial.

    Args:
        x (Tensor): Entrada [C, H, W].
        p (AttnParams): Parâmetros da atenção (Cv = C).
        se (SEParams): Pesos do SE.
        se_first (bool): Aplica o SE antes da atenção axial.

    Returns:
        Tensor: Saída [C, H, W].
    """
    _require_square_values(p)
    if se_first:
        return axial_attention(se_block(x, se), p)
    return se_block(axial_attention(x, p), se)
