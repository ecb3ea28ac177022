import numpy as np

from src.core import ShapeError
from src.tensor import Tensor


def relative_error(actual: Tensor, expected: Tensor) -> float:
    """
    Erro relativo em norma máxima: max|a − b| / max|b|.

    Quando a referência é identicamente nula, devolve o erro absoluto.
    """
    if actual.shape != expected.shape:
        raise ShapeError(f"Formatos diferentes na comparação: {actual.shape} e {expected.shape}")

    a = np.asarray(actual.numpy(), dtype=np.float64)
    b = np.asarray(expected.numpy(), dtype=np.float64)
    if a.size == 0:
        return 0.0

    diff = float(np.max(np.abs(a - b)))
    scale = float(np.max(np.abs(b)))
    return diff / scale if scale > 0.0 else diff


def bitwise_equal(a: Tensor, b: Tensor) -> bool:
    """
    Igualdade bit a bit (formato, tipo e representação binária de cada elemento).
    """
    if a.shape != b.shape or a.dtype != b.dtype:
        return False
    return a.numpy().tobytes() == b.numpy().tobytes()


def permute_axis(t: Tensor, axis: int, order: list[int]) -> Tensor:
    return Tensor(np.take(t.numpy(), order, axis=axis), t.dtype)
