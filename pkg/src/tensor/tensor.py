from __future__ import annotations

import math
from src.core.compat import StrEnum
from typing import Any

import numpy as np

from src.core import DTypeError, NonFiniteError, ShapeError, check_finite_enabled
from src.tensor.memory import observe_allocation

# Lido uma vez por processo: a checagem roda após cada operação
_CHECK_FINITE = check_finite_enabled()


class DType(StrEnum):
    """
    Tipos de elemento suportados pelo núcleo de tensores.
    """

    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def numpy(self) -> np.dtype:
        return np.dtype(self.value)

    @property
    def tag(self) -> int:
        """
        Código do tipo no contêiner binário (0=float32, 1=float64).
        """
        return 0 if self is DType.FLOAT32 else 1

    @property
    def itemsize(self) -> int:
        return self.numpy.itemsize

    @classmethod
    def from_tag(cls, tag: int) -> DType:
        if tag == 0:
            return cls.FLOAT32
        if tag == 1:
            return cls.FLOAT64
        raise DTypeError(f"Código de tipo desconhecido: {tag}")

    @classmethod
    def of(cls, value: DType | str | np.dtype) -> DType:
        try:
            return cls(np.dtype(value).name)
        except (TypeError, ValueError) as e:
            raise DTypeError(f"Tipo de elemento não suportado: {value}") from e


class Tensor:
    """
    Array denso, contíguo em ordem de linha e imutável após a construção.

    O campo `tape_id` liga o tensor a uma fita de diferenciação reversa quando ele foi
    registrado (ou produzido) dentro de uma `Tape` ativa.
    """

    __slots__ = ("__weakref__", "_data", "node_index", "tape_id")

    def __init__(self, data: Any, dtype: DType | str | None = None):
        if dtype is None:
            source_dtype = getattr(data, "dtype", None)
            dtype = DType.FLOAT32 if source_dtype == np.float32 else DType.FLOAT64
        resolved = DType.of(dtype)

        arr = np.array(data, dtype=resolved.numpy, copy=True, order="C")
        self._init_from_array(arr)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> Tensor:
        """
        Constrói um Tensor a partir de um array produzido internamente, sem cópia extra.

        Args:
            arr (np.ndarray): Resultado de uma operação do núcleo.

        Returns:
            Tensor: Tensor que passa a ser o único dono lógico do array.
        """
        DType.of(arr.dtype)
        out = cls.__new__(cls)
        out._init_from_array(np.require(arr, requirements="C"))
        return out

    def _init_from_array(self, arr: np.ndarray) -> None:
        if any(d <= 0 for d in arr.shape):
            raise ShapeError(f"Todas as dimensões devem ser positivas, recebido {arr.shape}")

        if _CHECK_FINITE and not np.isfinite(arr).all():
            raise NonFiniteError(f"Valores não finitos em tensor de formato {arr.shape}")

        arr.setflags(write=False)
        self._data = arr
        self.tape_id: int | None = None
        self.node_index: int | None = None
        observe_allocation(arr)

    # =========================================================================
    # PROPRIEDADES
    # =========================================================================

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def dtype(self) -> DType:
        return DType(self._data.dtype.name)

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return math.prod(self._data.shape)

    def numpy(self) -> np.ndarray:
        """
        Devolve o array subjacente, somente leitura.
        """
        return self._data

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() exige tensor com um elemento, formato {self.shape}")
        return float(self._data.reshape(-1)[0])

    def tolist(self) -> list | float:
        return self._data.tolist()

    def astype(self, dtype: DType | str) -> Tensor:
        return Tensor(self._data, dtype)

    def __repr__(self) -> str:
        tape = f", tape={self.tape_id}" if self.tape_id is not None else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype.value}{tape})"


def zeros(shape: tuple[int, ...], dtype: DType | str = DType.FLOAT64) -> Tensor:
    return Tensor._wrap(np.zeros(shape, dtype=DType.of(dtype).numpy))


def ones(shape: tuple[int, ...], dtype: DType | str = DType.FLOAT64) -> Tensor:
    return Tensor._wrap(np.ones(shape, dtype=DType.of(dtype).numpy))
