import hashlib

import numpy as np

from src.tensor.tensor import DType, Tensor

_MAX_SEED = 2**64


def _name_key(name: str) -> int:
    """
    Hash estável (não salgado) de 64 bits do nome do tensor.
    """
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Rng:
    """
    Gerador pseudoaleatório determinístico com um subfluxo por tensor.

    Algoritmo: PCG64 do numpy, semeado por `SeedSequence([seed, blake2b_64(nome)])`. Como o
    subfluxo depende apenas da semente e do nome, a mesma semente e os mesmos nomes produzem
    tensores idênticos bit a bit, em qualquer ordem de chamada e em qualquer processo.
    Os valores são sempre gerados em float64 e só depois convertidos para o tipo pedido.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < _MAX_SEED:
            raise ValueError(f"A semente deve caber em 64 bits sem sinal, recebido {seed}")
        self.seed = seed

    def generator(self, name: str) -> np.random.Generator:
        sequence = np.random.SeedSequence([self.seed, _name_key(name)])
        return np.random.Generator(np.random.PCG64(sequence))

    def uniform(
        self,
        name: str,
        shape: tuple[int, ...],
        low: float = -1.0,
        high: float = 1.0,
        dtype: DType | str = DType.FLOAT64,
    ) -> Tensor:
        values = self.generator(name).uniform(low, high, size=shape)
        return Tensor(values, dtype)

    def child(self, scope: str) -> "Rng":
        """
        Deriva um gerador independente para um escopo (ex.: uma amostra ou um caso de teste).
        """
        return Rng(_name_key(f"{self.seed}/{scope}"))
