from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from contextvars import ContextVar, Token
from dataclasses import dataclass

import numpy as np

from src.core import FINITE_DIFF_EPS, TapeError
from src.tensor.tensor import DType, Tensor

logger = logging.getLogger(__name__)

# Recebe o gradiente da saída e devolve um gradiente (ou None) por entrada
VJP = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_ACTIVE_TAPE: ContextVar[Tape | None] = ContextVar("caa_active_tape", default=None)


@dataclass(frozen=True, slots=True)
class _Node:
    parents: tuple[int | None, ...]
    vjp: VJP | None
    shape: tuple[int, ...]


class Tape:
    """
    Fita de diferenciação reversa.

    Dentro de `with tape:` toda operação do núcleo que recebe um tensor da fita é registrada
    em ordem de execução, que já é uma ordem topológica. Cada fita é construída por uma única
    thread; fitas diferentes podem rodar em paralelo.
    """

    _ids = itertools.count(1)

    def __init__(self) -> None:
        self.id = next(Tape._ids)
        self._nodes: list[_Node] = []
        self._params: list[Tensor] = []
        self._tokens: list[Token] = []

    def __enter__(self) -> Tape:
        self._tokens.append(_ACTIVE_TAPE.set(self))
        return self

    def __exit__(self, *exc_info: object) -> None:
        _ACTIVE_TAPE.reset(self._tokens.pop())

    @property
    def params(self) -> list[Tensor]:
        return list(self._params)

    def __len__(self) -> int:
        return len(self._nodes)

    def watch(self, tensor: Tensor) -> Tensor:
        """
        Registra um parâmetro na fita.

        O tensor original não é alterado: devolve-se um novo tensor que compartilha os mesmos
        valores (somente leitura) e participa da fita.

        Args:
            tensor (Tensor): Parâmetro a ser diferenciado.

        Returns:
            Tensor: Alias registrado como folha da fita.
        """
        alias = Tensor._wrap(tensor.numpy())
        self._attach(alias, parents=(), vjp=None)
        self._params.append(alias)
        return alias

    def record(self, out: Tensor, inputs: Sequence[Tensor], vjp: VJP) -> None:
        parents = tuple(t.node_index if t.tape_id == self.id else None for t in inputs)
        self._attach(out, parents=parents, vjp=vjp)

    def _attach(self, tensor: Tensor, parents: tuple[int | None, ...], vjp: VJP | None) -> None:
        tensor.tape_id = self.id
        tensor.node_index = len(self._nodes)
        self._nodes.append(_Node(parents=parents, vjp=vjp, shape=tensor.shape))


def active_tape() -> Tape | None:
    return _ACTIVE_TAPE.get()


def record(out: Tensor, inputs: Sequence[Tensor], vjp: VJP) -> Tensor:
    """
    Registra `out` na fita ativa quando alguma entrada pertence a ela.

    Args:
        out (Tensor): Resultado recém-criado da operação.
        inputs (Sequence[Tensor]): Operandos na ordem esperada pelo `vjp`.
        vjp (VJP): Produto vetor-Jacobiano da operação.

    Returns:
        Tensor: O próprio `out`, para encadear no retorno das operações.
    """
    tape = _ACTIVE_TAPE.get()
    if tape is not None and any(t.tape_id == tape.id for t in inputs):
        tape.record(out, inputs, vjp)
    return out


def backward(tape: Tape, output: Tensor) -> dict[Tensor, Tensor]:
    """
    Propaga o gradiente de uma saída escalar até os parâmetros registrados na fita.

    Os nós são visitados em ordem reversa de registro e as contribuições de cada pai são
    acumuladas na ordem dos operandos, o que torna o resultado determinístico.

    Args:
        tape (Tape): Fita onde o grafo foi gravado.
        output (Tensor): Saída escalar alcançável a partir dos parâmetros.

    Returns:
        dict[Tensor, Tensor]: Gradiente dSaída/dParâmetro para cada parâmetro da fita
        (zeros quando o parâmetro não influencia a saída).

    Raises:
        TapeError: Se a saída não for escalar ou não pertencer à fita.
    """
    if output.size != 1:
        raise TapeError(f"backward exige saída escalar, recebido formato {output.shape}")
    if output.tape_id != tape.id or output.node_index is None:
        raise TapeError("A saída não foi registrada nesta fita")

    nodes = tape._nodes
    pending: dict[int, np.ndarray] = {output.node_index: np.ones(output.shape, dtype=np.float64)}
    leaves: dict[int, np.ndarray] = {}

    for index in range(output.node_index, -1, -1):
        grad = pending.pop(index, None)
        if grad is None:
            continue

        node = nodes[index]
        if node.vjp is None:
            leaves[index] = grad
            continue

        for parent, parent_grad in zip(node.parents, node.vjp(grad), strict=True):
            if parent is None or parent_grad is None:
                continue
            if parent_grad.shape != nodes[parent].shape:
                raise TapeError(
                    f"Gradiente com formato {parent_grad.shape} para nó de formato "
                    f"{nodes[parent].shape}"
                )
            previous = pending.get(parent)
            pending[parent] = parent_grad if previous is None else previous + parent_grad

    result = {}
    for param in tape.params:
        grad = leaves.get(param.node_index)
        if grad is None:
            grad = np.zeros(param.shape, dtype=np.float64)
        result[param] = Tensor(grad, param.dtype)

    logger.debug(f"backward: {len(nodes)} nós na fita, {len(result)} parâmetros")
    return result


def _as_scalar(value: Tensor | float) -> float:
    if isinstance(value, Tensor):
        return value.item()
    return float(value)


def finite_diff(
    f: Callable[[Tensor], Tensor | float], x: Tensor, eps: float = FINITE_DIFF_EPS
) -> Tensor:
    """
    Oráculo de gradiente por diferenças centrais, calculado em float64.

    Args:
        f (Callable[[Tensor], Tensor | float]): Função pura de tensor para escalar.
        x (Tensor): Ponto de avaliação.
        eps (float): Passo da perturbação, estritamente positivo.

    Returns:
        Tensor: (f(x+εe) − f(x−εe)) / 2ε para cada coordenada, no formato de `x`.
    """
    if eps <= 0:
        raise ValueError(f"eps deve ser positivo, recebido {eps}")

    base = np.array(x.numpy(), dtype=np.float64)
    grad = np.empty_like(base)
    flat_base = base.reshape(-1)
    flat_grad = grad.reshape(-1)

    for k in range(flat_base.size):
        plus = flat_base.copy()
        minus = flat_base.copy()
        plus[k] += eps
        minus[k] -= eps

        f_plus = _as_scalar(f(Tensor(plus.reshape(base.shape), DType.FLOAT64)))
        f_minus = _as_scalar(f(Tensor(minus.reshape(base.shape), DType.FLOAT64)))
        flat_grad[k] = (f_plus - f_minus) / (2.0 * eps)

    return Tensor(grad, DType.FLOAT64)
