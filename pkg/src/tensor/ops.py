"""
Operações primitivas do núcleo de tensores.

Todas as reduções acumulam em ordem crescente de índice, uma parcela por vez, sem
reassociação. Isso faz com que o valor de cada elemento de saída dependa apenas da sua
própria sequência de parcelas, e não de quantas linhas vizinhas são processadas juntas.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from src.core.compat import StrEnum

import numpy as np

from src.core import DEFAULT_LEAKY_SLOPE, AxisError, BroadcastError, DTypeError, ShapeError
from src.tensor.autodiff import record
from src.tensor.tensor import Tensor


class Elementwise(StrEnum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    SIGMOID = "sigmoid"
    SCALE = "scale"
    ADD = "add"
    MUL = "mul"


class ReduceMode(StrEnum):
    SUM = "sum"
    MEAN = "mean"


# =========================================================================
# AUXILIARES INTERNOS
# =========================================================================


def _normalize_axis(axis: int, ndim: int) -> int:
    if not -ndim <= axis < ndim:
        raise AxisError(f"Eixo {axis} inválido para tensor de posto {ndim}")
    return axis % ndim


def _same_dtype(a: Tensor, b: Tensor) -> None:
    if a.dtype is not b.dtype:
        raise DTypeError(f"Operandos com tipos diferentes: {a.dtype.value} e {b.dtype.value}")


def _broadcast_shape(a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise BroadcastError(a.shape, b.shape) from e


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """
    Soma o gradiente sobre os eixos que foram expandidos pelo broadcast.
    """
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    expanded = tuple(i for i, size in enumerate(shape) if size == 1 and grad.shape[i] != 1)
    if expanded:
        grad = grad.sum(axis=expanded, keepdims=True)
    return grad


def _ordered_sum(x: np.ndarray, axes: Sequence[int], keepdims: bool = False) -> np.ndarray:
    """
    Soma sobre `axes` percorrendo as combinações de índices em ordem lexicográfica crescente.

    Args:
        x (np.ndarray): Array de entrada.
        axes (Sequence[int]): Eixos já normalizados e distintos.
        keepdims (bool): Mantém os eixos reduzidos com tamanho 1.

    Returns:
        np.ndarray: Resultado com a mesma precisão da entrada.
    """
    axes = sorted(axes)
    moved = np.moveaxis(x, axes, list(range(len(axes))))
    rest = moved.shape[len(axes) :]
    count = math.prod(moved.shape[: len(axes)])
    flat = moved.reshape((count, *rest))

    acc = np.zeros(rest, dtype=x.dtype)
    for k in range(count):
        acc += flat[k]

    if keepdims:
        acc = np.expand_dims(acc, tuple(axes))
    return acc


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    ex = np.exp(x[~positive])
    out[~positive] = ex / (1.0 + ex)

    # Mantém a saída estritamente dentro de (0, 1) mesmo quando exp satura
    low = np.finfo(x.dtype).tiny
    high = np.nextafter(x.dtype.type(1), x.dtype.type(0))
    np.clip(out, low, high, out=out)
    return out


# =========================================================================
# OPERAÇÕES ELEMENTO A ELEMENTO
# =========================================================================


def elementwise(
    fn: Elementwise | str,
    a: Tensor,
    b: Tensor | None = None,
    *,
    slope: float = DEFAULT_LEAKY_SLOPE,
    k: float | None = None,
) -> Tensor:
    """
    Aplica uma função elemento a elemento (unária ou binária).

    Operações binárias seguem a regra de broadcast pelos eixos finais: os formatos são
    alinhados à direita e cada par de dimensões deve ser igual ou conter um 1.

    Args:
        fn (Elementwise | str): relu, leaky_relu, sigmoid, scale, add ou mul.
        a (Tensor): Primeiro operando.
        b (Tensor | None): Segundo operando, obrigatório para add e mul.
        slope (float): Inclinação da parte negativa da leaky_relu.
        k (float | None): Fator de escala para scale.

    Returns:
        Tensor: Resultado no formato do broadcast.

    Raises:
        BroadcastError: Se os formatos não forem compatíveis.
    """
    fn = Elementwise(fn)
    x = a.numpy()

    if fn is Elementwise.RELU:
        y = np.maximum(x, 0)
        return record(Tensor._wrap(y), [a], lambda g: (g * (x > 0),))

    if fn is Elementwise.LEAKY_RELU:
        y = np.where(x > 0, x, x * slope)
        return record(Tensor._wrap(y), [a], lambda g: (np.where(x > 0, g, g * slope),))

    if fn is Elementwise.SIGMOID:
        y = _sigmoid(x)
        return record(Tensor._wrap(y), [a], lambda g: (g * y * (1.0 - y),))

    if fn is Elementwise.SCALE:
        if k is None:
            raise ValueError("scale exige o fator k")
        factor = x.dtype.type(k)
        return record(Tensor._wrap(x * factor), [a], lambda g: (g * factor,))

    if b is None:
        raise ValueError(f"{fn.value} exige dois operandos")

    _same_dtype(a, b)
    _broadcast_shape(a, b)
    z = b.numpy()

    if fn is Elementwise.ADD:
        return record(
            Tensor._wrap(x + z),
            [a, b],
            lambda g: (_unbroadcast(g, x.shape), _unbroadcast(g, z.shape)),
        )

    return record(
        Tensor._wrap(x * z),
        [a, b],
        lambda g: (_unbroadcast(g * z, x.shape), _unbroadcast(g * x, z.shape)),
    )


def relu(a: Tensor) -> Tensor:
    return elementwise(Elementwise.RELU, a)


def leaky_relu(a: Tensor, slope: float = DEFAULT_LEAKY_SLOPE) -> Tensor:
    return elementwise(Elementwise.LEAKY_RELU, a, slope=slope)


def sigmoid(a: Tensor) -> Tensor:
    return elementwise(Elementwise.SIGMOID, a)


def scale(a: Tensor, k: float) -> Tensor:
    return elementwise(Elementwise.SCALE, a, k=k)


def add(a: Tensor, b: Tensor) -> Tensor:
    return elementwise(Elementwise.ADD, a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return elementwise(Elementwise.MUL, a, b)


# =========================================================================
# CONTRAÇÃO (PRODUTOS ESCALARES ENTRE EIXOS PAREADOS)
# =========================================================================


def _parse_subscripts(subscripts: str, a: Tensor, b: Tensor) -> tuple[str, str, str]:
    spec = subscripts.replace(" ", "")
    inputs, arrow, output = spec.partition("->")
    left, comma, right = inputs.partition(",")

    if not comma or not left.isalpha() or not right.isalpha():
        raise AxisError(f"Descritor de contração inválido: '{subscripts}'")

    if not arrow:
        # Sem saída explícita: eixos não pareados de a, depois de b, na ordem declarada
        output = "".join(c for c in left if c not in right) + "".join(
            c for c in right if c not in left
        )

    for labels, name in ((left, "a"), (right, "b"), (output, "saída")):
        if len(set(labels)) != len(labels):
            raise AxisError(f"Rótulo repetido no operando {name}: '{labels}'")

    if len(left) != a.ndim or len(right) != b.ndim:
        raise AxisError(
            f"Descritor '{subscripts}' não corresponde aos postos {a.ndim} e {b.ndim}"
        )

    unknown = set(output) - set(left) - set(right)
    if unknown:
        raise AxisError(f"Rótulos de saída ausentes das entradas: {sorted(unknown)}")

    return left, right, output


def _label_sizes(left: str, right: str, a_shape, b_shape) -> dict[str, int]:
    sizes: dict[str, int] = dict(zip(left, a_shape, strict=True))
    for label, size in zip(right, b_shape, strict=True):
        if label in sizes and sizes[label] != size:
            raise ShapeError(
                f"Eixo pareado '{label}' com tamanhos diferentes: {sizes[label]} e {size}"
            )
        sizes[label] = size
    return sizes


def _align(arr: np.ndarray, labels: str, layout: str, sizes: dict[str, int]) -> np.ndarray:
    present = [c for c in layout if c in labels]
    moved = arr.transpose([labels.index(c) for c in present])
    return moved.reshape([sizes[c] if c in labels else 1 for c in layout])


def _contract_arrays(left: str, right: str, output: str, x: np.ndarray, z: np.ndarray):
    sizes = _label_sizes(left, right, x.shape, z.shape)
    summed = "".join(dict.fromkeys(c for c in left + right if c not in output))
    layout = summed + output

    xa = _align(x, left, layout, sizes)
    za = _align(z, right, layout, sizes)

    if not summed:
        return np.require(xa * za, requirements="C")

    out_shape = tuple(sizes[c] for c in output)
    acc = np.zeros(out_shape, dtype=np.result_type(x, z))

    ranges = [range(sizes[c]) for c in summed]
    for idx in itertools.product(*ranges):
        xi = tuple(i if c in left else 0 for i, c in zip(idx, summed, strict=True))
        zi = tuple(i if c in right else 0 for i, c in zip(idx, summed, strict=True))
        acc += xa[xi] * za[zi]

    return acc


def _contract_grad(
    grad: np.ndarray,
    grad_labels: str,
    other: np.ndarray,
    other_labels: str,
    target_labels: str,
    target_shape: tuple[int, ...],
) -> np.ndarray:
    # Rótulos que só existiam no alvo foram somados sem parceiro: o gradiente é constante neles
    reachable = "".join(c for c in target_labels if c in grad_labels or c in other_labels)
    partial = _contract_arrays(grad_labels, other_labels, reachable, grad, other)

    sizes = dict(zip(target_labels, target_shape, strict=True))
    shaped = _align(partial, reachable, target_labels, sizes)
    return np.broadcast_to(shaped, target_shape).copy()


def contract(a: Tensor, b: Tensor, subscripts: str) -> Tensor:
    """
    Soma de produtos entre dois tensores descrita por rótulos de eixo (estilo einsum).

    Cada rótulo presente nas duas entradas e ausente da saída é um eixo pareado e somado;
    rótulos das duas entradas que aparecem na saída são eixos de lote. Sem `->`, a saída é
    formada pelos eixos não pareados de `a` e depois de `b`, na ordem declarada.
    A soma percorre os índices pareados em ordem crescente.

    Args:
        a (Tensor): Primeiro operando.
        b (Tensor): Segundo operando.
        subscripts (str): Descritor, ex.: "kij,kmj->imj".

    Returns:
        Tensor: Resultado da contração.

    Raises:
        ShapeError: Se eixos pareados tiverem tamanhos diferentes.
        AxisError: Se o descritor for inconsistente com os postos.
    """
    _same_dtype(a, b)
    left, right, output = _parse_subscripts(subscripts, a, b)
    x = a.numpy()
    z = b.numpy()
    y = _contract_arrays(left, right, output, x, z)

    def vjp(g: np.ndarray):
        return (
            _contract_grad(g, output, z, right, left, x.shape),
            _contract_grad(g, output, x, left, right, z.shape),
        )

    return record(Tensor._wrap(y), [a, b], vjp)


# =========================================================================
# SOFTMAX E REDUÇÕES
# =========================================================================


def softmax(t: Tensor, axis: int) -> Tensor:
    """
    Softmax numericamente estável ao longo de um eixo.

    O máximo da fatia é subtraído antes da exponenciação, então logits grandes não
    estouram.

    Args:
        t (Tensor): Logits.
        axis (int): Eixo normalizado.

    Returns:
        Tensor: Valores em (0, 1] cuja soma ao longo do eixo é 1.
    """
    ax = _normalize_axis(axis, t.ndim)
    x = t.numpy()

    shifted = x - np.max(x, axis=ax, keepdims=True)
    e = np.exp(shifted)
    y = e / _ordered_sum(e, [ax], keepdims=True)

    def vjp(g: np.ndarray):
        return (y * (g - np.sum(g * y, axis=ax, keepdims=True)),)

    return record(Tensor._wrap(y), [t], vjp)


def reduce(t: Tensor, axes: Sequence[int], mode: ReduceMode | str = ReduceMode.SUM) -> Tensor:
    """
    Soma ou média sobre um conjunto de eixos, removendo-os do resultado.

    Args:
        t (Tensor): Entrada.
        axes (Sequence[int]): Eixos válidos e distintos.
        mode (ReduceMode | str): "sum" ou "mean" (soma dividida pelo número de parcelas).

    Returns:
        Tensor: Tensor sem os eixos reduzidos.

    Raises:
        AxisError: Eixo inválido, repetido ou conjunto vazio.
    """
    mode = ReduceMode(mode)
    normalized = [_normalize_axis(ax, t.ndim) for ax in axes]
    if not normalized:
        raise AxisError("reduce exige ao menos um eixo")
    if len(set(normalized)) != len(normalized):
        raise AxisError(f"Eixos repetidos em reduce: {list(axes)}")

    x = t.numpy()
    count = math.prod(x.shape[ax] for ax in normalized)
    y = _ordered_sum(x, normalized)
    if mode is ReduceMode.MEAN:
        y = y / count

    def vjp(g: np.ndarray):
        expanded = np.expand_dims(g, tuple(sorted(normalized)))
        if mode is ReduceMode.MEAN:
            expanded = expanded / count
        return (np.broadcast_to(expanded, x.shape).copy(),)

    return record(Tensor._wrap(y), [t], vjp)


# =========================================================================
# LAYOUT: RESHAPE, TRANSPOSE, PADDING, FATIAS E CONCATENAÇÃO
# =========================================================================


def reshape(t: Tensor, shape: Sequence[int]) -> Tensor:
    x = t.numpy()
    try:
        y = x.reshape(tuple(shape))
    except ValueError as e:
        raise ShapeError(f"reshape de {t.shape} para {tuple(shape)} altera o número de elementos") from e

    return record(Tensor._wrap(y), [t], lambda g: (g.reshape(x.shape),))


def transpose(t: Tensor, perm: Sequence[int]) -> Tensor:
    perm = tuple(perm)
    if sorted(perm) != list(range(t.ndim)):
        raise AxisError(f"Permutação inválida {perm} para tensor de posto {t.ndim}")

    inverse = tuple(int(i) for i in np.argsort(perm))
    y = np.require(np.transpose(t.numpy(), perm), requirements="C")
    return record(Tensor._wrap(y), [t], lambda g: (np.transpose(g, inverse),))


def pad_axis(t: Tensor, axis: int, count: int, value: float = 0.0) -> Tensor:
    """
    Acrescenta `count` entradas iguais a `value` no final de um eixo.

    Args:
        t (Tensor): Entrada.
        axis (int): Eixo a ser estendido.
        count (int): Quantidade de entradas acrescentadas (>= 0).
        value (float): Valor de preenchimento.

    Returns:
        Tensor: O próprio tensor se `count` for 0; senão uma cópia estendida.
    """
    ax = _normalize_axis(axis, t.ndim)
    if count < 0:
        raise ShapeError(f"Padding negativo: {count}")
    if count == 0:
        return t

    x = t.numpy()
    widths = [(0, 0)] * x.ndim
    widths[ax] = (0, count)
    y = np.pad(x, widths, mode="constant", constant_values=value)

    original = x.shape[ax]
    return record(Tensor._wrap(y), [t], lambda g: (np.take(g, range(original), axis=ax),))


def slice_axis(t: Tensor, axis: int, start: int, stop: int) -> Tensor:
    """
    Copia o intervalo semiaberto [start, stop) de um eixo.
    """
    ax = _normalize_axis(axis, t.ndim)
    size = t.shape[ax]
    if not 0 <= start < stop <= size:
        raise ShapeError(f"Intervalo [{start}, {stop}) inválido para eixo de tamanho {size}")

    x = t.numpy()
    index = [slice(None)] * x.ndim
    index[ax] = slice(start, stop)
    y = np.array(x[tuple(index)], copy=True)

    def vjp(g: np.ndarray):
        full = np.zeros(x.shape, dtype=g.dtype)
        full[tuple(index)] = g
        return (full,)

    return record(Tensor._wrap(y), [t], vjp)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ShapeError("concat exige ao menos um tensor")

    first = tensors[0]
    ax = _normalize_axis(axis, first.ndim)
    for other in tensors[1:]:
        _same_dtype(first, other)
        if other.ndim != first.ndim or any(
            d != e for i, (d, e) in enumerate(zip(first.shape, other.shape)) if i != ax
        ):
            raise ShapeError(f"concat com formatos incompatíveis: {first.shape} e {other.shape}")

    y = np.concatenate([t.numpy() for t in tensors], axis=ax)
    bounds = list(itertools.accumulate(t.shape[ax] for t in tensors))[:-1]

    return record(Tensor._wrap(y), list(tensors), lambda g: tuple(np.split(g, bounds, axis=ax)))
