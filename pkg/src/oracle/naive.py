"""
Implementações de referência em laços Python puros, avaliadas literalmente a partir das
definições, em float64.

Nada aqui reaproveita os kernels eficientes nem as operações do núcleo de tensores: os
valores entram e saem como listas aninhadas, o softmax e o sigmoid são próprios e toda soma
percorre os índices em ordem crescente a partir de 0.0.
"""

import logging
import math

from src.core import OracleCapError
from src.schemas import (
    Activation,
    AttentionMaps,
    AttnParams,
    GateParams,
    OracleCaps,
    SEParams,
)
from src.tensor import DType, Tensor

logger = logging.getLogger(__name__)


# =========================================================================
# AUXILIARES
# =========================================================================


def _lists(t: Tensor) -> list:
    return t.astype(DType.FLOAT64).tolist()


def _check_cap(elements: int, caps: OracleCaps | None, what: str) -> None:
    caps = caps or OracleCaps()
    if elements > caps.max_rank5_elements:
        raise OracleCapError(
            f"{what}: {elements} elementos acima do limite de {caps.max_rank5_elements}"
        )


def _softmax(logits: list[float]) -> list[float]:
    top = max(logits)
    exps = [math.exp(v - top) for v in logits]
    total = 0.0
    for e in exps:
        total += e
    return [e / total for e in exps]


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _project(x: list, m: list) -> list:
    """
    out[d][i][j] = Σ_c x[c][i][j] · m[c][d].
    """
    channels, height, width = len(x), len(x[0]), len(x[0][0])
    out_channels = len(m[0])
    out = []
    for d in range(out_channels):
        plane = []
        for i in range(height):
            row = []
            for j in range(width):
                acc = 0.0
                for c in range(channels):
                    acc += x[c][i][j] * m[c][d]
                row.append(acc)
            plane.append(row)
        out.append(plane)
    return out


def _dot(q: list, i: int, j: int, m: int, n: int) -> float:
    acc = 0.0
    for k in range(len(q)):
        acc += q[k][i][j] * q[k][m][n]
    return acc


def _maps(x: list, p: AttnParams) -> tuple[list, list]:
    """
    a_col[i][m][j] e a_row[i][j][n], cada um com seu próprio softmax.
    """
    height, width = len(x[0]), len(x[0][0])
    qc = _project(x, _lists(p.theta))
    qr = _project(x, _lists(p.phi))

    a_col = [[[0.0] * width for _ in range(height)] for _ in range(height)]
    a_row = [[[0.0] * width for _ in range(width)] for _ in range(height)]

    for i in range(height):
        for j in range(width):
            col = _softmax([_dot(qc, i, j, m, j) for m in range(height)])
            for m in range(height):
                a_col[i][m][j] = col[m]

            row = _softmax([_dot(qr, i, j, i, n) for n in range(width)])
            for n in range(width):
                a_row[i][j][n] = row[n]

    return a_col, a_row


def _mlp(vector: list[float], p: GateParams) -> list[float]:
    """
    Uma avaliação do MLP do portão sobre um vetor de Cv canais.
    """
    if p.bypass:
        return [1.0] * len(vector)

    layers = [_lists(w) for w in p.layers]
    h = list(vector)
    for k, w in enumerate(layers):
        out = []
        for d in range(len(w[0])):
            acc = 0.0
            for c in range(len(h)):
                acc += h[c] * w[c][d]
            out.append(acc)

        if k < len(layers) - 1:
            if p.activation is Activation.RELU:
                out = [v if v > 0 else 0.0 for v in out]
            else:
                out = [v if v > 0 else v * p.slope for v in out]
        h = out

    return [_sigmoid(v) for v in h]


def _flatten(nested: list, depth: int) -> list:
    if depth == 0:
        return [nested]
    return [leaf for item in nested for leaf in _flatten(item, depth - 1)]


def _nest(flat: list, shape: tuple[int, ...]) -> list:
    if not shape:
        return flat[0]
    step = math.prod(shape[1:])
    return [_nest(flat[k * step : (k + 1) * step], shape[1:]) for k in range(shape[0])]


# =========================================================================
# ORÁCULOS
# =========================================================================


def oracle_attention_maps(x: Tensor, p: AttnParams) -> AttentionMaps:
    a_col, a_row = _maps(_lists(x), p)
    return AttentionMaps(a_col=Tensor(a_col, DType.FLOAT64), a_row=Tensor(a_row, DType.FLOAT64))


def oracle_self_attention(x: Tensor, p: AttnParams, caps: OracleCaps | None = None) -> Tensor:
    """
    Autoatenção em laços sobre (i, j, m, n, c), com softmax por posição de consulta.
    """
    xs = _lists(x)
    height, width = len(xs[0]), len(xs[0][0])
    cv = p.dims.value_channels
    _check_cap(height * width * height * width * cv, caps, "oracle_self_attention")

    q = _project(xs, _lists(p.theta))
    v = _project(xs, _lists(p.g))

    y = [[[0.0] * width for _ in range(height)] for _ in range(cv)]
    for i in range(height):
        for j in range(width):
            weights = _softmax(
                [_dot(q, i, j, m, n) for m in range(height) for n in range(width)]
            )
            for c in range(cv):
                acc = 0.0
                for m in range(height):
                    for n in range(width):
                        acc += weights[m * width + n] * v[c][m][n]
                y[c][i][j] = acc

    return Tensor(y, DType.FLOAT64)


def oracle_alpha(x: Tensor, p: AttnParams, caps: OracleCaps | None = None) -> Tensor:
    """
    α[i][j][m][n][c] = a_col[i][m][j] · g(x)[c][m][n], materializado por inteiro.
    """
    xs = _lists(x)
    height, width = len(xs[0]), len(xs[0][0])
    cv = p.dims.value_channels
    _check_cap(height * width * height * width * cv, caps, "oracle_alpha")

    a_col, _ = _maps(xs, p)
    v = _project(xs, _lists(p.g))
    alpha = [
        [
            [[[a_col[i][m][j] * v[c][m][n] for c in range(cv)] for n in range(width)] for m in range(height)]
            for j in range(width)
        ]
        for i in range(height)
    ]
    return Tensor(alpha, DType.FLOAT64)


def oracle_axial(x: Tensor, p: AttnParams, caps: OracleCaps | None = None) -> Tensor:
    """
    y[c][i][j] = Σ_n a_row[i][j][n] · Σ_m a_col[i][m][j] · g(x)[c][m][n].
    """
    xs = _lists(x)
    height, width = len(xs[0]), len(xs[0][0])
    cv = p.dims.value_channels
    _check_cap(height * width * height * width * cv, caps, "oracle_axial")

    a_col, a_row = _maps(xs, p)
    v = _project(xs, _lists(p.g))

    y = [[[0.0] * width for _ in range(height)] for _ in range(cv)]
    for c in range(cv):
        for i in range(height):
            for j in range(width):
                acc = 0.0
                for n in range(width):
                    inner = 0.0
                    for m in range(height):
                        inner += a_col[i][m][j] * v[c][m][n]
                    acc += inner * a_row[i][j][n]
                y[c][i][j] = acc

    return Tensor(y, DType.FLOAT64)


def oracle_gate_mlp(stat: Tensor, p: GateParams) -> Tensor:
    """
    Avalia o MLP do portão vetor a vetor sobre o último eixo de `stat`.
    """
    shape = stat.shape
    vectors = _flatten(_lists(stat), len(shape) - 1)
    gated = [_mlp(vector, p) for vector in vectors]
    return Tensor(_nest(gated, shape[:-1]), DType.FLOAT64)


def oracle_caa(
    x: Tensor,
    p: AttnParams,
    gc: GateParams,
    gr: GateParams,
    caps: OracleCaps | None = None,
) -> Tensor:
    """
    Atenção axial canalizada sem atalhos de fatoração.

    Materializa α de posto 5, aplica o portão de coluna a cada entrada (i, j, m, n, c),
    forma β, aplica o portão de linha a cada entrada (i, j, n, c) e só então soma em n.
    """
    xs = _lists(x)
    height, width = len(xs[0]), len(xs[0][0])
    cv = p.dims.value_channels
    _check_cap(height * width * height * width * cv, caps, "oracle_caa")

    alpha = _lists(oracle_alpha(x, p, caps))
    _, a_row = _maps(xs, p)
    area = height * width

    # Portão de coluna: média de α sobre (m, j), mantendo (i, n)
    gate_col = []
    for i in range(height):
        per_n = []
        for n in range(width):
            stat = []
            for c in range(cv):
                acc = 0.0
                for m in range(height):
                    for j in range(width):
                        acc += alpha[i][j][m][n][c]
                stat.append(acc / area)
            per_n.append(_mlp(stat, gc))
        gate_col.append(per_n)

    beta = [[[[0.0] * cv for _ in range(width)] for _ in range(width)] for _ in range(height)]
    for i in range(height):
        for j in range(width):
            for n in range(width):
                for c in range(cv):
                    acc = 0.0
                    for m in range(height):
                        acc += gate_col[i][n][c] * alpha[i][j][m][n][c]
                    beta[i][j][n][c] = a_row[i][j][n] * acc

    # Portão de linha: média de β sobre (i, n), mantendo j
    gate_row = []
    for j in range(width):
        stat = []
        for c in range(cv):
            acc = 0.0
            for i in range(height):
                for n in range(width):
                    acc += beta[i][j][n][c]
            stat.append(acc / area)
        gate_row.append(_mlp(stat, gr))

    y = [[[0.0] * width for _ in range(height)] for _ in range(cv)]
    for c in range(cv):
        for i in range(height):
            for j in range(width):
                acc = 0.0
                for n in range(width):
                    acc += gate_row[j][c] * beta[i][j][n][c]
                y[c][i][j] = acc

    return Tensor(y, DType.FLOAT64)


def oracle_channelized_self_attention(
    x: Tensor, p: AttnParams, g: GateParams, caps: OracleCaps | None = None
) -> Tensor:
    """
    Autoatenção canalizada com o portão aplicado a cada termo α_{i,j,m,n} antes da soma.
    """
    xs = _lists(x)
    height, width = len(xs[0]), len(xs[0][0])
    cv = p.dims.value_channels
    _check_cap(height * width * height * width * cv, caps, "oracle_channelized_self_attention")

    q = _project(xs, _lists(p.theta))
    v = _project(xs, _lists(p.g))
    area = height * width

    y = [[[0.0] * width for _ in range(height)] for _ in range(cv)]
    for i in range(height):
        for j in range(width):
            weights = _softmax(
                [_dot(q, i, j, m, n) for m in range(height) for n in range(width)]
            )
            alpha = [
                [[weights[m * width + n] * v[c][m][n] for c in range(cv)] for n in range(width)]
                for m in range(height)
            ]

            stat = []
            for c in range(cv):
                acc = 0.0
                for m in range(height):
                    for n in range(width):
                        acc += alpha[m][n][c]
                stat.append(acc / area)
            gate = _mlp(stat, g)

            for c in range(cv):
                acc = 0.0
                for m in range(height):
                    for n in range(width):
                        acc += gate[c] * alpha[m][n][c]
                y[c][i][j] = acc

    return Tensor(y, DType.FLOAT64)


def oracle_se_block(x: Tensor, p: SEParams) -> Tensor:
    xs = _lists(x)
    if p.bypass:
        return Tensor(xs, DType.FLOAT64)

    channels, height, width = len(xs), len(xs[0]), len(xs[0][0])
    w1, w2 = _lists(p.w1), _lists(p.w2)

    pooled = []
    for c in range(channels):
        acc = 0.0
        for i in range(height):
            for j in range(width):
                acc += xs[c][i][j]
        pooled.append(acc / (height * width))

    hidden = []
    for r in range(len(w1[0])):
        acc = 0.0
        for c in range(channels):
            acc += pooled[c] * w1[c][r]
        hidden.append(acc if acc > 0 else 0.0)

    gate = []
    for c in range(channels):
        acc = 0.0
        for r in range(len(hidden)):
            acc += hidden[r] * w2[r][c]
        gate.append(_sigmoid(acc))

    y = [[[xs[c][i][j] * gate[c] for j in range(width)] for i in range(height)] for c in range(channels)]
    return Tensor(y, DType.FLOAT64)
