"""
Suítes numéricas: concordância com os oráculos, normalização, bypass, portões, equivariância
a permutações e gradientes.
"""

import logging
from collections.abc import Callable, Iterator
from dataclasses import replace
from functools import partial

import numpy as np

from src.channelize import (
    caa_forward,
    channelized_self_attention,
    column_gate,
    column_gated,
    column_stat,
    dual_sequential,
    gate_mlp,
    gate_preactivations,
    row_gate,
    row_stat,
    se_block,
)
from src.core import (
    GRADIENT_KINK_MARGIN,
    GRADIENT_MAX_REDRAWS,
    GRADIENT_REL_TOL,
    ORACLE_REL_TOL,
    SOFTMAX_SUM_TOL_F32,
    SOFTMAX_SUM_TOL_F64,
)
from src.kernels import (
    attention_maps,
    attention_sum,
    axial_attention,
    breakdown,
    column_aggregate,
    project,
    row_weighted,
    self_attention,
)
from src.oracle import (
    oracle_attention_maps,
    oracle_axial,
    oracle_caa,
    oracle_channelized_self_attention,
    oracle_gate_mlp,
    oracle_se_block,
    oracle_self_attention,
)
from src.schemas import Activation, GateConfig, GateParams, GateStage
from src.services.suites.base import BaseSuite, Case, GridPoint, Sample, draw_sample
from src.tensor import DType, Rng, Tape, Tensor, backward, finite_diff, mul, reduce, scale
from src.utils import bitwise_equal, init_gate_params, init_se_params, permute_axis, relative_error

logger = logging.getLogger(__name__)


def _within(name: str, actual: Tensor, expected: Tensor, tol: float) -> str | None:
    err = relative_error(actual, expected)
    if err > tol:
        return f"{name}: erro relativo {err:.3e} > {tol:.0e}"
    return None


def _same_bits(name: str, actual: Tensor, expected: Tensor) -> str | None:
    if not bitwise_equal(actual, expected):
        return f"{name}: saídas diferem bit a bit"
    return None


def _first(*reasons: str | None) -> str | None:
    return next((r for r in reasons if r is not None), None)


def perturb_gate(p: GateParams, delta: float = 0.5) -> GateParams:
    """
    Soma `delta` ao primeiro peso da primeira matriz do portão.
    """
    first = p.layers[0].numpy().copy()
    first.flat[0] += delta
    name = next(iter(p.tensors()))
    return p.with_tensors({name: Tensor(first, p.layers[0].dtype)})


class OracleSuite(BaseSuite):
    """
    Kernels eficientes × oráculos em laços, em float64, sobre toda a grade pequena.

    Com `mutate`, só o caminho eficiente recebe o portão de coluna perturbado e a suíte
    precisa falhar.
    """

    name = "oracle"

    def cases(self) -> Iterator[Case]:
        for point in self.grid():
            yield Case(f"{point.label} mapas/axial/self/SE", point.size, partial(self._check_plain, point))
            for gate in self.gate_configs():
                yield Case(
                    f"{point.label} depth={gate.depth} act={gate.activation.value}",
                    (*point.size, gate.depth),
                    partial(self._check_gated, point, gate),
                )

    def _check_plain(self, point: GridPoint) -> str | None:
        s = draw_sample(point, GateConfig(width=self.config.gate_width))
        maps = attention_maps(s.x, s.params)
        expected = oracle_attention_maps(s.x, s.params)
        se = init_se_params(Rng(point.seed), point.channels)

        return _first(
            _within("a_col", maps.a_col, expected.a_col, ORACLE_REL_TOL),
            _within("a_row", maps.a_row, expected.a_row, ORACLE_REL_TOL),
            _within("axial", axial_attention(s.x, s.params), oracle_axial(s.x, s.params), ORACLE_REL_TOL),
            _within(
                "self", self_attention(s.x, s.params), oracle_self_attention(s.x, s.params), ORACLE_REL_TOL
            ),
            _within("se", se_block(s.x, se), oracle_se_block(s.x, se), ORACLE_REL_TOL),
        )

    def _check_gated(self, point: GridPoint, gate: GateConfig) -> str | None:
        s = draw_sample(point, gate)
        gc = perturb_gate(s.gate_col) if self.config.mutate else s.gate_col

        return _first(
            _within(
                "caa",
                caa_forward(s.x, s.params, gc, s.gate_row),
                oracle_caa(s.x, s.params, s.gate_col, s.gate_row),
                ORACLE_REL_TOL,
            ),
            _within(
                "channelized_self",
                channelized_self_attention(s.x, s.params, s.gate_self),
                oracle_channelized_self_attention(s.x, s.params, s.gate_self),
                ORACLE_REL_TOL,
            ),
        )


class NormalizationSuite(BaseSuite):
    """
    Fatias de softmax somam 1 e todo portão avaliado fica em (0, 1), nos dois tipos.
    """

    name = "normalization"

    def cases(self) -> Iterator[Case]:
        for point in self.grid():
            for dtype in DType:
                yield Case(f"{point.label} {dtype.value}", point.size, partial(self._check, point, dtype))

    def _check(self, point: GridPoint, dtype: DType) -> str | None:
        s = draw_sample(point, GateConfig(width=self.config.gate_width), dtype)
        tol = SOFTMAX_SUM_TOL_F64 if dtype is DType.FLOAT64 else SOFTMAX_SUM_TOL_F32

        maps = attention_maps(s.x, s.params)
        for name, t, axis in (("a_col", maps.a_col, 1), ("a_row", maps.a_row, 2)):
            sums = np.sum(t.numpy(), axis=axis, dtype=np.float64)
            if np.max(np.abs(sums - 1.0)) > tol:
                return f"{name}: soma fora de 1 ± {tol:.0e}"

        # GateField recusa valores fora de (0, 1)
        parts = breakdown(s.x, maps, s.params)
        gate_col = column_gate(parts, s.x, s.gate_col)
        gated_beta = row_weighted(column_gated(parts.alpha_sum, gate_col.values), maps.a_row)
        row_gate(gated_beta, s.gate_row)
        return None


class BypassSuite(BaseSuite):
    """
    Portões em bypass reproduzem exatamente as camadas sem canalização.
    """

    name = "bypass"

    def cases(self) -> Iterator[Case]:
        for point in self.grid():
            for dtype in DType:
                yield Case(f"{point.label} {dtype.value}", point.size, partial(self._check, point, dtype))

    def _check(self, point: GridPoint, dtype: DType) -> str | None:
        s = draw_sample(point, GateConfig(width=self.config.gate_width), dtype)
        rng = Rng(point.seed)
        cv = point.value_channels
        gc = init_gate_params(rng, GateStage.COLUMN, cv, dtype=dtype, bypass=True)
        gr = init_gate_params(rng, GateStage.ROW, cv, dtype=dtype, bypass=True)
        gs = init_gate_params(rng, GateStage.SELF, cv, dtype=dtype, bypass=True)
        se = init_se_params(rng, point.channels, dtype=dtype, bypass=True)

        axial = axial_attention(s.x, s.params)
        return _first(
            _same_bits("caa", caa_forward(s.x, s.params, gc, gr), axial),
            _same_bits(
                "channelized_self",
                channelized_self_attention(s.x, s.params, gs),
                self_attention(s.x, s.params),
            ),
            _same_bits("dual_sequential", dual_sequential(s.x, s.params, se), axial)
            if cv == point.channels
            else None,
            _same_bits("se", se_block(s.x, se), s.x),
        )


class GateSuite(BaseSuite):
    """
    Comportamento dos portões: pesos nulos, saturação monotônica e MLP × oráculo.
    """

    name = "gates"

    def cases(self) -> Iterator[Case]:
        for point in self.grid():
            yield Case(f"{point.label} pesos nulos", point.size, partial(self._check_zero, point))
            yield Case(f"{point.label} saturação", point.size, partial(self._check_saturated, point))
            for gate in self.gate_configs():
                yield Case(
                    f"{point.label} mlp depth={gate.depth} act={gate.activation.value}",
                    (*point.size, gate.depth),
                    partial(self._check_mlp, point, gate),
                )

    def _check_zero(self, point: GridPoint) -> str | None:
        s = draw_sample(point, GateConfig(width=self.config.gate_width))
        rng = Rng(point.seed)
        cv = point.value_channels
        config = GateConfig(width=self.config.gate_width)
        gc = init_gate_params(rng, GateStage.COLUMN, cv, config, zero=True)
        gr = init_gate_params(rng, GateStage.ROW, cv, config, zero=True)
        gs = init_gate_params(rng, GateStage.SELF, cv, config, zero=True)

        maps = attention_maps(s.x, s.params)
        field = column_gate(breakdown(s.x, maps, s.params), s.x, gc)
        if not (field.values.numpy() == 0.5).all():
            return "portão com pesos nulos deveria valer 0.5"

        return _first(
            _within(
                "caa", caa_forward(s.x, s.params, gc, gr), scale(axial_attention(s.x, s.params), 0.25), 1e-14
            ),
            _within(
                "channelized_self",
                channelized_self_attention(s.x, s.params, gs),
                scale(self_attention(s.x, s.params), 0.5),
                1e-14,
            ),
        )

    def _check_saturated(self, point: GridPoint) -> str | None:
        """
        Entradas, projeções e pesos ocultos positivos e última camada muito negativa levam
        os logits do portão de coluna abaixo de −20: a saída praticamente se anula.
        """
        s = draw_sample(point, GateConfig(width=self.config.gate_width))
        x = Tensor(0.5 + 0.5 * np.abs(s.x.numpy()))
        params = s.params.with_tensors(
            {name: Tensor(np.abs(t.numpy()) + 0.5) for name, t in s.params.tensors().items()}
        )

        config = GateConfig(depth=3, width=self.config.gate_width, activation=Activation.RELU)
        gc = init_gate_params(Rng(point.seed), GateStage.COLUMN, point.value_channels, config)
        layers = [Tensor(np.abs(w.numpy()) + 0.5) for w in gc.layers[:-1]]
        layers.append(Tensor(-(np.abs(gc.layers[-1].numpy()) + 1000.0)))
        gc = gc.with_tensors(dict(zip(gc.tensors(), layers)))

        y = np.abs(caa_forward(x, params, gc, s.gate_row).numpy())
        reference = np.abs(axial_attention(x, params).numpy())
        if y.max() > 1e-8 * reference.max():
            return f"saída {y.max():.3e} não saturou (referência {reference.max():.3e})"
        return None

    def _check_mlp(self, point: GridPoint, gate: GateConfig) -> str | None:
        s = draw_sample(point, gate)
        stat = Rng(point.seed).uniform("stat", (point.height, point.width, point.value_channels))
        return _within("gate_mlp", gate_mlp(stat, s.gate_col), oracle_gate_mlp(stat, s.gate_col), ORACLE_REL_TOL)


class EquivarianceSuite(BaseSuite):
    """
    Permutar linhas (ou colunas) da entrada permuta a saída da mesma forma.
    """

    name = "equivariance"

    TOLERANCE = 1e-12

    def cases(self) -> Iterator[Case]:
        for point in self.grid():
            if point.height > 1 or point.width > 1:
                yield Case(point.label, point.size, partial(self._check, point))

    def _check(self, point: GridPoint) -> str | None:
        s = draw_sample(point, GateConfig(depth=3, width=self.config.gate_width))
        layers: dict[str, Callable[[Tensor], Tensor]] = {
            "axial": lambda x: axial_attention(x, s.params),
            "self": lambda x: self_attention(x, s.params),
            "caa": lambda x: caa_forward(x, s.params, s.gate_col, s.gate_row),
            "channelized_self": lambda x: channelized_self_attention(x, s.params, s.gate_self),
        }

        # Deslocamento cíclico nas linhas e inversão nas colunas (eixos 1 e 2 de [C, H, W])
        orders = {
            1: list(range(1, point.height)) + [0],
            2: list(reversed(range(point.width))),
        }
        for name, layer in layers.items():
            y = layer(s.x)
            for axis, order in orders.items():
                permuted = layer(permute_axis(s.x, axis, order))
                reason = _within(f"{name} eixo {axis}", permuted, permute_axis(y, axis, order), self.TOLERANCE)
                if reason is not None:
                    return reason
        return None


class GradientSuite(BaseSuite):
    """
    Gradientes reversos × diferenças centrais para entrada, projeções e portões.

    Usa poucas geometrias fixas: cada coordenada custa duas avaliações completas. As
    diferenças centrais só valem longe das dobras da (Leaky) ReLU dos portões, então cada
    caso sorteia de novo até que toda pré-ativação oculta fique a pelo menos
    GRADIENT_KINK_MARGIN de zero.
    """

    name = "gradients"

    GEOMETRIES = ((4, 4, 3, 3), (3, 5, 2, 3), (2, 3, 3, 2))

    def cases(self) -> Iterator[Case]:
        root = Rng(self.config.seed)
        for h, w, c, cv in self.GEOMETRIES:
            point = GridPoint(h, w, c, cv, root.child(f"{self.name}/{h}x{w}x{c}x{cv}").seed)
            for activation in self.config.activations:
                gate = GateConfig(depth=3, width=self.config.gate_width, activation=activation)
                for kind in ("caa", "channelized_self"):
                    yield Case(
                        f"{point.label} {kind} act={activation.value}",
                        point.size,
                        partial(self._check, point, gate, kind),
                    )

    @staticmethod
    def kink_distance(s: Sample, kind: str) -> float:
        """
        Menor |pré-ativação oculta| entre os portões usados por `kind` na amostra `s`.
        """
        d = s.params.dims
        if kind == "caa":
            maps = attention_maps(s.x, s.params)
            alpha_sum = column_aggregate(maps.a_col, project(s.x, s.params.g))
            col_stat = column_stat(alpha_sum, d.height, d.width)
            gated = column_gated(alpha_sum, gate_mlp(col_stat, s.gate_col))
            gated_beta = row_weighted(gated, maps.a_row)
            sums = reduce(reduce(gated_beta, (2,)), (0,))
            stats = [(col_stat, s.gate_col), (row_stat(sums, d.height, d.width), s.gate_row)]
        else:
            mean = scale(attention_sum(s.x, s.params), 1.0 / (d.height * d.width))
            stats = [(mean, s.gate_self)]

        distance = np.inf
        for stat, gate in stats:
            for z in gate_preactivations(stat, gate):
                distance = min(distance, float(np.abs(z.numpy()).min()))
        return distance

    def _draw(self, point: GridPoint, gate: GateConfig, kind: str) -> tuple[GridPoint, Sample] | None:
        rng = Rng(point.seed)
        candidate = point
        for attempt in range(GRADIENT_MAX_REDRAWS):
            if attempt:
                candidate = replace(point, seed=rng.child(f"redraw/{attempt}").seed)
            s = draw_sample(candidate, gate)
            if self.kink_distance(s, kind) >= GRADIENT_KINK_MARGIN:
                return candidate, s
            logger.debug(f"[{self.name}] {point.label}: ponto perto de uma dobra, novo sorteio")
        return None

    def _check(self, point: GridPoint, gate: GateConfig, kind: str) -> str | None:
        drawn = self._draw(point, gate, kind)
        if drawn is None:
            return f"nenhum ponto longe das dobras em {GRADIENT_MAX_REDRAWS} sorteios"
        point, s = drawn
        weights = Rng(point.seed).uniform("grad.weights", (point.value_channels, point.height, point.width))

        if kind == "caa":
            leaves = {"x": s.x, **s.params.tensors(), **s.gate_col.tensors(), **s.gate_row.tensors()}
        else:
            leaves = {"x": s.x, **s.params.tensors(), **s.gate_self.tensors()}

        def objective(tensors: dict[str, Tensor]) -> Tensor:
            params = s.params.with_tensors(tensors)
            if kind == "caa":
                out = caa_forward(
                    tensors["x"], params, s.gate_col.with_tensors(tensors), s.gate_row.with_tensors(tensors)
                )
            else:
                out = channelized_self_attention(tensors["x"], params, s.gate_self.with_tensors(tensors))
            return reduce(mul(out, weights), (0, 1, 2))

        with Tape() as tape:
            watched = {name: tape.watch(t) for name, t in leaves.items()}
            output = objective(watched)
        grads = backward(tape, output)

        for name, leaf in leaves.items():
            numeric = finite_diff(lambda t, name=name: objective(leaves | {name: t}), leaf)
            reason = _within(f"d/d{name}", grads[watched[name]], numeric, GRADIENT_REL_TOL)
            if reason is not None:
                return reason
        return None
