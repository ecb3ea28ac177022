import numpy as np
import pytest

from src.core import TapeError
from src.tensor import (
    Tape,
    Tensor,
    active_tape,
    backward,
    concat,
    contract,
    finite_diff,
    leaky_relu,
    mul,
    pad_axis,
    reduce,
    reshape,
    sigmoid,
    slice_axis,
    softmax,
    transpose,
)
from tests.helpers import assert_close


def _composite(x: Tensor, w: Tensor) -> Tensor:
    h = leaky_relu(contract(x, w, "ij,jk->ik"), 0.1)
    p = softmax(h, axis=1)
    z = sigmoid(transpose(pad_axis(p, 0, 1), (1, 0)))
    parts = concat([slice_axis(z, 1, 0, 2), slice_axis(z, 1, 2, z.shape[1])], axis=1)
    return reduce(mul(reshape(parts, (-1,)), reshape(parts, (-1,))), (0,))


class TestBackward:
    def test_matches_finite_differences(self, rng):
        x = rng.uniform("x", (3, 4))
        w = rng.uniform("w", (4, 5))

        with Tape() as tape:
            xw, ww = tape.watch(x), tape.watch(w)
            out = _composite(xw, ww)
        grads = backward(tape, out)

        assert_close(grads[xw], finite_diff(lambda t: _composite(t, w), x), 1e-6)
        assert_close(grads[ww], finite_diff(lambda t: _composite(x, t), w), 1e-6)

    def test_unused_parameter_gets_zeros(self, rng):
        x = rng.uniform("x", (2, 2))
        with Tape() as tape:
            used = tape.watch(x)
            unused = tape.watch(rng.uniform("u", (3,)))
            out = reduce(used, (0, 1))
        grads = backward(tape, out)
        np.testing.assert_array_equal(grads[unused].numpy(), 0.0)
        np.testing.assert_array_equal(grads[used].numpy(), 1.0)

    def test_sum_gives_ones(self):
        with Tape() as tape:
            w = tape.watch(Tensor(np.arange(4.0)))
            out = reduce(w, (0,))
        assert out.shape == ()
        np.testing.assert_array_equal(backward(tape, out)[w].numpy(), np.ones(4))

    def test_full_contraction(self, rng):
        x = rng.uniform("x", (5,))
        with Tape() as tape:
            xw = tape.watch(x)
            out = contract(xw, xw, "i,i")
        np.testing.assert_allclose(backward(tape, out)[xw].numpy(), 2.0 * x.numpy(), rtol=1e-12)

    def test_requires_scalar_output(self, rng):
        with Tape() as tape:
            out = sigmoid(tape.watch(rng.uniform("x", (2,))))
        with pytest.raises(TapeError):
            backward(tape, out)

    def test_output_must_belong_to_tape(self, rng):
        with Tape() as tape:
            tape.watch(rng.uniform("x", (2,)))
        with pytest.raises(TapeError):
            backward(tape, reduce(rng.uniform("y", (2,)), (0,)))

    def test_records_only_watched_inputs(self, rng):
        with Tape() as tape:
            sigmoid(rng.uniform("x", (2,)))
            assert len(tape) == 0
            sigmoid(tape.watch(rng.uniform("y", (2,))))
            assert len(tape) == 2

    def test_context_is_restored(self):
        assert active_tape() is None
        with Tape() as outer:
            with Tape() as inner:
                assert active_tape() is inner
            assert active_tape() is outer
        assert active_tape() is None

    def test_deterministic(self, rng):
        x = rng.uniform("x", (3, 4))
        w = rng.uniform("w", (4, 5))
        results = []
        for _ in range(2):
            with Tape() as tape:
                ww = tape.watch(w)
                out = _composite(x, ww)
            results.append(backward(tape, out)[ww].numpy().tobytes())
        assert results[0] == results[1]


class TestFiniteDiff:
    def test_quadratic(self):
        x = Tensor([1.0, -2.0, 3.0])
        grad = finite_diff(lambda t: reduce(mul(t, t), (0,)), x)
        np.testing.assert_allclose(grad.numpy(), [2.0, -4.0, 6.0], rtol=1e-8)

    def test_rejects_non_positive_eps(self):
        with pytest.raises(ValueError):
            finite_diff(lambda t: reduce(t, (0,)), Tensor([1.0]), eps=0.0)
