import numpy as np
import pytest

from src.core import AxisError, BroadcastError, DTypeError, NonFiniteError, ShapeError
from src.tensor import (
    DType,
    Tensor,
    add,
    concat,
    contract,
    elementwise,
    leaky_relu,
    mul,
    ones,
    pad_axis,
    reduce,
    relu,
    reshape,
    scale,
    sigmoid,
    slice_axis,
    softmax,
    transpose,
    zeros,
)


class TestTensor:
    def test_is_read_only(self):
        t = Tensor([1.0, 2.0])
        with pytest.raises(ValueError):
            t.numpy()[0] = 5.0

    def test_copies_source(self):
        source = np.array([1.0, 2.0])
        t = Tensor(source)
        source[0] = 9.0
        assert t.tolist() == [1.0, 2.0]

    def test_infers_dtype(self):
        assert Tensor(np.zeros(2, dtype=np.float32)).dtype is DType.FLOAT32
        assert Tensor([1, 2]).dtype is DType.FLOAT64

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteError):
            Tensor([1.0, np.nan])

    def test_rejects_empty_dimension(self):
        with pytest.raises(ShapeError):
            Tensor(np.zeros((2, 0)))

    def test_unsupported_dtype(self):
        with pytest.raises(DTypeError):
            Tensor([1, 2], "int32")

    def test_item(self):
        assert Tensor([[3.5]]).item() == 3.5
        with pytest.raises(ShapeError):
            Tensor([1.0, 2.0]).item()


class TestElementwise:
    def test_sigmoid_at_zero(self):
        assert sigmoid(Tensor([0.0])).item() == 0.5

    def test_relu_and_leaky_relu(self):
        assert relu(Tensor([-3.0])).item() == 0.0
        assert leaky_relu(Tensor([-3.0]), 0.01).item() == pytest.approx(-0.03)
        assert leaky_relu(Tensor([2.0]), 0.01).item() == 2.0

    def test_add(self):
        assert add(Tensor([1.0, 2.0]), Tensor([10.0, 20.0])).tolist() == [11.0, 22.0]

    @pytest.mark.parametrize("dtype", ["float32", "float64"])
    def test_sigmoid_stays_open_interval(self, dtype):
        y = sigmoid(Tensor([-200.0, -20.0, 0.0, 20.0, 200.0], dtype)).numpy()
        assert (y > 0).all() and (y < 1).all()
        assert np.all(np.diff(y) >= 0)

    def test_trailing_axis_broadcast(self):
        a = Tensor(np.arange(6.0).reshape(2, 3))
        b = Tensor([1.0, 10.0, 100.0])
        np.testing.assert_array_equal(mul(a, b).numpy(), a.numpy() * b.numpy())

    def test_broadcast_error_names_shapes(self):
        with pytest.raises(BroadcastError) as info:
            add(Tensor(np.ones((2, 3))), Tensor(np.ones(2)))
        assert info.value.left == (2, 3)
        assert info.value.right == (2,)
        assert "(2, 3)" in str(info.value)

    def test_mixed_dtypes(self):
        with pytest.raises(DTypeError):
            add(ones((2,), "float32"), ones((2,), "float64"))

    def test_scale_requires_factor(self):
        with pytest.raises(ValueError):
            elementwise("scale", Tensor([1.0]))
        assert scale(Tensor([1.5]), 2.0).item() == 3.0


class TestContract:
    def test_matrix_product(self, rng):
        a = rng.uniform("a", (3, 4))
        b = rng.uniform("b", (4, 5))
        np.testing.assert_allclose(contract(a, b, "ij,jk->ik").numpy(), a.numpy() @ b.numpy())

    def test_implicit_output(self, rng):
        a = rng.uniform("a", (3, 4))
        b = rng.uniform("b", (4, 5))
        assert contract(a, b, "ij,jk").shape == (3, 5)

    def test_batch_axis(self, rng):
        q = rng.uniform("q", (2, 3, 4))
        out = contract(q, q, "kij,kmj->imj")
        np.testing.assert_allclose(out.numpy(), np.einsum("kij,kmj->imj", q.numpy(), q.numpy()))

    def test_accumulates_in_ascending_order(self):
        # 1e8 + 1 arredonda para 1e8 em float32: a ordem das parcelas aparece no resultado
        a = Tensor([[1e8, 1.0, -1e8]], "float32")
        b = Tensor([[1.0], [1.0], [1.0]], "float32")
        assert contract(a, b, "ij,jk->ik").item() == 0.0

    def test_full_contraction_is_scalar(self, rng):
        x = rng.uniform("x", (4,))
        out = contract(x, x, "i,i")
        assert out.shape == ()
        assert out.item() == pytest.approx(float(x.numpy() @ x.numpy()))

    def test_paired_size_mismatch(self, rng):
        with pytest.raises(ShapeError):
            contract(rng.uniform("a", (3, 4)), rng.uniform("b", (5, 2)), "ij,jk->ik")

    def test_rank_mismatch(self, rng):
        with pytest.raises(AxisError):
            contract(rng.uniform("a", (3, 4)), rng.uniform("b", (4, 2)), "ijk,kl->il")


class TestSoftmax:
    @pytest.mark.parametrize("axis", [0, 1, -1])
    def test_slices_sum_to_one(self, rng, axis):
        y = softmax(rng.uniform("x", (4, 5), -5.0, 5.0), axis).numpy()
        np.testing.assert_allclose(y.sum(axis=axis), 1.0, atol=1e-12)

    def test_large_logits(self):
        np.testing.assert_array_equal(softmax(Tensor([1000.0, 1000.0]), 0).numpy(), [0.5, 0.5])

    def test_invalid_axis(self):
        with pytest.raises(AxisError):
            softmax(Tensor([1.0, 2.0]), 1)


class TestReduce:
    def test_matches_sequential_sum(self, rng):
        x = rng.uniform("x", (1000,))
        acc = 0.0
        for value in x.numpy():
            acc += value
        assert reduce(x, (0,)).item() == acc

    def test_mean(self):
        assert reduce(Tensor([[1.0, 2.0], [3.0, 6.0]]), (0, 1), "mean").item() == 3.0

    def test_keeps_other_axes(self, rng):
        x = rng.uniform("x", (2, 3, 4))
        np.testing.assert_allclose(reduce(x, (0, 2)).numpy(), x.numpy().sum(axis=(0, 2)))

    def test_full_reduction_is_scalar(self):
        out = reduce(Tensor(np.arange(4.0)), (0,))
        assert out.shape == ()
        assert out.ndim == 0
        assert reduce(Tensor(np.ones((2, 3))), (0, 1), "mean").shape == ()

    def test_axis_errors(self):
        x = Tensor(np.ones((2, 3)))
        with pytest.raises(AxisError):
            reduce(x, (0, 0))
        with pytest.raises(AxisError):
            reduce(x, ())
        with pytest.raises(AxisError):
            reduce(x, (2,))


class TestLayout:
    def test_reshape_keeps_size(self):
        with pytest.raises(ShapeError):
            reshape(Tensor(np.ones((2, 3))), (4, 2))

    def test_transpose(self, rng):
        x = rng.uniform("x", (2, 3, 4))
        np.testing.assert_array_equal(transpose(x, (2, 0, 1)).numpy(), x.numpy().transpose(2, 0, 1))
        with pytest.raises(AxisError):
            transpose(x, (0, 0, 1))

    def test_pad_axis(self):
        x = Tensor(np.ones((33, 4)))
        padded = pad_axis(x, 0, 3)
        assert padded.shape == (36, 4)
        np.testing.assert_array_equal(padded.numpy()[33:], 0.0)
        assert pad_axis(x, 0, 0) is x

    def test_slice_and_concat(self, rng):
        x = rng.uniform("x", (5, 2))
        parts = [slice_axis(x, 0, 0, 2), slice_axis(x, 0, 2, 5)]
        np.testing.assert_array_equal(concat(parts, 0).numpy(), x.numpy())

    def test_slice_bounds(self):
        with pytest.raises(ShapeError):
            slice_axis(zeros((3, 2)), 0, 2, 4)

    def test_concat_shapes(self):
        with pytest.raises(ShapeError):
            concat([zeros((2, 3)), zeros((2, 4))], 0)
