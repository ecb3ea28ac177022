import numpy as np
import pytest

from src.channelize import dual_parallel, dual_sequential, se_block
from src.core import ShapeError
from src.kernels import axial_attention
from src.oracle import oracle_se_block
from src.tensor import Rng, add
from src.utils import init_se_params
from tests.helpers import assert_close, make_sample


class TestSEBlock:
    @pytest.mark.parametrize("channels, reduction", [(1, 16), (4, 2), (6, 3)])
    def test_matches_oracle(self, channels, reduction):
        s = make_sample(3, 4, channels)
        se = init_se_params(Rng(5), channels, reduction=reduction)
        y = se_block(s.x, se)
        assert y.shape == s.x.shape
        assert_close(y, oracle_se_block(s.x, se))

    def test_bypass_returns_input(self, sample):
        se = init_se_params(Rng(5), 2, bypass=True)
        assert se_block(sample.x, se) is sample.x

    def test_zero_weights_halve_input(self, sample):
        se = init_se_params(Rng(5), 2, zero=True)
        np.testing.assert_array_equal(se_block(sample.x, se).numpy(), 0.5 * sample.x.numpy())

    def test_channel_mismatch(self, sample):
        with pytest.raises(ShapeError):
            se_block(sample.x, init_se_params(Rng(5), 3))


class TestDualAttention:
    def test_parallel_is_sum_of_branches(self):
        s = make_sample(3, 3, 4)
        se = init_se_params(Rng(5), 4, reduction=2)
        expected = add(axial_attention(s.x, s.params), se_block(s.x, se))
        assert dual_parallel(s.x, s.params, se).numpy().tobytes() == expected.numpy().tobytes()

    def test_sequential_orders(self):
        s = make_sample(3, 3, 4)
        se = init_se_params(Rng(5), 4, reduction=2)

        after = dual_sequential(s.x, s.params, se)
        before = dual_sequential(s.x, s.params, se, se_first=True)

        assert_close(after, se_block(axial_attention(s.x, s.params), se), 0.0)
        assert_close(before, axial_attention(se_block(s.x, se), s.params), 0.0)
        assert not np.allclose(after.numpy(), before.numpy())

    def test_sequential_bypass_is_axial(self):
        s = make_sample(2, 3, 3)
        se = init_se_params(Rng(5), 3, bypass=True)
        y = dual_sequential(s.x, s.params, se)
        assert y.numpy().tobytes() == axial_attention(s.x, s.params).numpy().tobytes()

    def test_requires_square_values(self, sample):
        se = init_se_params(Rng(5), 2)
        with pytest.raises(ShapeError):
            dual_parallel(sample.x, sample.params, se)
        with pytest.raises(ShapeError):
            dual_sequential(sample.x, sample.params, se)
