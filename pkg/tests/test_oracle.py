import numpy as np
import pytest
from pydantic import ValidationError

from src.core import OracleCapError
from src.oracle import (
    oracle_alpha,
    oracle_attention_maps,
    oracle_axial,
    oracle_caa,
    oracle_channelized_self_attention,
    oracle_self_attention,
)
from src.schemas import GateStage, OracleCaps
from src.tensor import DType, Rng
from src.utils import init_gate_params
from tests.helpers import assert_close, make_sample


class TestOracleCaps:
    def test_refuses_large_inputs(self, sample):
        caps = OracleCaps(max_rank5_elements=10)
        with pytest.raises(OracleCapError):
            oracle_alpha(sample.x, sample.params, caps)
        with pytest.raises(OracleCapError):
            oracle_caa(sample.x, sample.params, sample.gate_col, sample.gate_row, caps)
        with pytest.raises(OracleCapError):
            oracle_channelized_self_attention(sample.x, sample.params, sample.gate_self, caps)

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("CAA_ORACLE_CAP", "123")
        assert OracleCaps().max_rank5_elements == 123

    def test_float64_only(self):
        with pytest.raises(ValidationError):
            OracleCaps(dtype=DType.FLOAT32)


class TestOracleDefinitions:
    def test_maps_are_normalized(self, sample):
        maps = oracle_attention_maps(sample.x, sample.params)
        np.testing.assert_allclose(maps.a_col.numpy().sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(maps.a_row.numpy().sum(axis=2), 1.0, atol=1e-12)

    def test_alpha_sums_to_axial(self, sample):
        alpha = oracle_alpha(sample.x, sample.params).numpy()
        assert alpha.shape == (3, 4, 3, 4, 3)
        maps = oracle_attention_maps(sample.x, sample.params)
        beta = maps.a_row.numpy()[..., None] * alpha.sum(axis=2)
        expected = oracle_axial(sample.x, sample.params).numpy()
        np.testing.assert_allclose(beta.sum(axis=2).transpose(2, 0, 1), expected, rtol=1e-12)

    def test_caa_bypass_is_axial(self, sample):
        gc = init_gate_params(Rng(1), GateStage.COLUMN, 3, bypass=True)
        gr = init_gate_params(Rng(1), GateStage.ROW, 3, bypass=True)
        assert_close(oracle_caa(sample.x, sample.params, gc, gr), oracle_axial(sample.x, sample.params))

    def test_channelized_self_bypass(self, sample):
        gs = init_gate_params(Rng(1), GateStage.SELF, 3, bypass=True)
        assert_close(
            oracle_channelized_self_attention(sample.x, sample.params, gs),
            oracle_self_attention(sample.x, sample.params),
        )

    def test_outputs_are_float64(self):
        s = make_sample(2, 2, 2, dtype="float32")
        assert oracle_axial(s.x, s.params).dtype is DType.FLOAT64
