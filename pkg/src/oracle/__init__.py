"""
Oráculos de referência em laços Python, usados como verdade nos testes e nas fixtures.
"""

from src.oracle.naive import (
    oracle_alpha,
    oracle_attention_maps,
    oracle_axial,
    oracle_caa,
    oracle_channelized_self_attention,
    oracle_gate_mlp,
    oracle_se_block,
    oracle_self_attention,
)

__all__ = [
    "oracle_alpha",
    "oracle_attention_maps",
    "oracle_axial",
    "oracle_caa",
    "oracle_channelized_self_attention",
    "oracle_gate_mlp",
    "oracle_se_block",
    "oracle_self_attention",
]
