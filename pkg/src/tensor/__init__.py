"""
Núcleo de tensores: array denso imutável, operações primitivas com ordem de acumulação fixa,
diferenciação reversa por fita, oráculo de diferenças finitas, gerador determinístico,
contêiner binário e instrumentação de memória.
"""

from src.tensor.autodiff import Tape, active_tape, backward, finite_diff
from src.tensor.container import (
    decode_tensor,
    encode_tensor,
    read_bundle,
    read_tensor,
    write_bundle,
    write_tensor,
)
from src.tensor.memory import MemoryTracker, track_memory
from src.tensor.ops import (
    Elementwise,
    ReduceMode,
    add,
    concat,
    contract,
    elementwise,
    leaky_relu,
    mul,
    pad_axis,
    reduce,
    relu,
    reshape,
    scale,
    sigmoid,
    slice_axis,
    softmax,
    transpose,
)
from src.tensor.rng import Rng
from src.tensor.tensor import DType, Tensor, ones, zeros

__all__ = [
    "DType",
    "Elementwise",
    "MemoryTracker",
    "ReduceMode",
    "Rng",
    "Tape",
    "Tensor",
    "active_tape",
    "add",
    "backward",
    "concat",
    "contract",
    "decode_tensor",
    "elementwise",
    "encode_tensor",
    "finite_diff",
    "leaky_relu",
    "mul",
    "ones",
    "pad_axis",
    "read_bundle",
    "read_tensor",
    "reduce",
    "relu",
    "reshape",
    "scale",
    "sigmoid",
    "slice_axis",
    "softmax",
    "track_memory",
    "transpose",
    "write_bundle",
    "write_tensor",
    "zeros",
]
