import numpy as np

from src.schemas import GateConfig
from src.services.suites import GridPoint, Sample, draw_sample
from src.tensor import Tensor


def make_sample(
    height: int,
    width: int,
    channels: int,
    value_channels: int | None = None,
    *,
    seed: int = 42,
    gate: GateConfig | None = None,
    dtype: str = "float64",
) -> Sample:
    point = GridPoint(height, width, channels, value_channels or channels, seed)
    return draw_sample(point, gate or GateConfig(depth=3, width=4), dtype)


def assert_close(actual: Tensor, expected: Tensor, rtol: float = 1e-10) -> None:
    """
    Compara em norma máxima relativa, como as suítes de verificação.
    """
    a, b = actual.numpy(), expected.numpy()
    assert a.shape == b.shape
    scale = float(np.max(np.abs(b))) or 1.0
    assert float(np.max(np.abs(a - b))) <= rtol * scale
