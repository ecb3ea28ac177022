import numpy as np
import pytest

from src.core import ContainerFormatError
from src.tensor import (
    DType,
    Rng,
    Tensor,
    decode_tensor,
    encode_tensor,
    read_bundle,
    reshape,
    track_memory,
    transpose,
    write_bundle,
    zeros,
)


class TestRng:
    def test_same_seed_same_bits(self):
        a = Rng(7).uniform("w", (4, 3))
        b = Rng(7).uniform("w", (4, 3))
        assert a.numpy().tobytes() == b.numpy().tobytes()

    def test_independent_of_call_order(self):
        first = Rng(7)
        first.uniform("a", (2,))
        late = first.uniform("b", (5,))
        assert late.numpy().tobytes() == Rng(7).uniform("b", (5,)).numpy().tobytes()

    def test_names_and_seeds_differ(self):
        rng = Rng(7)
        assert not np.array_equal(rng.uniform("a", (8,)).numpy(), rng.uniform("b", (8,)).numpy())
        assert not np.array_equal(rng.uniform("a", (8,)).numpy(), Rng(8).uniform("a", (8,)).numpy())

    def test_child_is_deterministic(self):
        assert Rng(7).child("case").seed == Rng(7).child("case").seed
        assert Rng(7).child("case").seed != Rng(7).child("other").seed

    def test_float32_is_rounded_float64(self):
        wide = Rng(3).uniform("w", (6,), dtype=DType.FLOAT64).numpy()
        narrow = Rng(3).uniform("w", (6,), dtype=DType.FLOAT32).numpy()
        np.testing.assert_array_equal(narrow, wide.astype(np.float32))

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_range(self, seed):
        with pytest.raises(ValueError):
            Rng(seed)


class TestContainer:
    @pytest.mark.parametrize("dtype", ["float32", "float64"])
    def test_round_trip(self, rng, dtype):
        t = rng.uniform("t", (2, 3, 4), dtype=dtype)
        back = decode_tensor(encode_tensor(t))
        assert back.dtype is t.dtype
        assert back.numpy().tobytes() == t.numpy().tobytes()

    def test_header_layout(self):
        buf = encode_tensor(zeros((2, 3), "float32"))
        assert buf[:4] == b"CAAT"
        assert len(buf) == 4 + 4 + 1 + 4 + 2 * 4 + 6 * 4

    def test_bad_magic(self):
        buf = bytearray(encode_tensor(zeros((2,))))
        buf[:4] = b"XXXX"
        with pytest.raises(ContainerFormatError):
            decode_tensor(bytes(buf))

    def test_truncated_payload(self):
        with pytest.raises(ContainerFormatError):
            decode_tensor(encode_tensor(zeros((4,)))[:-1])

    def test_bundle_keeps_order(self, tmp_path, rng):
        tensors = {"z.last": rng.uniform("z", (2,)), "a.first": rng.uniform("a", (3, 1))}
        write_bundle(tmp_path / "bundle", tensors)
        loaded = read_bundle(tmp_path / "bundle")
        assert list(loaded) == ["z.last", "a.first"]
        for name, t in tensors.items():
            assert loaded[name].numpy().tobytes() == t.numpy().tobytes()

    def test_bundle_rejects_path_names(self, tmp_path):
        with pytest.raises(ContainerFormatError):
            write_bundle(tmp_path, {"../escape": zeros((1,))})


class TestMemoryTracker:
    def test_counts_owning_buffers(self):
        with track_memory() as tracker:
            a = zeros((10, 10))
            view = reshape(a, (100,))
            assert tracker.live_elements == 100
            b = transpose(a, (1, 0))
            assert tracker.live_elements == 200
            del b
            assert tracker.live_elements == 100
            del a, view
        assert tracker.live_elements == 0
        assert tracker.peak_elements == 200

    def test_outside_scope_is_ignored(self):
        outside = Tensor(np.ones(50))
        with track_memory() as tracker:
            pass
        del outside
        assert tracker.peak_elements == 0
