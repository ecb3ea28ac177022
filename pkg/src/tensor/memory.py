import threading
import weakref
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

import numpy as np

_ACTIVE_TRACKER: ContextVar["MemoryTracker | None"] = ContextVar("caa_memory_tracker", default=None)


def _owning_buffer(arr: np.ndarray) -> np.ndarray:
    """
    Sobe a cadeia de views até o array que realmente possui a memória.

    Args:
        arr (np.ndarray): Array possivelmente derivado de outro.

    Returns:
        np.ndarray: Array dono do buffer.
    """
    root = arr
    while isinstance(root.base, np.ndarray):
        root = root.base
    return root


class MemoryTracker:
    """
    Contabiliza elementos vivos dos buffers que sustentam Tensors criados dentro do escopo.

    Cada buffer é contado uma única vez, não importa quantas views o referenciem, e é
    descontado quando o coletor o libera. Em CPython a liberação é determinística, então o
    pico medido é reprodutível entre execuções.
    """

    def __init__(self) -> None:
        self.live_elements = 0
        self.peak_elements = 0
        self._tracked: set[int] = set()
        self._lock = threading.Lock()

    def observe(self, arr: np.ndarray) -> None:
        root = _owning_buffer(arr)
        key = id(root)

        with self._lock:
            if key in self._tracked:
                return
            self._tracked.add(key)
            self.live_elements += root.size
            self.peak_elements = max(self.peak_elements, self.live_elements)

        weakref.finalize(root, self._release, key, root.size)

    def _release(self, key: int, size: int) -> None:
        with self._lock:
            if key not in self._tracked:
                return
            self._tracked.discard(key)
            self.live_elements -= size


@contextmanager
def track_memory() -> Iterator[MemoryTracker]:
    """
    Ativa um MemoryTracker para todos os Tensors criados no contexto atual.

    Yields:
        MemoryTracker: Rastreador com os contadores de elementos vivos e de pico.
    """
    tracker = MemoryTracker()
    token = _ACTIVE_TRACKER.set(tracker)
    try:
        yield tracker
    finally:
        _ACTIVE_TRACKER.reset(token)


def observe_allocation(arr: np.ndarray) -> None:
    tracker = _ACTIVE_TRACKER.get()
    if tracker is not None:
        tracker.observe(arr)
