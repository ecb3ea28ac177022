"""
Formato binário de contêiner de tensores (.caat) e pacotes com manifesto.

Layout (little-endian):
    magic "CAAT" | versão u32 | tipo u8 (0=float32, 1=float64) | posto u32 | dims u32 × posto |
    valores em ordem de linha.
"""

import logging
import re
import struct
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from src.core import (
    CONTAINER_MAGIC,
    CONTAINER_SUFFIX,
    CONTAINER_VERSION,
    MANIFEST_NAME,
    ContainerFormatError,
)
from src.tensor.tensor import DType, Tensor

logger = logging.getLogger(__name__)

_HEADER = struct.Struct("<4sIBI")
_DIM = struct.Struct("<I")

# Nomes viram nomes de arquivo dentro do pacote
_VALID_NAME = re.compile(r"^[A-Za-z0-9_.\-]+$")


def encode_tensor(t: Tensor) -> bytes:
    header = _HEADER.pack(CONTAINER_MAGIC, CONTAINER_VERSION, t.dtype.tag, t.ndim)
    dims = b"".join(_DIM.pack(d) for d in t.shape)
    little = t.numpy().astype(t.dtype.numpy.newbyteorder("<"), copy=False)
    return header + dims + np.ascontiguousarray(little).tobytes()


def decode_tensor(buf: bytes) -> Tensor:
    """
    Reconstrói um tensor a partir dos bytes de um contêiner.

    Args:
        buf (bytes): Conteúdo completo do arquivo.

    Returns:
        Tensor: Tensor com o tipo e o formato gravados.

    Raises:
        ContainerFormatError: Magic, versão ou tamanho do payload inesperados.
    """
    if len(buf) < _HEADER.size:
        raise ContainerFormatError("Arquivo menor que o cabeçalho do contêiner")

    magic, version, tag, rank = _HEADER.unpack_from(buf, 0)
    if magic != CONTAINER_MAGIC:
        raise ContainerFormatError(f"Magic inválido: {magic!r}")
    if version != CONTAINER_VERSION:
        raise ContainerFormatError(f"Versão de contêiner não suportada: {version}")

    offset = _HEADER.size
    if len(buf) < offset + rank * _DIM.size:
        raise ContainerFormatError("Cabeçalho de dimensões truncado")
    shape = tuple(_DIM.unpack_from(buf, offset + i * _DIM.size)[0] for i in range(rank))
    offset += rank * _DIM.size

    dtype = DType.from_tag(tag)
    expected = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    payload = buf[offset:]
    if len(payload) != expected:
        raise ContainerFormatError(
            f"Payload com {len(payload)} bytes, esperado {expected} para {shape} {dtype.value}"
        )

    values = np.frombuffer(payload, dtype=dtype.numpy.newbyteorder("<")).reshape(shape)
    return Tensor(values, dtype)


def write_tensor(path: Path, t: Tensor) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_tensor(t))


def read_tensor(path: Path) -> Tensor:
    return decode_tensor(path.read_bytes())


def write_bundle(directory: Path, tensors: Mapping[str, Tensor]) -> Path:
    """
    Grava um conjunto ordenado de tensores: um arquivo .caat por nome e um manifesto textual.

    Args:
        directory (Path): Pasta de destino (criada se necessário).
        tensors (Mapping[str, Tensor]): Tensores na ordem em que o manifesto deve listá-los.

    Returns:
        Path: Caminho do manifesto gravado.
    """
    directory.mkdir(parents=True, exist_ok=True)

    for name, t in tensors.items():
        if not _VALID_NAME.match(name):
            raise ContainerFormatError(f"Nome de tensor inválido para o pacote: '{name}'")
        write_tensor(directory / f"{name}{CONTAINER_SUFFIX}", t)

    manifest = directory / MANIFEST_NAME
    manifest.write_text("".join(f"{name}\n" for name in tensors), encoding="utf-8")
    logger.debug(f"Pacote com {len(tensors)} tensores gravado em {directory}")
    return manifest


def read_bundle(directory: Path) -> dict[str, Tensor]:
    manifest = directory / MANIFEST_NAME
    if not manifest.is_file():
        raise FileNotFoundError(f"Manifesto não encontrado: {manifest}")

    names = [line.strip() for line in manifest.read_text(encoding="utf-8").splitlines()]
    return {name: read_tensor(directory / f"{name}{CONTAINER_SUFFIX}") for name in names if name}
