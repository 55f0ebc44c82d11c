"""BMK1 checkpoints.

Layout (little-endian): magic "BMK1", u8 mode code, 18 u32 config values
(M, T, kernel h, kernel w, P1, P2, mp1..mp5, Q, G_sed, G1_asc, G2_asc, C_SED,
C_ASC, in_channels), f64 asc_loss_weight, u32 tensor count, then per tensor
u16 name length, UTF-8 name, u8 ndim, u32 dims and float64 data. Parameters
come first in declaration order, followed by the batch-norm running
statistics.
"""
import io
import logging
import struct
from pathlib import Path
from typing import BinaryIO, Dict, Union

import numpy as np

from ..enum.modeenum import Mode
from ..exception.exceptions import CheckpointFormatError, MissingArtifactError
from .config import ModelConfig
from .network import MtlNetwork

logger = logging.getLogger(__name__)

MAGIC = b"BMK1"
_CONFIG = struct.Struct("<B18Id")
_COUNT = struct.Struct("<I")
_NAME = struct.Struct("<H")
_NDIM = struct.Struct("<B")


def _config_values(config: ModelConfig, mode: Mode):
    c = config
    return (
        mode.code,
        c.M,
        c.T,
        *c.kernel,
        c.P1,
        c.P2,
        *c.MP,
        c.Q,
        *c.G,
        c.C_SED,
        c.C_ASC,
        c.in_channels,
        float(c.asc_loss_weight),
    )


def _tensors(net: MtlNetwork) -> Dict[str, np.ndarray]:
    return {**net.parameters(), **net.buffers()}


def encode_checkpoint(net: MtlNetwork) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(_CONFIG.pack(*_config_values(net.config, net.mode)))
    tensors = _tensors(net)
    out.write(_COUNT.pack(len(tensors)))
    for name, value in tensors.items():
        encoded = name.encode("utf-8")
        out.write(_NAME.pack(len(encoded)))
        out.write(encoded)
        out.write(_NDIM.pack(value.ndim))
        out.write(struct.pack(f"<{value.ndim}I", *value.shape))
        out.write(np.ascontiguousarray(value, dtype="<f8").tobytes())
    return out.getvalue()


def _read(stream: BinaryIO, size: int, what: str) -> bytes:
    chunk = stream.read(size)
    if len(chunk) != size:
        raise CheckpointFormatError(f"checkpoint truncated while reading {what}")
    return chunk


def decode_checkpoint(payload: bytes) -> MtlNetwork:
    """rebuilds the network stored in a BMK1 payload.

    Raises:
        CheckpointFormatError: raised for a bad magic, a truncated payload,
        a configuration that fails validation or tensors that do not match
        the network the configuration describes

    Returns:
        MtlNetwork: network with the stored parameters and statistics
    """
    stream = io.BytesIO(payload)
    if _read(stream, 4, "magic") != MAGIC:
        raise CheckpointFormatError("not a BMK1 checkpoint")
    values = _CONFIG.unpack(_read(stream, _CONFIG.size, "configuration"))
    code, ints, weight = values[0], values[1:-1], values[-1]
    if code >= len(Mode):
        raise CheckpointFormatError(f"unknown mode code {code}")
    M, T, kh, kw, P1, P2 = ints[:6]
    try:
        config = ModelConfig(
            M=M,
            T=T,
            kernel=(kh, kw),
            P1=P1,
            P2=P2,
            MP=ints[6:11],
            Q=ints[11],
            G=ints[12:15],
            C_SED=ints[15],
            C_ASC=ints[16],
            in_channels=ints[17],
            asc_loss_weight=weight,
        )
    except ValueError as error:
        raise CheckpointFormatError(f"stored configuration is invalid: {error}")

    # the seed only shapes values that are overwritten below
    net = MtlNetwork(config, Mode.from_code(code), seed=0)
    expected = _tensors(net)
    (count,) = _COUNT.unpack(_read(stream, _COUNT.size, "tensor count"))
    if count != len(expected):
        raise CheckpointFormatError(
            f"checkpoint holds {count} tensors, the network needs {len(expected)}"
        )
    for _ in range(count):
        (length,) = _NAME.unpack(_read(stream, _NAME.size, "name length"))
        name = _read(stream, length, "name").decode("utf-8")
        (ndim,) = _NDIM.unpack(_read(stream, _NDIM.size, "rank"))
        shape = struct.unpack(f"<{ndim}I", _read(stream, 4 * ndim, "shape"))
        size = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(_read(stream, 8 * size, name), dtype="<f8")
        target = expected.get(name)
        if target is None or target.shape != shape:
            raise CheckpointFormatError(
                f"tensor '{name}' {shape} does not belong to this network"
            )
        target[...] = data.reshape(shape)
    if stream.read(1):
        raise CheckpointFormatError("trailing bytes after the last tensor")
    return net


def write_checkpoint(path: Union[Path, str], net: MtlNetwork) -> Path:
    path = Path(path)
    path.write_bytes(encode_checkpoint(net))
    logger.info("wrote %s checkpoint to %s", net.mode.value, path)
    return path


def read_checkpoint(path: Union[Path, str]) -> MtlNetwork:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes())
