"""BFT1 feature files: magic "BFT1", u32 CH, u32 T, u32 M, u8 layout tag,
then CH*T*M little-endian float32 in C order."""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from .enum.featuresetenum import FeatureSet
from .exception.exceptions import FeatureFormatError
from .features import FeatureTensor

MAGIC = b"BFT1"
_HEADER = struct.Struct("<4sIIIB")


def encode_features(tensor: FeatureTensor) -> bytes:
    channels, frames, mels = tensor.shape
    header = _HEADER.pack(MAGIC, channels, frames, mels, tensor.layout.value)
    return header + tensor.data.astype("<f4").tobytes(order="C")


def decode_features(payload: bytes, source: str = "<bytes>") -> FeatureTensor:
    if len(payload) < _HEADER.size:
        raise FeatureFormatError(f"{source}: file shorter than the header")
    magic, channels, frames, mels, tag = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise FeatureFormatError(f"{source}: bad magic {magic!r}")
    if tag not in FeatureSet:
        raise FeatureFormatError(f"{source}: unknown layout tag {tag}")
    expected = _HEADER.size + 4 * channels * frames * mels
    if len(payload) != expected:
        raise FeatureFormatError(
            f"{source}: expected {expected} bytes, found {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4", offset=_HEADER.size)
    return FeatureTensor(
        data.reshape(channels, frames, mels).astype(np.float32),
        FeatureSet(tag),
    )


def write_feature_file(path: Union[Path, str], tensor: FeatureTensor) -> Path:
    path = Path(path)
    path.write_bytes(encode_features(tensor))
    return path


def read_feature_file(path: Union[Path, str]) -> FeatureTensor:
    path = Path(path)
    return decode_features(path.read_bytes(), str(path))
