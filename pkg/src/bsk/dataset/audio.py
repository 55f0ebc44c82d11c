"""RIFF/WAVE reading and writing plus the mono downmix."""
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..dsp import AudioClip
from ..exception.exceptions import (
    InvalidInputError,
    MalformedHeaderError,
    TruncatedDataError,
    UnsupportedCodecError,
    from_os_error,
)

logger = logging.getLogger(__name__)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


def _read_chunks(data: bytes, path) -> dict:
    """walks the RIFF chunk list and returns {chunk id: payload}. A data
    chunk running past the end of the file is kept as-is so the caller can
    report truncation."""
    if len(data) < 12:
        raise MalformedHeaderError("file too short for a RIFF header", path)
    riff, _, wave = struct.unpack("<4sI4s", data[:12])
    if riff != b"RIFF" or wave != b"WAVE":
        raise MalformedHeaderError("missing RIFF/WAVE signature", path)

    chunks = {}
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, size = struct.unpack("<4sI", data[offset : offset + 8])
        body = data[offset + 8 : offset + 8 + size]
        chunks.setdefault(chunk_id, (body, size))
        offset += 8 + size + (size & 1)
    return chunks


def _decode_samples(raw: bytes, fmt_tag: int, bits: int, path) -> np.ndarray:
    if fmt_tag == WAVE_FORMAT_PCM:
        match bits:
            case 16:
                ints = np.frombuffer(raw, dtype="<i2").astype(np.int64)
            case 24:
                triplets = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
                ints = (
                    triplets[:, 0].astype(np.int64)
                    | (triplets[:, 1].astype(np.int64) << 8)
                    | (triplets[:, 2].astype(np.int64) << 16)
                )
                ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
            case 32:
                ints = np.frombuffer(raw, dtype="<i4").astype(np.int64)
            case _:
                raise UnsupportedCodecError(
                    f"{bits}-bit PCM is not supported", path
                )
        return ints.astype(np.float64) / float(1 << (bits - 1))
    if fmt_tag == WAVE_FORMAT_IEEE_FLOAT:
        match bits:
            case 32:
                return np.frombuffer(raw, dtype="<f4").astype(np.float64)
            case 64:
                return np.frombuffer(raw, dtype="<f8").astype(np.float64)
        raise UnsupportedCodecError(f"{bits}-bit float is not supported", path)
    raise UnsupportedCodecError(f"format tag 0x{fmt_tag:04x}", path)


def read_wav(path: Union[Path, str]) -> AudioClip:
    """reads a PCM (16, 24 or 32 bit) or IEEE-float WAV file with one or two
    channels. PCM samples are divided by 2^(bits - 1).

    Args:
        path (Union[Path, str]): path to the WAV file

    Raises:
        MalformedHeaderError: raised for a damaged RIFF/fmt structure
        UnsupportedCodecError: raised for other codecs or bit depths
        TruncatedDataError: raised if the data chunk is cut short
        MissingArtifactError: raised if the file does not exist

    Returns:
        AudioClip: channels x samples in [-1, 1]
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise from_os_error(e, path)
    chunks = _read_chunks(data, path)

    if b"fmt " not in chunks:
        raise MalformedHeaderError("missing fmt chunk", path)
    fmt, _ = chunks[b"fmt "]
    if len(fmt) < 16:
        raise MalformedHeaderError("fmt chunk shorter than 16 bytes", path)
    fmt_tag, channels, sample_rate, byte_rate, block_align, bits = (
        struct.unpack("<HHIIHH", fmt[:16])
    )
    if fmt_tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise MalformedHeaderError("short WAVE_FORMAT_EXTENSIBLE", path)
        (fmt_tag,) = struct.unpack("<H", fmt[24:26])

    if channels not in (1, 2):
        raise UnsupportedCodecError(f"{channels} channels", path)
    if bits == 0 or bits % 8 or sample_rate == 0:
        raise MalformedHeaderError(
            f"invalid sample layout ({bits} bits at {sample_rate} Hz)", path
        )
    if block_align != channels * bits // 8:
        raise MalformedHeaderError(
            f"block_align {block_align} does not match {channels} x {bits} "
            "bits",
            path,
        )

    if b"data" not in chunks:
        raise TruncatedDataError("missing data chunk", path)
    raw, declared = chunks[b"data"]
    if len(raw) < declared or len(raw) % block_align:
        raise TruncatedDataError(
            f"data chunk declares {declared} bytes, {len(raw)} present", path
        )

    samples = _decode_samples(raw, fmt_tag, bits, path)
    clip = AudioClip(samples.reshape(-1, channels).T, sample_rate)
    logger.debug(
        "read %s: %d ch, %d Hz, %d-bit", path, channels, sample_rate, bits
    )
    return clip


def write_wav(path: Union[Path, str], clip: AudioClip) -> Path:
    """writes 16-bit PCM. Samples are rounded to the nearest step of
    1/32768 and clipped to the representable range; clipping is logged as a
    warning."""
    path = Path(path)
    scaled = np.round(clip.samples * 32768.0)
    clipped = int(np.count_nonzero(np.abs(clip.samples) > 1.0))
    if clipped:
        logger.warning("%s: clipped %d samples outside [-1, 1]", path, clipped)
    ints = np.clip(scaled, -32768, 32767)
    payload = ints.astype("<i2").T.tobytes()
    channels = clip.channel_count
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        WAVE_FORMAT_PCM,
        channels,
        clip.sample_rate,
        clip.sample_rate * channels * 2,
        channels * 2,
        16,
        b"data",
        len(payload),
    )
    try:
        path.write_bytes(header + payload)
    except OSError as e:
        raise from_os_error(e, path)
    return path


def mono_downmix(clip: AudioClip) -> AudioClip:
    """(L + R) / 2 of a binaural clip

    Raises:
        InvalidInputError: raised if the clip is already mono
    """
    if clip.channel_count != 2:
        raise InvalidInputError(
            f"downmix needs two channels, got {clip.channel_count}"
        )
    left, right = clip.samples
    return AudioClip((left + right) / 2.0, clip.sample_rate)
