"""Front-end transforms shared by every feature: framing, Hamming window,
one-sided FFT, HTK mel filterbank and the complex mel projection.

All computation happens in 64-bit floats. Objects are frozen dataclasses
wrapping read-only arrays, so they can be shared across workers.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exception.exceptions import (
    InvalidConfigError,
    ShapeError,
    TooShortError,
)

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class AudioClip:
    """Multichannel audio, ``samples`` shaped channels x length."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2 or samples.shape[0] not in (1, 2):
            raise InvalidConfigError(
                f"AudioClip needs 1 or 2 channels, got shape {samples.shape}"
            )
        if self.sample_rate <= 0:
            raise InvalidConfigError(
                f"sample_rate must be positive, got {self.sample_rate}"
            )
        object.__setattr__(self, "samples", _frozen(samples, np.float64))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def channel_count(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.length / self.sample_rate

    def channel(self, index: int) -> np.ndarray:
        return self.samples[index]


@dataclass(frozen=True)
class StftConfig:
    window_length: int
    hop_length: int
    fft_size: int

    def __post_init__(self):
        if self.window_length < 2:
            raise InvalidConfigError(
                f"window_length must be >= 2, got {self.window_length}"
            )
        if self.hop_length != self.window_length // 2:
            raise InvalidConfigError(
                "hop_length must be half the window length "
                f"({self.window_length // 2}), got {self.hop_length}"
            )
        if self.fft_size < self.window_length:
            raise InvalidConfigError(
                f"fft_size {self.fft_size} is shorter than the window "
                f"{self.window_length}"
            )

    @classmethod
    def from_sample_rate(
        cls, sample_rate: int, window_seconds: float = 0.04
    ) -> "StftConfig":
        """derives a 40 ms window, 50% hop and the smallest power-of-two
        FFT size covering the window.

        Args:
            sample_rate (int): clip sample rate in Hz
            window_seconds (float, optional): window duration. Defaults to
            0.04.

        Returns:
            StftConfig: the derived configuration
        """
        window_length = int(round(window_seconds * sample_rate))
        if window_length < 2:
            raise InvalidConfigError(
                f"{window_seconds} s at {sample_rate} Hz is under two samples"
            )
        fft_size = 1 << (window_length - 1).bit_length()
        return cls(window_length, window_length // 2, fft_size)

    @property
    def bin_count(self) -> int:
        return self.fft_size // 2 + 1

    def frame_count(self, length: int) -> int:
        if length < self.window_length:
            return 0
        return 1 + (length - self.window_length) // self.hop_length

    def frame_hop_seconds(self, sample_rate: int) -> float:
        return self.hop_length / sample_rate


@dataclass(frozen=True)
class ComplexSpectrogram:
    """One channel of STFT bins, frames x (fft_size/2 + 1)."""

    bins: np.ndarray
    fft_size: int

    def __post_init__(self):
        bins = np.asarray(self.bins)
        if bins.ndim != 2 or bins.shape[1] != self.fft_size // 2 + 1:
            raise ShapeError(
                f"spectrogram of shape {bins.shape} does not match "
                f"fft_size {self.fft_size}"
            )
        object.__setattr__(self, "bins", _frozen(bins, np.complex128))

    @property
    def shape(self):
        return self.bins.shape


@dataclass(frozen=True)
class MelFilterbank:
    weights: np.ndarray
    band_centers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights, np.float64))
        object.__setattr__(
            self, "band_centers", _frozen(self.band_centers, np.float64)
        )

    @property
    def filter_count(self) -> int:
        return self.weights.shape[0]

    @property
    def bin_count(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class ComplexMelSpectrogram:
    bins: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins)
        if bins.ndim != 2:
            raise ShapeError(f"expected frames x mels, got {bins.shape}")
        object.__setattr__(self, "bins", _frozen(bins, np.complex128))

    @property
    def shape(self):
        return self.bins.shape


@dataclass(frozen=True)
class FeatureConfig:
    """STFT settings plus the mel bank every feature is projected on."""

    stft: StftConfig
    sample_rate: int
    n_mels: int
    f_min: float = 0.0
    f_max: Optional[float] = None
    _bank: MelFilterbank = field(default=None, repr=False, compare=False)

    @classmethod
    def create(
        cls,
        sample_rate: int,
        n_mels: int,
        window_seconds: float = 0.04,
        f_min: float = 0.0,
        f_max: Optional[float] = None,
    ) -> "FeatureConfig":
        return cls(
            StftConfig.from_sample_rate(sample_rate, window_seconds),
            sample_rate,
            n_mels,
            f_min,
            f_max,
        )

    @property
    def frame_hop(self) -> float:
        return self.stft.frame_hop_seconds(self.sample_rate)

    @property
    def filterbank(self) -> MelFilterbank:
        if self._bank is None:
            bank = mel_filterbank(
                self.n_mels,
                self.stft.bin_count,
                self.sample_rate,
                self.f_min,
                self.f_max,
            )
            object.__setattr__(self, "_bank", bank)
        return self._bank


def hamming_window(length: int) -> np.ndarray:
    """symmetric Hamming window, w[i] = 0.54 - 0.46 cos(2 pi i / (L - 1))

    Args:
        length (int): window length in samples

    Raises:
        InvalidConfigError: raised if length < 2

    Returns:
        np.ndarray: the window
    """
    if length < 2:
        raise InvalidConfigError(f"window length must be >= 2, got {length}")
    n = np.arange(length, dtype=np.float64)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def _channel_stft(
    signal: np.ndarray, cfg: StftConfig, window: np.ndarray
) -> ComplexSpectrogram:
    frames = np.lib.stride_tricks.sliding_window_view(
        signal, cfg.window_length
    )[:: cfg.hop_length]
    bins = np.fft.rfft(frames * window, n=cfg.fft_size, axis=-1)
    return ComplexSpectrogram(bins, cfg.fft_size)


def stft(clip: AudioClip, cfg: StftConfig) -> List[ComplexSpectrogram]:
    """Short-time Fourier transform of every channel. Frame n covers samples
    [n * hop, n * hop + window); frames are not centered and each is
    zero-padded to ``fft_size`` before the one-sided transform.

    Args:
        clip (AudioClip): the audio
        cfg (StftConfig): framing parameters

    Raises:
        TooShortError: raised if the clip is shorter than one window

    Returns:
        List[ComplexSpectrogram]: one spectrogram per channel
    """
    if clip.length < cfg.window_length:
        raise TooShortError(
            f"clip has {clip.length} samples, one window needs "
            f"{cfg.window_length}"
        )
    window = hamming_window(cfg.window_length)
    return [
        _channel_stft(clip.channel(c), cfg, window)
        for c in range(clip.channel_count)
    ]


def hz_to_mel(frequency):
    return 2595.0 * np.log10(1.0 + np.asarray(frequency, np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    M: int,
    K: int,
    sample_rate: int,
    f_min: float = 0.0,
    f_max: Optional[float] = None,
) -> MelFilterbank:
    """HTK-style triangular filters with centers equally spaced on the mel
    scale between f_min and f_max. Each row is scaled so its largest weight
    is exactly 1.

    Args:
        M (int): number of filters
        K (int): number of one-sided FFT bins
        sample_rate (int): sample rate in Hz
        f_min (float, optional): lower band edge. Defaults to 0.
        f_max (Optional[float], optional): upper band edge. Defaults to
        Nyquist.

    Raises:
        InvalidConfigError: raised for bad edges or if a filter covers no bin

    Returns:
        MelFilterbank: weights M x K
    """
    f_max = sample_rate / 2.0 if f_max is None else float(f_max)
    if M < 1:
        raise InvalidConfigError(f"need at least one mel filter, got {M}")
    if K < 2:
        raise InvalidConfigError(f"need at least two FFT bins, got {K}")
    if not 0.0 <= f_min < f_max <= sample_rate / 2.0:
        raise InvalidConfigError(
            f"mel band edges must satisfy 0 <= f_min < f_max <= "
            f"{sample_rate / 2.0}, got ({f_min}, {f_max})"
        )

    fft_size = 2 * (K - 1)
    bin_freqs = np.arange(K) * sample_rate / fft_size
    edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), M + 2))
    lower, center, upper = edges[:-2], edges[1:-1], edges[2:]

    rising = (bin_freqs[None, :] - lower[:, None]) / (center - lower)[:, None]
    falling = (upper[:, None] - bin_freqs[None, :]) / (upper - center)[:, None]
    weights = np.maximum(0.0, np.minimum(rising, falling))

    peaks = weights.max(axis=1)
    empty = np.flatnonzero(peaks <= 0.0)
    if empty.size:
        raise InvalidConfigError(
            f"{M} mel filters are too many for {K} bins: filters "
            f"{empty.tolist()} cover no bin"
        )
    weights /= peaks[:, None]
    logger.debug("built %d mel filters over %d bins", M, K)
    return MelFilterbank(weights, center)


def complex_mel(
    spec: ComplexSpectrogram, bank: MelFilterbank
) -> ComplexMelSpectrogram:
    """projects complex bins on the mel bank,
    X_mel[n, m] = sum_k X[n, k] H_m[k], keeping the phase.

    Raises:
        ShapeError: raised if bank and spectrogram bin counts differ

    Returns:
        ComplexMelSpectrogram: frames x filters
    """
    if spec.bins.shape[1] != bank.bin_count:
        raise ShapeError(
            f"spectrogram has {spec.bins.shape[1]} bins, filterbank expects "
            f"{bank.bin_count}"
        )
    return ComplexMelSpectrogram(spec.bins @ bank.weights.T)
