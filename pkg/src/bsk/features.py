"""Monaural and binaural feature maps on a shared frames x mels grid, and
the stacking of those maps into the network input for each feature set.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dataset.audio import mono_downmix
from .dsp import (
    AudioClip,
    ComplexMelSpectrogram,
    ComplexSpectrogram,
    FeatureConfig,
    complex_mel,
    stft,
)
from .enum.featuresetenum import FeatureSet
from .exception.exceptions import (
    InvalidConfigError,
    InvalidInputError,
    ShapeError,
)

logger = logging.getLogger(__name__)

# floor for magnitudes and the PHAT normalisation
EPS = 1e-10


@dataclass(frozen=True)
class FeatureTensor:
    """Network input, CH x T x M float32, tagged with its feature set."""

    data: np.ndarray
    layout: FeatureSet

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        object.__setattr__(self, "data", data)
        self.validate()

    def validate(self):
        if self.data.ndim != 3:
            raise ShapeError(f"expected CH x T x M, got {self.data.shape}")
        if self.data.shape[0] != self.layout.channel_count:
            raise ShapeError(
                f"{self.layout.label} needs {self.layout.channel_count} "
                f"channels, got {self.data.shape[0]}"
            )
        if not np.all(np.isfinite(self.data)):
            raise InvalidInputError("feature tensor contains NaN or Inf")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    @property
    def frames(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class GccLagMap:
    """signed sample lags of the GCC columns, ascending, lag 0 included"""

    lag_values: np.ndarray

    @property
    def zero_index(self) -> int:
        return int(np.flatnonzero(self.lag_values == 0)[0])

    def to_list(self) -> list:
        return [int(v) for v in self.lag_values]


def _check_pair(left, right):
    if left.shape != right.shape:
        raise ShapeError(
            f"left {left.shape} and right {right.shape} shapes differ"
        )


def _wrap(angle: np.ndarray) -> np.ndarray:
    """maps angles to (-pi, pi]"""
    return np.pi - np.mod(np.pi - angle, 2.0 * np.pi)


def logmel(xmel: ComplexMelSpectrogram) -> np.ndarray:
    return np.log(np.abs(xmel.bins) + EPS)


def ild(
    left: ComplexMelSpectrogram, right: ComplexMelSpectrogram
) -> np.ndarray:
    _check_pair(left, right)
    return (np.abs(left.bins) + EPS) / (np.abs(right.bins) + EPS)


def phase(xmel: ComplexMelSpectrogram) -> np.ndarray:
    """argument of each mel bin in (-pi, pi]; arg(0) is 0"""
    bins = xmel.bins
    angle = np.where(bins == 0, 0.0, np.angle(bins))
    return np.where(angle <= -np.pi, np.pi, angle)


def ipd(
    left: ComplexMelSpectrogram, right: ComplexMelSpectrogram
) -> np.ndarray:
    """phase difference left minus right, wrapped to (-pi, pi]"""
    _check_pair(left, right)
    return _wrap(phase(left) - phase(right))


def sincos_ipd(ipd_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return np.sin(ipd_values), np.cos(ipd_values)


def gcc_lag_map(M: int) -> GccLagMap:
    lags = np.arange(-(M // 2), M - M // 2, dtype=np.int64)
    lags.setflags(write=False)
    return GccLagMap(lags)


def gcc_phat(
    left: ComplexSpectrogram, right: ComplexSpectrogram, M: int
) -> Tuple[np.ndarray, GccLagMap]:
    """GCC-PHAT on the raw STFT bins. The PHAT-weighted cross-spectrum
    X_l conj(X_r) is inverted over all fft_size lags and the M lags around
    zero are kept. With this convention a right channel delayed by tau
    samples peaks at lag -tau.

    Args:
        left (ComplexSpectrogram): left channel spectrogram
        right (ComplexSpectrogram): right channel spectrogram
        M (int): number of lags to keep

    Raises:
        ShapeError: raised if the spectrograms differ in shape
        InvalidConfigError: raised if M exceeds the FFT size

    Returns:
        Tuple[np.ndarray, GccLagMap]: frames x M correlation and its lags
    """
    _check_pair(left, right)
    if not 1 <= M <= left.fft_size:
        raise InvalidConfigError(
            f"GCC lag count {M} must lie in [1, {left.fft_size}]"
        )
    cross = left.bins * np.conj(right.bins)
    cross = cross / (np.abs(left.bins) * np.abs(right.bins) + EPS)
    correlation = np.fft.irfft(cross, n=left.fft_size, axis=-1)
    lag_map = gcc_lag_map(M)
    return correlation[:, lag_map.lag_values % left.fft_size], lag_map


def stack_features(
    feature_set: FeatureSet, clip: AudioClip, cfg: FeatureConfig
) -> FeatureTensor:
    """builds the CH x T x M tensor of one feature set. Logmel channels come
    first, spatial channels after them.

    Args:
        feature_set (FeatureSet): the layout to produce
        clip (AudioClip): the recording
        cfg (FeatureConfig): STFT and mel settings

    Raises:
        InvalidInputError: raised if a binaural layout gets a mono clip

    Returns:
        FeatureTensor: the stacked features
    """
    if clip.sample_rate != cfg.sample_rate:
        raise InvalidInputError(
            f"clip sample rate {clip.sample_rate} Hz differs from the "
            f"configured {cfg.sample_rate} Hz"
        )
    bank = cfg.filterbank

    if feature_set is FeatureSet.MEL_1CH:
        mono = mono_downmix(clip) if clip.channel_count == 2 else clip
        (spec,) = stft(mono, cfg.stft)
        return FeatureTensor(
            logmel(complex_mel(spec, bank))[np.newaxis], feature_set
        )

    if clip.channel_count != 2:
        raise InvalidInputError(
            f"{feature_set.label} needs a binaural clip, got "
            f"{clip.channel_count} channel(s)"
        )
    spec_l, spec_r = stft(clip, cfg.stft)
    mel_l, mel_r = complex_mel(spec_l, bank), complex_mel(spec_r, bank)
    channels = [logmel(mel_l), logmel(mel_r)]

    match feature_set:
        case FeatureSet.MEL_2CH:
            pass
        case FeatureSet.MEL_PHASE:
            channels += [phase(mel_l), phase(mel_r)]
        case FeatureSet.MEL_IPD:
            channels.append(ipd(mel_l, mel_r))
        case FeatureSet.MEL_SINCOS:
            channels.extend(sincos_ipd(ipd(mel_l, mel_r)))
        case FeatureSet.MEL_GCC:
            channels.append(gcc_phat(spec_l, spec_r, cfg.n_mels)[0])
        case FeatureSet.MEL_ILD:
            channels.append(ild(mel_l, mel_r))

    return FeatureTensor(np.stack(channels), feature_set)
