"""Frame-level event targets, one-hot scene targets and fixed-length clip
windows."""
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from ..exception.exceptions import InvalidConfigError, ShapeError
from ..features import FeatureTensor
from .annotations import AnnotationEvent
from .manifest import LabelVocabulary


@dataclass(frozen=True)
class TargetSet:
    """sed: T x C_SED binary, scene: one-hot C_ASC. Frames at and after
    ``valid_frames`` are padding."""

    sed: np.ndarray
    scene: np.ndarray
    valid_frames: int = None

    def __post_init__(self):
        sed = np.asarray(self.sed, dtype=np.float64)
        scene = np.asarray(self.scene, dtype=np.float64)
        if sed.ndim != 2:
            raise ShapeError(f"sed targets must be T x C, got {sed.shape}")
        if not np.all((sed == 0) | (sed == 1)):
            raise ValueError("sed targets must be binary")
        if scene.ndim != 1 or scene.sum() != 1 or not np.all(
            (scene == 0) | (scene == 1)
        ):
            raise ValueError("scene target must be one-hot")
        valid = sed.shape[0] if self.valid_frames is None else self.valid_frames
        if not 0 <= valid <= sed.shape[0]:
            raise ShapeError(
                f"valid_frames {valid} outside [0, {sed.shape[0]}]"
            )
        object.__setattr__(self, "sed", sed)
        object.__setattr__(self, "scene", scene)
        object.__setattr__(self, "valid_frames", int(valid))

    @property
    def frames(self) -> int:
        return self.sed.shape[0]

    @property
    def mask(self) -> np.ndarray:
        mask = np.zeros(self.frames, dtype=bool)
        mask[: self.valid_frames] = True
        return mask

    @property
    def scene_index(self) -> int:
        return int(np.argmax(self.scene))


def encode_sed_targets(
    events: Iterable[AnnotationEvent],
    frame_hop: float,
    T: int,
    vocab: LabelVocabulary,
) -> np.ndarray:
    """marks frame n active for class c iff [n*hop, (n+1)*hop) overlaps an
    event [onset, offset) of class c. Events are clamped to the T frames.

    Args:
        events (Iterable[AnnotationEvent]): annotated events
        frame_hop (float): frame hop in seconds
        T (int): number of frames
        vocab (LabelVocabulary): class ordering

    Raises:
        UnknownClassError: raised for a label missing from the vocabulary

    Returns:
        np.ndarray: T x C_SED matrix of 0/1
    """
    starts = np.arange(T) * frame_hop
    ends = starts + frame_hop
    targets = np.zeros((T, vocab.n_events), dtype=np.float64)
    for event in events:
        column = vocab.event_index(event.label)
        active = (starts < event.offset) & (ends > event.onset)
        targets[active, column] = 1.0
    return targets


def encode_scene_target(scene_label: str, vocab: LabelVocabulary) -> np.ndarray:
    scene = np.zeros(vocab.n_scenes, dtype=np.float64)
    scene[vocab.scene_index(scene_label)] = 1.0
    return scene


def split_into_clips(
    features: FeatureTensor, targets: TargetSet, T: int
) -> List[Tuple[FeatureTensor, TargetSet]]:
    """cuts a recording into non-overlapping windows of exactly T frames.
    The last partial window is zero-padded and its TargetSet records how
    many frames are real.

    Raises:
        InvalidConfigError: raised if T is not positive
        ShapeError: raised if features and targets differ in frame count

    Returns:
        List[Tuple[FeatureTensor, TargetSet]]: the windows in time order
    """
    if T <= 0:
        raise InvalidConfigError(f"clip length must be positive, got {T}")
    total = features.frames
    if targets.frames != total:
        raise ShapeError(
            f"features have {total} frames, targets {targets.frames}"
        )
    count = max(1, math.ceil(total / T))
    padded = count * T - total

    data = np.pad(features.data, ((0, 0), (0, padded), (0, 0)))
    sed = np.pad(targets.sed, ((0, padded), (0, 0)))
    valid = targets.valid_frames

    clips = []
    for index in range(count):
        window = slice(index * T, (index + 1) * T)
        clips.append(
            (
                FeatureTensor(data[:, window], features.layout),
                TargetSet(
                    sed[window],
                    targets.scene,
                    int(np.clip(valid - index * T, 0, T)),
                ),
            )
        )
    return clips
