"""Segment-based error rate and F1 for event detection, F1 for scene
classification and the JSON metrics report.

Counting per segment: S = min(FN, FP), D = max(0, FN - FP),
I = max(0, FP - FN); ER = (S + D + I) / N with N the number of active
reference entries, F1 = 2 TP / (2 TP + FP + FN).
"""
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .enum.modeenum import Mode
from .exception.exceptions import InvalidConfigError, InvalidInputError, ShapeError

# time values are compared on an integer microsecond grid
_TICKS = 1_000_000


def _ticks(seconds: float) -> int:
    return int(round(seconds * _TICKS))


def segmentize(
    frame_activity: np.ndarray, frame_hop: float, segment_length: float
) -> np.ndarray:
    """maps T x C frame activity onto segments of ``segment_length``
    seconds: segment s of class c is active iff any active frame
    [n*hop, (n+1)*hop) overlaps [s*len, (s+1)*len). A final partial
    segment is kept.

    Raises:
        InvalidConfigError: raised if segment_length < frame_hop or either is
        not positive

    Returns:
        np.ndarray: Tseg x C boolean activity
    """
    activity = np.asarray(frame_activity).astype(bool)
    if activity.ndim != 2:
        raise ShapeError(f"frame activity must be T x C, got {activity.shape}")
    hop, length = _ticks(frame_hop), _ticks(segment_length)
    if hop <= 0 or length <= 0:
        raise InvalidConfigError("frame hop and segment length must be positive")
    if length < hop:
        raise InvalidConfigError(
            f"segment length {segment_length} s is shorter than the frame hop "
            f"{frame_hop} s"
        )
    frames, classes = activity.shape
    count = -(-frames * hop // length)
    segments = np.zeros((count, classes), dtype=bool)
    n = np.arange(frames)
    first = n * hop // length
    last = -(-(n + 1) * hop // length) - 1
    for frame in np.flatnonzero(activity.any(axis=1)):
        segments[first[frame] : last[frame] + 1] |= activity[frame]
    return segments


@dataclass(frozen=True)
class SegmentScores:
    N: int = 0
    S: int = 0
    D: int = 0
    I: int = 0
    TP: int = 0
    FP: int = 0
    FN: int = 0

    def __add__(self, other: "SegmentScores") -> "SegmentScores":
        if not isinstance(other, SegmentScores):
            return NotImplemented
        return SegmentScores(
            *(getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__)
        )

    @property
    def errors(self) -> int:
        return self.S + self.D + self.I

    @property
    def er(self) -> float:
        """error rate; 0 without errors, +inf when errors meet an empty
        reference"""
        if self.N == 0:
            return 0.0 if self.errors == 0 else math.inf
        return self.errors / self.N

    @property
    def f1(self) -> float:
        """F1 in percent, 0.0 when nothing is active on either side"""
        denominator = 2 * self.TP + self.FP + self.FN
        if denominator == 0:
            return 0.0
        return 100.0 * 2 * self.TP / denominator

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def sed_scores(ref: np.ndarray, pred: np.ndarray) -> SegmentScores:
    """counts the segment-based error decomposition of ``pred`` against
    ``ref``, both Tseg x C binary.

    Raises:
        ShapeError: raised if the shapes differ

    Returns:
        SegmentScores: the counts with ER and F1 derived from them
    """
    ref = np.asarray(ref).astype(bool)
    pred = np.asarray(pred).astype(bool)
    if ref.shape != pred.shape or ref.ndim != 2:
        raise ShapeError(
            f"reference {ref.shape} and prediction {pred.shape} must be equal T x C"
        )
    tp = (ref & pred).sum(axis=1)
    fp = (~ref & pred).sum(axis=1)
    fn = (ref & ~pred).sum(axis=1)
    return SegmentScores(
        N=int(ref.sum()),
        S=int(np.minimum(fn, fp).sum()),
        D=int(np.maximum(0, fn - fp).sum()),
        I=int(np.maximum(0, fp - fn).sum()),
        TP=int(tp.sum()),
        FP=int(fp.sum()),
        FN=int(fn.sum()),
    )


def asc_f1(
    ref_scenes: Sequence[int],
    pred_scenes: Sequence[int],
    C_ASC: int,
    average: str = "micro",
) -> float:
    """scene F1 in percent over clips. ``micro`` equals accuracy for single
    label decisions; ``macro`` averages the per-class F1 of every class that
    occurs in the reference or the prediction.

    Raises:
        InvalidInputError: raised for unequal lengths or out-of-range indices
        InvalidConfigError: raised for an unknown averaging mode

    Returns:
        float: F1 in percent
    """
    ref = np.asarray(ref_scenes, dtype=np.int64)
    pred = np.asarray(pred_scenes, dtype=np.int64)
    if ref.shape != pred.shape:
        raise InvalidInputError(
            f"{len(ref)} reference scenes against {len(pred)} predictions"
        )
    if ref.size == 0:
        return 0.0
    if min(ref.min(), pred.min()) < 0 or max(ref.max(), pred.max()) >= C_ASC:
        raise InvalidInputError(f"scene index outside [0, {C_ASC})")

    confusion = np.zeros((C_ASC, C_ASC), dtype=np.int64)
    np.add.at(confusion, (ref, pred), 1)
    tp = np.diag(confusion)
    if average == "micro":
        # every miss is one FP and one FN, so 2TP/(2TP+FP+FN) = TP/total
        return 100.0 * tp.sum() / ref.size
    if average == "macro":
        fp = confusion.sum(axis=0) - tp
        fn = confusion.sum(axis=1) - tp
        denominator = 2 * tp + fp + fn
        present = denominator > 0
        return float(100.0 * np.mean(2 * tp[present] / denominator[present]))
    raise InvalidConfigError(f"unknown ASC averaging '{average}'")


def file_level_scenes(
    recording_ids: Sequence[Hashable],
    asc_probs: np.ndarray,
    ref_scenes: Sequence[int],
) -> Tuple[List[int], List[int]]:
    """collapses clip decisions to one per recording by averaging the clip
    scene probabilities, returning (reference, predicted) indices in order
    of first appearance"""
    groups: Dict[Hashable, List[int]] = defaultdict(list)
    for index, recording in enumerate(recording_ids):
        groups[recording].append(index)
    probs = np.asarray(asc_probs)
    ref, pred = [], []
    for indices in groups.values():
        ref.append(int(ref_scenes[indices[0]]))
        pred.append(int(np.argmax(probs[indices].mean(axis=0))))
    return ref, pred


def metrics_report(
    mode: Mode,
    sed: Optional[SegmentScores] = None,
    granularity: Optional[float] = None,
    asc: Optional[float] = None,
    asc_average: str = "micro",
    asc_level: str = "clip",
) -> dict:
    """JSON-ready report; an infinite ER is written as null with
    ``er_infinite`` set"""
    report = {"mode": Mode(mode).value}
    if sed is not None:
        er = sed.er
        report["sed"] = {
            "er": None if math.isinf(er) else er,
            "er_infinite": math.isinf(er),
            "f1": sed.f1,
            "granularity_s": granularity,
            "counts": sed.to_dict(),
        }
    if asc is not None:
        report["asc"] = {"f1": asc, "average": asc_average, "level": asc_level}
    return report
