"""Synthetic binaural scenes with known interaural cues.

Every event is one source signal placed in both channels: the right copy is
delayed by an integer number of samples (positive ITD means the right ear
hears it later) and attenuated by ``ild_db`` decibels. An optional noise
floor is drawn independently for each channel.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from .dataset.annotations import AnnotationEvent, write_annotations
from .dataset.audio import write_wav
from .dataset.manifest import ClipMeta, write_manifest
from .dsp import AudioClip
from .enum.metaEnum import MetaEnum
from .exception.exceptions import SynthSpecError, from_os_error

logger = logging.getLogger(__name__)

MAX_ITD = 64
EVENT_AMPLITUDE = 0.3
MANIFEST_NAME = "manifest.tsv"


class SourceKind(Enum, metaclass=MetaEnum):
    TONE = "tone"
    NOISE_BAND = "noise-band"
    CLICK_TRAIN = "click-train"


@dataclass(frozen=True)
class Source:
    """``frequency`` is used by tones, ``low``/``high`` (Hz) by noise bands
    and ``rate`` (clicks per second) by click trains"""

    kind: SourceKind
    frequency: float = 0.0
    low: float = 0.0
    high: float = 0.0
    rate: float = 0.0


@dataclass(frozen=True)
class SynthEvent:
    label: str
    onset: float
    offset: float
    source: Source
    itd: int = 0
    ild_db: float = 0.0


@dataclass(frozen=True)
class SynthSpec:
    scene_label: str
    events: Tuple[SynthEvent, ...] = field(default_factory=tuple)
    duration: float = 4.0
    sample_rate: int = 16000
    # None renders without a noise floor
    noise_floor_db: Optional[float] = None
    seed: int = 0
    name: Optional[str] = None


def validate_spec(spec: SynthSpec, where: str = "spec") -> SynthSpec:
    """checks a spec and names the first offending field.

    Raises:
        SynthSpecError: raised with the field path of the invalid value
    """
    if spec.sample_rate <= 0:
        raise SynthSpecError(f"{where}.sample_rate", "must be positive")
    if spec.duration <= 0:
        raise SynthSpecError(f"{where}.duration", "must be positive")
    if not str(spec.scene_label).strip():
        raise SynthSpecError(f"{where}.scene_label", "must not be empty")
    nyquist = spec.sample_rate / 2.0
    for index, event in enumerate(spec.events):
        path = f"{where}.events[{index}]"
        if not 0.0 <= event.onset < event.offset <= spec.duration:
            raise SynthSpecError(
                f"{path}.onset",
                f"[{event.onset}, {event.offset}) must lie within "
                f"[0, {spec.duration}] with onset < offset",
            )
        if abs(event.itd) > MAX_ITD:
            raise SynthSpecError(f"{path}.itd", f"|itd| must be <= {MAX_ITD} samples")
        if not event.label.strip():
            raise SynthSpecError(f"{path}.label", "must not be empty")
        source = event.source
        if source.kind is SourceKind.TONE and not 0 < source.frequency < nyquist:
            raise SynthSpecError(f"{path}.source.frequency", f"must lie in (0, {nyquist})")
        if source.kind is SourceKind.NOISE_BAND and not 0 <= source.low < source.high <= nyquist:
            raise SynthSpecError(
                f"{path}.source", f"noise band needs 0 <= low < high <= {nyquist}"
            )
        if source.kind is SourceKind.CLICK_TRAIN and source.rate <= 0:
            raise SynthSpecError(f"{path}.source.rate", "must be positive")
    return spec


def _source_signal(
    source: Source, length: int, sample_rate: int, rng: np.random.Generator
) -> np.ndarray:
    t = np.arange(length) / sample_rate
    if source.kind is SourceKind.TONE:
        return EVENT_AMPLITUDE * np.sin(2.0 * np.pi * source.frequency * t)
    if source.kind is SourceKind.NOISE_BAND:
        spectrum = np.fft.rfft(rng.standard_normal(length))
        frequencies = np.fft.rfftfreq(length, 1.0 / sample_rate)
        spectrum[(frequencies < source.low) | (frequencies > source.high)] = 0.0
        band = np.fft.irfft(spectrum, n=length)
        peak = np.max(np.abs(band))
        return EVENT_AMPLITUDE * band / peak if peak > 0 else band
    clicks = np.zeros(length)
    period = max(1, int(round(sample_rate / source.rate)))
    clicks[::period] = EVENT_AMPLITUDE
    return clicks


def _delay(signal: np.ndarray, samples: int) -> np.ndarray:
    """shifts by an integer number of samples, zero-filling the gap"""
    out = np.zeros_like(signal)
    if samples >= 0:
        out[samples:] = signal[: len(signal) - samples]
    else:
        out[:samples] = signal[-samples:]
    return out


def render(spec: SynthSpec) -> Tuple[AudioClip, ClipMeta]:
    """renders a spec to a binaural clip and its metadata. Event boundaries
    are snapped to whole samples; the metadata carries the spec's values.

    Returns:
        Tuple[AudioClip, ClipMeta]: two-channel clip and its events
    """
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    sr = spec.sample_rate
    length = int(round(spec.duration * sr))
    left = np.zeros(length)
    right = np.zeros(length)
    for event in spec.events:
        start = int(round(event.onset * sr))
        stop = min(length, int(round(event.offset * sr)))
        placed = np.zeros(length)
        placed[start:stop] = _source_signal(event.source, stop - start, sr, rng)
        left += placed
        right += _delay(placed, event.itd) * 10.0 ** (-event.ild_db / 20.0)
    if spec.noise_floor_db is not None:
        level = 10.0 ** (spec.noise_floor_db / 20.0)
        left += level * rng.standard_normal(length)
        right += level * rng.standard_normal(length)

    events = tuple(
        sorted(AnnotationEvent(e.onset, e.offset, e.label) for e in spec.events)
    )
    return AudioClip(np.stack([left, right]), sr), ClipMeta(
        audio_path=None, scene_label=spec.scene_label, events=events
    )


def write_corpus(
    specs: Sequence[SynthSpec],
    out_dir: Union[Path, str],
    manifest_name: str = MANIFEST_NAME,
) -> Path:
    """renders every spec to ``<name>.wav`` and ``<name>.ann`` and writes
    the manifest listing them.

    Returns:
        Path: the manifest path
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metas = []
    for index, spec in enumerate(specs):
        name = spec.name or f"clip_{index:02d}"
        clip, meta = render(spec)
        audio_path = write_wav(out_dir / f"{name}.wav", clip)
        annotation_path = write_annotations(out_dir / f"{name}.ann", meta.events)
        metas.append(
            ClipMeta(audio_path, meta.scene_label, meta.events, annotation_path)
        )
    manifest = write_manifest(out_dir / manifest_name, metas)
    logger.info("wrote %d synthetic clips to %s", len(metas), out_dir)
    return manifest


# scene -> event class -> (source, itd samples, ild dB)
MICRO_SCENES = {
    "home": {
        "dishes": (Source(SourceKind.CLICK_TRAIN, rate=12.0), 6, 3.0),
        "keyboard": (Source(SourceKind.NOISE_BAND, low=2000.0, high=4000.0), -4, -2.0),
    },
    "street": {
        "car": (Source(SourceKind.NOISE_BAND, low=200.0, high=600.0), 3, 4.0),
        "horn": (Source(SourceKind.TONE, frequency=440.0), -6, -3.0),
    },
}


def micro_corpus_specs(
    seed: int = 0,
    sample_rate: int = 16000,
    duration: float = 4.0,
    clips: int = 8,
) -> List[SynthSpec]:
    """specs of the micro-corpus: clips alternate between the two scenes
    and every clip holds one event of each class of its scene, the first in
    the first half of the clip and the second in the second half"""
    rng = np.random.default_rng(seed)
    scenes = sorted(MICRO_SCENES)
    half = duration / 2.0
    specs = []
    for index in range(clips):
        scene = scenes[index % len(scenes)]
        events = []
        for slot, label in enumerate(sorted(MICRO_SCENES[scene])):
            source, itd, ild_db = MICRO_SCENES[scene][label]
            onset = round(slot * half + rng.uniform(0.1, 0.3) * half, 3)
            length = round(rng.uniform(0.4, 0.6) * half, 3)
            events.append(SynthEvent(label, onset, onset + length, source, itd, ild_db))
        specs.append(
            SynthSpec(
                scene_label=scene,
                events=tuple(events),
                duration=duration,
                sample_rate=sample_rate,
                noise_floor_db=-50.0,
                seed=int(rng.integers(2**31)),
                name=f"clip_{index:02d}",
            )
        )
    return specs


def make_micro_corpus(
    out_dir: Union[Path, str],
    seed: int = 0,
    sample_rate: int = 16000,
    duration: float = 4.0,
) -> Path:
    """writes the 8-clip, 2-scene, 4-class micro-corpus; each event class
    occurs in exactly one scene. Identical seeds give identical bytes.

    Returns:
        Path: the manifest path
    """
    return write_corpus(micro_corpus_specs(seed, sample_rate, duration), out_dir)


def contingency_table(metas: Iterable[ClipMeta]) -> pd.DataFrame:
    """event-class x scene occurrence counts"""
    rows = [
        (event.label, meta.scene_label) for meta in metas for event in meta.events
    ]
    frame = pd.DataFrame(rows, columns=["event", "scene"])
    return pd.crosstab(frame["event"], frame["scene"])


def _require(data: Any, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise SynthSpecError(f"{where}.{key}", "is required")
    return data[key]


def _number(value: Any, where: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SynthSpecError(where, f"expected a number, got {value!r}")
    if kind is int and float(value) != int(value):
        raise SynthSpecError(where, f"expected an integer, got {value!r}")
    return kind(value)


def _parse_source(data: Any, where: str) -> Source:
    kind = _require(data, "kind", where)
    if kind not in SourceKind:
        raise SynthSpecError(
            f"{where}.kind", f"unknown source kind {kind!r}, choose from "
            f"{[k.value for k in SourceKind]}"
        )
    kind = SourceKind(kind)
    values = {}
    needed = {
        SourceKind.TONE: ("frequency",),
        SourceKind.NOISE_BAND: ("low", "high"),
        SourceKind.CLICK_TRAIN: ("rate",),
    }[kind]
    for key in needed:
        values[key] = _number(_require(data, key, where), f"{where}.{key}")
    return Source(kind, **values)


def _parse_event(data: Any, where: str) -> SynthEvent:
    return SynthEvent(
        label=str(_require(data, "label", where)),
        onset=_number(_require(data, "onset", where), f"{where}.onset"),
        offset=_number(_require(data, "offset", where), f"{where}.offset"),
        source=_parse_source(_require(data, "source", where), f"{where}.source"),
        itd=_number(data.get("itd", 0), f"{where}.itd", int),
        ild_db=_number(data.get("ild_db", 0.0), f"{where}.ild_db"),
    )


def parse_spec(data: Any, where: str = "spec") -> SynthSpec:
    """builds and validates one SynthSpec from decoded JSON"""
    if not isinstance(data, dict):
        raise SynthSpecError(where, "expected an object")
    events = data.get("events", [])
    if not isinstance(events, list):
        raise SynthSpecError(f"{where}.events", "expected a list")
    noise = data.get("noise_floor_db")
    spec = SynthSpec(
        scene_label=str(_require(data, "scene_label", where)),
        events=tuple(
            _parse_event(event, f"{where}.events[{i}]") for i, event in enumerate(events)
        ),
        duration=_number(data.get("duration", 4.0), f"{where}.duration"),
        sample_rate=_number(data.get("sample_rate", 16000), f"{where}.sample_rate", int),
        noise_floor_db=None if noise is None else _number(noise, f"{where}.noise_floor_db"),
        seed=_number(data.get("seed", 0), f"{where}.seed", int),
        name=data.get("name"),
    )
    return validate_spec(spec, where)


def load_specs(path: Union[Path, str]) -> List[SynthSpec]:
    """reads a spec file: either one clip object or ``{"clips": [...]}``.
    JSON is read through the YAML loader, which also accepts YAML files.

    Raises:
        SynthSpecError: raised with the line and column of a syntax error or
        the field path of an invalid value
        MissingArtifactError: raised if the file does not exist
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise from_os_error(e, path)
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as error:
        mark = error.problem_mark
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        raise SynthSpecError(where, str(error.problem or error))
    if isinstance(data, dict) and "clips" in data:
        clips = data["clips"]
        if not isinstance(clips, list):
            raise SynthSpecError("clips", "expected a list")
        return [parse_spec(clip, f"clips[{i}]") for i, clip in enumerate(clips)]
    return [parse_spec(data)]
