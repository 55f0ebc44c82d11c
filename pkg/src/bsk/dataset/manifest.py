import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import pandas as pd

from ..exception.exceptions import (
    InvalidInputError,
    MissingArtifactError,
    UnknownClassError,
)
from .annotations import parse_annotations

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["audio_path", "scene_label", "annotation_path"]


@dataclass(frozen=True)
class ClipMeta:
    audio_path: Optional[Path]
    scene_label: str
    events: tuple = field(default_factory=tuple)
    annotation_path: Optional[Path] = None

    @property
    def recording_id(self) -> str:
        return Path(self.audio_path).stem if self.audio_path else ""


@dataclass(frozen=True)
class LabelVocabulary:
    """canonical class orderings: both lists are sorted label strings"""

    event_classes: tuple
    scene_classes: tuple

    def __post_init__(self):
        for name in ("event_classes", "scene_classes"):
            values = tuple(getattr(self, name))
            if len(set(values)) != len(values):
                raise InvalidInputError(f"duplicate labels in {name}")
            object.__setattr__(self, name, values)

    @classmethod
    def build(cls, metas: Iterable[ClipMeta]) -> "LabelVocabulary":
        metas = list(metas)
        events = {event.label for meta in metas for event in meta.events}
        scenes = {meta.scene_label for meta in metas}
        return cls(tuple(sorted(events)), tuple(sorted(scenes)))

    @classmethod
    def from_dict(cls, data: dict) -> "LabelVocabulary":
        return cls(tuple(data["event_classes"]), tuple(data["scene_classes"]))

    def to_dict(self) -> dict:
        return {
            "event_classes": list(self.event_classes),
            "scene_classes": list(self.scene_classes),
        }

    @property
    def n_events(self) -> int:
        return len(self.event_classes)

    @property
    def n_scenes(self) -> int:
        return len(self.scene_classes)

    def event_index(self, label: str) -> int:
        try:
            return self.event_classes.index(label)
        except ValueError:
            raise UnknownClassError(label, self.event_classes) from None

    def scene_index(self, label: str) -> int:
        try:
            return self.scene_classes.index(label)
        except ValueError:
            raise UnknownClassError(label, self.scene_classes) from None


def _resolve(base: Path, value) -> Optional[Path]:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return None
    text = str(value).strip()
    if not text:
        return None
    path = Path(text)
    return path if path.is_absolute() else base / path


def read_manifest(
    path: Union[Path, str], load_events: bool = True
) -> List[ClipMeta]:
    """reads a tab-separated ``audio_path scene_label annotation_path``
    manifest. Relative paths resolve against the manifest's directory. An
    empty annotation column means the recording has no events.

    Args:
        path (Union[Path, str]): manifest file
        load_events (bool, optional): parse the annotation files. Defaults
        to True.

    Raises:
        MissingArtifactError: raised if the manifest does not exist

    Returns:
        List[ClipMeta]: one entry per recording, in file order
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"manifest not found: {path}")
    frame = pd.read_csv(
        path,
        sep="\t",
        header=None,
        names=MANIFEST_COLUMNS,
        dtype=str,
        keep_default_na=False,
        comment="#",
        skip_blank_lines=True,
    )
    base = path.parent
    metas = []
    for row in frame.itertuples(index=False):
        annotation_path = _resolve(base, row.annotation_path)
        events = ()
        if load_events and annotation_path is not None:
            events = tuple(parse_annotations(annotation_path))
        metas.append(
            ClipMeta(
                audio_path=_resolve(base, row.audio_path),
                scene_label=str(row.scene_label).strip(),
                events=events,
                annotation_path=annotation_path,
            )
        )
    logger.info("manifest %s lists %d recordings", path, len(metas))
    return metas


def write_manifest(
    path: Union[Path, str], metas: Sequence[ClipMeta]
) -> Path:
    """writes the manifest with paths relative to its own directory when
    they lie below it"""
    path = Path(path)
    base = path.parent

    def relative(value: Optional[Path]) -> str:
        if value is None:
            return ""
        value = Path(value)
        try:
            return value.relative_to(base).as_posix()
        except ValueError:
            return value.as_posix()

    frame = pd.DataFrame(
        [
            [relative(m.audio_path), m.scene_label, relative(m.annotation_path)]
            for m in metas
        ],
        columns=MANIFEST_COLUMNS,
    )
    frame.to_csv(path, sep="\t", header=False, index=False, lineterminator="\n")
    return path

