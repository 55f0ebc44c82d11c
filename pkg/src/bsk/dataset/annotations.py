import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

from ..exception.exceptions import AnnotationParseError, from_os_error

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class AnnotationEvent:
    onset: float
    offset: float
    label: str

    def __post_init__(self):
        if not 0.0 <= self.onset < self.offset:
            raise ValueError(
                f"event needs 0 <= onset < offset, got ({self.onset}, "
                f"{self.offset})"
            )


def _as_float(token: str):
    try:
        return float(token)
    except ValueError:
        return None


def parse_annotation_line(line: str, line_number: int, path=None):
    """extracts the (onset, offset, label) triple from one line. Leading
    columns such as the audio filename and the scene are skipped: the triple
    starts at the first pair of numeric fields.

    Returns:
        Optional[AnnotationEvent]: None for a blank line
    """
    stripped = line.strip()
    if not stripped:
        return None
    fields = (
        [f.strip() for f in stripped.split("\t")]
        if "\t" in stripped
        else stripped.split()
    )
    for i in range(len(fields) - 2):
        onset, offset = _as_float(fields[i]), _as_float(fields[i + 1])
        if onset is None or offset is None:
            continue
        label = " ".join(f for f in fields[i + 2 :] if f).strip()
        if not label:
            break
        if not (math.isfinite(onset) and math.isfinite(offset)):
            raise AnnotationParseError(
                line_number, f"onset and offset must be finite, got {onset}, {offset}", path
            )
        if onset < 0 or offset <= onset:
            raise AnnotationParseError(
                line_number,
                f"offset {offset} must exceed onset {onset} >= 0",
                path,
            )
        return AnnotationEvent(onset, offset, label)
    raise AnnotationParseError(
        line_number,
        f"expected numeric onset and offset followed by a label: {stripped!r}",
        path,
    )


def parse_annotations(path: Union[Path, str]) -> List[AnnotationEvent]:
    """reads a TUT-style annotation file, one ``onset offset label`` event
    per non-empty line.

    Args:
        path (Union[Path, str]): annotation text file

    Raises:
        AnnotationParseError: raised with the 1-based line number of the
        first invalid line
        MissingArtifactError: raised if the file does not exist

    Returns:
        List[AnnotationEvent]: events in file order
    """
    path = Path(path)
    events = []
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise from_os_error(e, path)
    for line_number, line in enumerate(lines, start=1):
        event = parse_annotation_line(line, line_number, path)
        if event is not None:
            events.append(event)
    logger.debug("parsed %d events from %s", len(events), path)
    return events


def format_annotations(events: Iterable[AnnotationEvent]) -> str:
    return "".join(
        f"{event.onset:.6f}\t{event.offset:.6f}\t{event.label}\n"
        for event in events
    )


def write_annotations(
    path: Union[Path, str], events: Iterable[AnnotationEvent]
) -> Path:
    path = Path(path)
    try:
        path.write_text(format_annotations(events), encoding="utf-8")
    except OSError as e:
        raise from_os_error(e, path)
    return path
