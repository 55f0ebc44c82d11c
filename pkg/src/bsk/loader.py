import logging
from dataclasses import asdict, dataclass, field
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from .dataset.manifest import LabelVocabulary
from .dataset.targets import TargetSet
from .enum.featuresetenum import FeatureSet
from .exception.exceptions import FeatureFormatError, MissingArtifactError
from .featureio import read_feature_file
from .features import FeatureTensor
from .utils import read_json, write_json

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"


@dataclass(frozen=True)
class IndexRow:
    """one T-frame clip window of a recording"""

    feature_file: str
    target_file: str
    valid_frames: int
    scene_index: int
    recording_id: str
    window: int


@dataclass
class FeatureIndex:
    """The FeatureIndex class is the sidecar written by ``extract``. It
    records how the features were computed (layout, frame hop, STFT sizes,
    GCC lags), the class vocabulary and the clip windows in manifest order.
    File names are relative to the feature directory.
    """

    feature_set: FeatureSet
    sample_rate: int
    frame_hop: float
    frames: int
    mels: int
    channels: int
    stft: Dict[str, int]
    vocabulary: LabelVocabulary
    gcc_lags: Optional[List[int]] = None
    clips: List[IndexRow] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature_set": self.feature_set.label,
            "layout_tag": self.feature_set.value,
            "sample_rate": self.sample_rate,
            "frame_hop": self.frame_hop,
            "frames": self.frames,
            "mels": self.mels,
            "channels": self.channels,
            "stft": dict(self.stft),
            "vocabulary": self.vocabulary.to_dict(),
            "gcc_lags": self.gcc_lags,
            "clips": [asdict(row) for row in self.clips],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureIndex":
        try:
            return cls(
                feature_set=FeatureSet(data["layout_tag"]),
                sample_rate=int(data["sample_rate"]),
                frame_hop=float(data["frame_hop"]),
                frames=int(data["frames"]),
                mels=int(data["mels"]),
                channels=int(data["channels"]),
                stft=dict(data["stft"]),
                vocabulary=LabelVocabulary.from_dict(data["vocabulary"]),
                gcc_lags=data.get("gcc_lags"),
                clips=[IndexRow(**row) for row in data["clips"]],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FeatureFormatError(f"malformed feature index: {e}")

    def write(self, feature_dir: Union[Path, str]) -> Path:
        return write_json(Path(feature_dir) / INDEX_FILE, self.to_dict())

    @classmethod
    def load(cls, feature_dir: Union[Path, str]) -> "FeatureIndex":
        path = Path(feature_dir) / INDEX_FILE
        if not path.is_file():
            raise MissingArtifactError(
                f"feature index not found: {path}; run extract first"
            )
        return cls.from_dict(read_json(path))


Example = Tuple[FeatureTensor, TargetSet]


def _load_single_example(
    row: IndexRow, feature_dir: Path, scene_count: int
) -> Example:
    tensor = read_feature_file(feature_dir / row.feature_file)
    target_path = feature_dir / row.target_file
    if not target_path.is_file():
        raise MissingArtifactError(f"target file not found: {target_path}")
    scene = np.zeros(scene_count)
    scene[row.scene_index] = 1.0
    return tensor, TargetSet(np.load(target_path), scene, row.valid_frames)


class ExampleLoader:
    """loads the clip windows listed in a FeatureIndex, in index order"""

    def __init__(self, index: FeatureIndex, feature_dir: Union[Path, str], workers: int = 1):
        self.index = index
        self.feature_dir = Path(feature_dir)
        self.workers = workers

    def load(self, progress: bool = False) -> List[Example]:
        rows = self.index.clips
        load_one = partial(
            _load_single_example,
            feature_dir=self.feature_dir,
            scene_count=self.index.vocabulary.n_scenes,
        )
        examples = []
        with tqdm(
            total=len(rows), desc="Loading features", ncols=80, disable=not progress
        ) as pbar:
            if self.workers > 1:
                with Pool(processes=self.workers) as pool:
                    for example in pool.imap(load_one, rows):
                        examples.append(example)
                        pbar.update()
            else:
                for row in rows:
                    examples.append(load_one(row))
                    pbar.update()
        logger.info("loaded %d clip windows from %s", len(examples), self.feature_dir)
        return examples
