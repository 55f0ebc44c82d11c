import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Tuple

import numpy as np

from ..exception.exceptions import ConfigMismatchError
from ..loader import Example, ExampleLoader, FeatureIndex, IndexRow
from ..metrics import (
    SegmentScores,
    asc_f1,
    file_level_scenes,
    metrics_report,
    sed_scores,
    segmentize,
)
from ..model.checkpoint import read_checkpoint
from ..model.training import stack_batch
from ..utils import write_json
from .trainworker import check_index
from .workerbase import WorkerBase

logger = logging.getLogger(__name__)


class EvaluateWorker(WorkerBase):
    """The EvaluateWorker class runs a trained checkpoint over the extracted
    clip windows and scores it: segment-based ER/F1 at the configured
    granularity for events, F1 over clips or files for scenes.
    """

    command = "evaluate"

    def _gather(self) -> List[Example]:
        config = self.config
        paths = config.paths
        self.index = FeatureIndex.load(paths.feature_dir)
        check_index(self.index, config)
        self.net = read_checkpoint(paths.checkpoint)
        net_config = self.net.config
        if self.net.mode is not config.mode:
            raise ConfigMismatchError(
                f"checkpoint holds a {self.net.mode.value} network, the run "
                f"is configured for {config.mode.value}"
            )
        vocab = self.index.vocabulary
        expected = (self.index.channels, self.index.frames, self.index.mels)
        actual = (net_config.in_channels, net_config.T, net_config.M)
        if expected != actual or (net_config.C_SED, net_config.C_ASC) != (
            vocab.n_events,
            vocab.n_scenes,
        ):
            raise ConfigMismatchError(
                f"checkpoint network {actual} with {net_config.C_SED}/"
                f"{net_config.C_ASC} classes does not fit features {expected} "
                f"with {vocab.n_events}/{vocab.n_scenes} classes"
            )
        return ExampleLoader(self.index, paths.feature_dir, config.workers).load(
            progress=True
        )

    def _predict(self, examples: List[Example]) -> Tuple[list, list]:
        """probabilities per clip window; forward passes run one batch at a
        time since layers cache their inputs"""
        sed, asc = [], []
        size = self.config.optimizer.batch_size
        for start in range(0, len(examples), size):
            x, _ = stack_batch(examples[start : start + size])
            sed_probs, asc_probs = self.net.forward(x, train=False)
            if sed_probs is not None:
                sed.extend(sed_probs)
            if asc_probs is not None:
                asc.extend(asc_probs)
        return sed, asc

    def _score_recording(
        self, windows: List[Tuple[IndexRow, Example, np.ndarray]]
    ) -> SegmentScores:
        threshold = self.config.sed_threshold
        ref = np.concatenate(
            [targets.sed[: row.valid_frames] for row, (_, targets), _ in windows]
        )
        pred = np.concatenate(
            [probs[: row.valid_frames] >= threshold for row, _, probs in windows]
        )
        hop = self.index.frame_hop
        granularity = self.config.granularity
        return sed_scores(
            segmentize(ref, hop, granularity), segmentize(pred, hop, granularity)
        )

    def _process(self, examples: List[Example]) -> Dict[str, Any]:
        config = self.config
        rows = self.index.clips
        sed, asc = self._predict(examples)

        sed_result = None
        if self.net.mode.has_sed:
            recordings: Dict[str, list] = OrderedDict()
            for row, example, probs in zip(rows, examples, sed):
                recordings.setdefault(row.recording_id, []).append((row, example, probs))
            with ThreadPoolExecutor(max_workers=config.workers) as executor:
                sed_result = sum(
                    executor.map(self._score_recording, recordings.values()),
                    SegmentScores(),
                )

        asc_result = None
        if self.net.mode.has_asc:
            ref = [row.scene_index for row in rows]
            if config.asc_level == "file":
                ref, pred = file_level_scenes(
                    [row.recording_id for row in rows], np.array(asc), ref
                )
            else:
                pred = [int(np.argmax(probs)) for probs in asc]
            asc_result = asc_f1(
                ref, pred, self.index.vocabulary.n_scenes, config.asc_average
            )

        report = metrics_report(
            self.net.mode,
            sed=sed_result,
            granularity=config.granularity if sed_result is not None else None,
            asc=asc_result,
            asc_average=config.asc_average,
            asc_level=config.asc_level,
        )
        report["feature_set"] = self.index.feature_set.label
        report["clips"] = len(rows)
        report_path = write_json(config.paths.report, report)
        logger.info("wrote metrics report to %s", report_path)
        return {"report": str(report_path), **report}
