import logging
from dataclasses import replace
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
from tqdm import tqdm

from ..dataset.annotations import parse_annotations
from ..dataset.audio import read_wav
from ..dataset.manifest import ClipMeta, LabelVocabulary, read_manifest
from ..dataset.targets import (
    TargetSet,
    encode_scene_target,
    encode_sed_targets,
    split_into_clips,
)
from ..dsp import FeatureConfig
from ..enum.featuresetenum import FeatureSet
from ..exception.exceptions import BskError, InvalidInputError, from_os_error
from ..featureio import write_feature_file
from ..features import gcc_lag_map, stack_features
from ..loader import FeatureIndex, IndexRow
from .workerbase import WorkerBase

logger = logging.getLogger(__name__)


def _extract_recording(
    job: Tuple[int, ClipMeta],
    feature_set: FeatureSet,
    feature_config: FeatureConfig,
    vocab: LabelVocabulary,
    frames: int,
    feature_dir: Path,
) -> Tuple[List[IndexRow], Dict[str, str]]:
    """features and targets of one recording, cut into clip windows.
    Returns the index rows, or an error entry when the recording fails."""
    position, meta = job
    try:
        clip = read_wav(meta.audio_path)
        features = stack_features(feature_set, clip, feature_config)
        targets = TargetSet(
            encode_sed_targets(
                meta.events, feature_config.frame_hop, features.frames, vocab
            ),
            encode_scene_target(meta.scene_label, vocab),
        )
        rows = []
        stem = f"{position:04d}_{meta.recording_id}"
        for window, (tensor, window_targets) in enumerate(
            split_into_clips(features, targets, frames)
        ):
            feature_file = f"{stem}_{window:03d}.bft"
            target_file = f"{stem}_{window:03d}.npy"
            write_feature_file(feature_dir / feature_file, tensor)
            np.save(feature_dir / target_file, window_targets.sed)
            rows.append(
                IndexRow(
                    feature_file,
                    target_file,
                    window_targets.valid_frames,
                    window_targets.scene_index,
                    meta.recording_id,
                    window,
                )
            )
        return rows, None
    except BskError as e:
        return [], {"path": str(meta.audio_path), **e.to_dict()}
    except OSError as e:
        return [], {"path": str(meta.audio_path), **from_os_error(e).to_dict()}


class ExtractWorker(WorkerBase):
    """The ExtractWorker class turns the recordings of a manifest into BFT1
    feature files of fixed-length clip windows, one target matrix per
    window and the ``index.json`` sidecar that ties them together.
    """

    command = "extract"

    def _gather(self) -> List[ClipMeta]:
        """reads the manifest and each annotation file; recordings whose
        annotations fail to parse are reported and skipped"""
        metas = []
        for meta in read_manifest(self.config.paths.manifest, load_events=False):
            if meta.annotation_path is None:
                metas.append(meta)
                continue
            try:
                events = tuple(parse_annotations(meta.annotation_path))
            except BskError as e:
                self.record_error(meta.annotation_path, e)
                continue
            except OSError as e:
                self.record_error(meta.annotation_path, from_os_error(e))
                continue
            metas.append(replace(meta, events=events))
        if not metas:
            raise InvalidInputError(
                f"no usable recordings in {self.config.paths.manifest}"
            )
        return metas

    def _feature_config(self, metas: List[ClipMeta]) -> FeatureConfig:
        """feature settings at the sample rate of the first readable
        recording; unreadable ones are reported by their own job"""
        sample_rate = None
        for meta in metas:
            try:
                sample_rate = read_wav(meta.audio_path).sample_rate
                break
            except BskError:
                continue
        if sample_rate is None:
            raise InvalidInputError(
                f"no readable recording in {self.config.paths.manifest}"
            )
        return FeatureConfig.create(
            sample_rate,
            self.config.mels,
            self.config.window_seconds,
            self.config.f_min,
            self.config.f_max,
        )

    def _process(self, metas: List[ClipMeta]) -> Dict[str, Any]:
        config = self.config
        feature_dir = config.paths.feature_dir
        feature_dir.mkdir(parents=True, exist_ok=True)
        vocab = LabelVocabulary.build(metas)
        feature_config = self._feature_config(metas)
        extract_one = partial(
            _extract_recording,
            feature_set=config.feature_set,
            feature_config=feature_config,
            vocab=vocab,
            frames=config.frames,
            feature_dir=feature_dir,
        )

        rows: List[IndexRow] = []
        jobs = list(enumerate(metas))
        with tqdm(total=len(jobs), desc="Extracting features", ncols=80) as pbar:

            def collect(result):
                job_rows, error = result
                rows.extend(job_rows)
                if error:
                    logger.error("%s: %s", error["path"], error["message"])
                    self.errors.append(error)
                pbar.update()

            if config.workers > 1:
                with Pool(processes=config.workers) as pool:
                    for result in pool.imap(extract_one, jobs):
                        collect(result)
            else:
                for job in jobs:
                    collect(extract_one(job))

        stft = feature_config.stft
        index = FeatureIndex(
            feature_set=config.feature_set,
            sample_rate=feature_config.sample_rate,
            frame_hop=feature_config.frame_hop,
            frames=config.frames,
            mels=config.mels,
            channels=config.feature_set.channel_count,
            stft={
                "window_length": stft.window_length,
                "hop_length": stft.hop_length,
                "fft_size": stft.fft_size,
            },
            vocabulary=vocab,
            gcc_lags=(
                gcc_lag_map(config.mels).to_list()
                if config.feature_set is FeatureSet.MEL_GCC
                else None
            ),
            clips=rows,
        )
        index_path = index.write(feature_dir)
        logger.info("extracted %d clip windows to %s", len(rows), feature_dir)
        return {
            "index": str(index_path),
            "feature_set": config.feature_set.label,
            "recordings": len(metas),
            "clips": len(rows),
        }
