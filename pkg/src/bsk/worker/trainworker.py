import logging
from typing import Any, Dict, List

from ..exception.exceptions import ConfigMismatchError
from ..loader import Example, ExampleLoader, FeatureIndex
from ..model.checkpoint import write_checkpoint
from ..model.network import MtlNetwork
from ..model.training import train
from ..utils import write_json
from .workerbase import WorkerBase

logger = logging.getLogger(__name__)


def check_index(index: FeatureIndex, config) -> None:
    """fails before any training or evaluation when the extracted features
    do not fit the configured run"""
    if index.feature_set is not config.feature_set:
        raise ConfigMismatchError(
            f"features were extracted as {index.feature_set.label}, the run "
            f"is configured for {config.feature_set.label}"
        )
    if (index.frames, index.mels) != (config.frames, config.mels):
        raise ConfigMismatchError(
            f"features hold {index.frames} x {index.mels} (T x M) windows, the "
            f"model expects {config.frames} x {config.mels}"
        )


class TrainWorker(WorkerBase):
    """The TrainWorker class trains the network of the configured mode on
    the extracted clip windows and writes the BMK1 checkpoint and the JSON
    training log."""

    command = "train"

    def _gather(self) -> List[Example]:
        paths = self.config.paths
        self.index = FeatureIndex.load(paths.feature_dir)
        check_index(self.index, self.config)
        return ExampleLoader(self.index, paths.feature_dir, self.config.workers).load(
            progress=True
        )

    def _process(self, examples: List[Example]) -> Dict[str, Any]:
        config = self.config
        model_config = config.model_config(self.index.vocabulary, self.index.channels)
        net = MtlNetwork(model_config, config.mode, config.seed)
        logger.info(
            "training %s network with %d parameters on %d clips",
            config.mode.value,
            net.parameter_count(),
            len(examples),
        )
        log = train(
            net,
            examples,
            config.optimizer,
            config.epochs,
            seed=config.seed,
            progress=True,
        )
        checkpoint = write_checkpoint(config.paths.checkpoint, net)
        training_log = write_json(
            config.paths.training_log,
            {
                "mode": config.mode.value,
                "feature_set": config.feature_set.label,
                "seed": config.seed,
                "model": model_config.to_dict(),
                **log.to_dict(),
            },
        )
        final = log.final
        return {
            "checkpoint": str(checkpoint),
            "training_log": str(training_log),
            "epochs": len(log.epochs),
            "final_loss": None if final is None else final.total,
        }
