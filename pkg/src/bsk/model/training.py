"""Seeded mini-batch training with Adam."""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..dataset.targets import TargetSet
from ..exception.exceptions import InvalidInputError, NumericalError, ShapeError
from ..features import FeatureTensor
from .config import OptimizerConfig
from .network import LossReport, MtlNetwork, TargetBatch, backward
from .optim import Adam

logger = logging.getLogger(__name__)

Example = Tuple[FeatureTensor, TargetSet]


@dataclass
class TrainingLog:
    """per-epoch mean losses, in epoch order"""

    epochs: List[LossReport] = field(default_factory=list)

    @property
    def initial(self) -> Optional[LossReport]:
        return self.epochs[0] if self.epochs else None

    @property
    def final(self) -> Optional[LossReport]:
        return self.epochs[-1] if self.epochs else None

    def to_dict(self) -> dict:
        return {
            "epochs": [
                {"epoch": index + 1, **report.to_dict()}
                for index, report in enumerate(self.epochs)
            ]
        }


def stack_batch(examples: Sequence[Example]) -> Tuple[np.ndarray, TargetBatch]:
    x = np.stack([tensor.data for tensor, _ in examples]).astype(np.float64)
    return x, TargetBatch.from_targets([targets for _, targets in examples])


def _check_examples(net: MtlNetwork, examples: Sequence[Example]):
    if not examples:
        raise InvalidInputError("cannot train on an empty dataset")
    c = net.config
    expected = (c.in_channels, c.T, c.M)
    for index, (tensor, targets) in enumerate(examples):
        if tensor.shape != expected:
            raise ShapeError(
                f"clip {index}: features {tensor.shape} do not match the "
                f"network input {expected}"
            )
        if targets.sed.shape != (c.T, c.C_SED) or targets.scene.shape != (c.C_ASC,):
            raise ShapeError(
                f"clip {index}: targets {targets.sed.shape}/{targets.scene.shape} "
                f"do not match C_SED={c.C_SED}, C_ASC={c.C_ASC}"
            )


def train(
    net: MtlNetwork,
    examples: Sequence[Example],
    optimizer_config: OptimizerConfig,
    epochs: int,
    seed: int = 0,
    asc_loss_weight: Optional[float] = None,
    progress: bool = False,
    on_epoch: Optional[Callable[[int, LossReport], bool]] = None,
) -> TrainingLog:
    """trains ``net`` in place. The batch order of every epoch is drawn
    from a generator seeded with ``seed``, so two runs with the same network
    seed and the same ``seed`` produce identical parameters.

    Args:
        net (MtlNetwork): network to update
        examples (Sequence[Example]): (features, targets) clip windows
        optimizer_config (OptimizerConfig): Adam settings and batch size
        epochs (int): number of passes over the data
        seed (int, optional): shuffling seed. Defaults to 0.
        asc_loss_weight (Optional[float], optional): scene loss weight,
        defaults to the network configuration's value
        progress (bool, optional): show a tqdm bar on stderr
        on_epoch (Optional[Callable[[int, LossReport], bool]], optional):
        called with the 1-based epoch and its mean losses after every epoch;
        a true return value stops training early

    Raises:
        InvalidInputError: raised for an empty dataset
        NumericalError: raised when a batch loss is not finite

    Returns:
        TrainingLog: mean LossReport of every epoch
    """
    _check_examples(net, examples)
    weight = net.config.asc_loss_weight if asc_loss_weight is None else asc_loss_weight
    optimizer = Adam(optimizer_config)
    shuffler = np.random.default_rng([seed, 1])
    size = optimizer_config.batch_size
    log = TrainingLog()

    for epoch in tqdm(
        range(epochs), desc="Training", ncols=80, disable=not progress
    ):
        order = shuffler.permutation(len(examples))
        totals = np.zeros(3)
        batches = 0
        for start in range(0, len(order), size):
            x, targets = stack_batch([examples[i] for i in order[start : start + size]])
            report, gradients = backward(net, x, targets, weight)
            if not np.isfinite(report.total):
                raise NumericalError(
                    f"epoch {epoch + 1}: loss became {report.total}"
                )
            optimizer.step(net.parameters(), gradients)
            totals += (report.sed_loss, report.asc_loss, report.total)
            batches += 1
        mean = LossReport(*(float(v) for v in totals / batches))
        log.epochs.append(mean)
        logger.info(
            "epoch %d: sed %.6f asc %.6f total %.6f",
            epoch + 1,
            mean.sed_loss,
            mean.asc_loss,
            mean.total,
        )
        if on_epoch is not None and on_epoch(epoch + 1, mean):
            logger.info("stopping after epoch %d", epoch + 1)
            break
    return log
