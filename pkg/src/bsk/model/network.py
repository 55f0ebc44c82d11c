"""The two-branch network: a shared convolutional trunk, an event branch
(BiGRU + time-distributed dense layers, sigmoid outputs) and a scene branch
(time-pooling convs + dense layers, softmax output).

Single-task networks are built by leaving out the other branch's layers.
"""
import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..dataset.targets import TargetSet
from ..enum.modeenum import Mode
from ..exception.exceptions import ShapeError
from .config import ModelConfig
from .layers import (
    BiGRU,
    Dense,
    Layer,
    MaxPool,
    conv_block,
    sigmoid,
    softmax,
)

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-7

Gradients = Dict[str, np.ndarray]


@dataclass(frozen=True)
class LossReport:
    sed_loss: float
    asc_loss: float
    total: float

    def to_dict(self) -> dict:
        return {
            "sed_loss": self.sed_loss,
            "asc_loss": self.asc_loss,
            "total": self.total,
        }


@dataclass(frozen=True)
class TargetBatch:
    """targets of a batch: sed B x T x C_SED, scene B x C_ASC, mask B x T"""

    sed: np.ndarray
    scene: np.ndarray
    mask: np.ndarray

    @classmethod
    def from_targets(cls, targets: Sequence[TargetSet]) -> "TargetBatch":
        return cls(
            np.stack([t.sed for t in targets]),
            np.stack([t.scene for t in targets]),
            np.stack([t.mask for t in targets]),
        )


class MtlNetwork:
    """The MtlNetwork class holds the layer graph for a ModelConfig and a
    Mode. Trunk, event branch and scene branch draw their parameters from
    separate generators seeded from ``seed``, so a single-task network and
    the joint network built with the same seed share the values of every
    layer they have in common.
    """

    def __init__(self, config: ModelConfig, mode: Mode = Mode.MTL, seed: int = 0):
        self.config = config
        self.mode = Mode(mode)
        self.seed = seed
        c = config
        rng = np.random.default_rng([seed, 0])

        self.trunk: List[Layer] = []
        channels = c.in_channels
        for index in range(3):
            self.trunk.append(
                conv_block("conv", channels, c.P1, c.kernel, "mel", c.MP[index], rng, index + 1)
            )
            channels = c.P1

        self.sed_layers: List[Layer] = []
        if self.mode.has_sed:
            rng = np.random.default_rng([seed, 1])
            self.sed_layers = [
                BiGRU("gru", c.P1 * c.pooled_mels, c.Q, rng),
                Dense("sed_fc1", c.Q, c.G[0], rng),
                Dense("sed_fc2", c.G[0], c.C_SED, rng),
            ]

        self.asc_layers: List[Layer] = []
        if self.mode.has_asc:
            rng = np.random.default_rng([seed, 2])
            self.asc_layers = [
                conv_block("asc_conv", c.P1, c.P2, c.kernel, "time", c.MP[3], rng, 1),
                conv_block("asc_conv", c.P2, c.P2, c.kernel, "time", c.MP[4], rng, 2),
                # collapses whatever time extent the two pools leave
                MaxPool("asc_global_pool", "time", c.pooled_frames),
            ]
            self.asc_dense = [
                Dense("asc_fc1", c.P2 * c.pooled_mels, c.G[1], rng),
                Dense("asc_fc2", c.G[1], c.G[2], rng),
                Dense("asc_fc3", c.G[2], c.C_ASC, rng),
            ]
        else:
            self.asc_dense = []

        self._cache = None

    @property
    def layers(self) -> List[Layer]:
        return self.trunk + self.sed_layers + self.asc_layers + self.asc_dense

    def parameters(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict(
            item for layer in self.layers for item in layer.named_parameters()
        )

    def gradients(self) -> Gradients:
        return OrderedDict(
            item for layer in self.layers for item in layer.named_gradients()
        )

    def buffers(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict(
            item for layer in self.layers for item in layer.named_buffers()
        )

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters().values()))

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 3:
            x = x[np.newaxis]
        expected = (self.config.in_channels, self.config.T, self.config.M)
        if x.ndim != 4 or x.shape[1:] != expected:
            raise ShapeError(
                f"network expects input B x {' x '.join(map(str, expected))}, "
                f"got {x.shape}"
            )
        return x

    def forward(
        self, x: np.ndarray, train: bool = False
    ) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
        """runs the network on B x CH x T x M input (a single CH x T x M
        tensor is treated as a batch of one).

        Returns:
            Tuple[Optional[np.ndarray], Optional[np.ndarray]]: event
            probabilities B x T x C_SED and scene probabilities B x C_ASC;
            the missing branch of a single-task network yields None
        """
        x = self._check_input(x)
        batch = x.shape[0]
        h = x
        for layer in self.trunk:
            h = layer.forward(h, train)
        trunk_shape = h.shape

        sed_probs = asc_probs = None
        if self.mode.has_sed:
            _, filters, frames, mels = trunk_shape
            s = h.transpose(0, 2, 1, 3).reshape(batch, frames, filters * mels)
            for layer in self.sed_layers:
                s = layer.forward(s, train)
            sed_probs = sigmoid(s)
        if self.mode.has_asc:
            a = h
            for layer in self.asc_layers:
                a = layer.forward(a, train)
            pooled_shape = a.shape
            a = a.reshape(batch, -1)
            for layer in self.asc_dense:
                a = layer.forward(a, train)
            asc_probs = softmax(a, axis=-1)
        else:
            pooled_shape = None

        self._cache = (trunk_shape, pooled_shape, sed_probs, asc_probs)
        return sed_probs, asc_probs

    def backward(self, targets: TargetBatch, asc_loss_weight: float) -> Gradients:
        """analytic gradients of ``loss`` for the last forward pass.
        Sigmoid and softmax are fused with their cross-entropies; where a
        probability sits at the clamp the gradient through it is zero.

        Returns:
            Gradients: parameter name -> gradient, declaration order
        """
        if self._cache is None:
            raise RuntimeError("backward needs a cached forward pass")
        trunk_shape, pooled_shape, sed_probs, asc_probs = self._cache
        batch, filters, frames, mels = trunk_shape
        dh = np.zeros(trunk_shape)

        if self.mode.has_sed:
            mask = targets.mask[:, :, None].astype(np.float64)
            count = mask.sum() * sed_probs.shape[-1]
            inside = (sed_probs > PROB_FLOOR) & (sed_probs < 1.0 - PROB_FLOOR)
            ds = np.zeros_like(sed_probs)
            if count > 0:
                ds = (sed_probs - targets.sed) * inside * mask / count
            for layer in reversed(self.sed_layers):
                ds = layer.backward(ds)
            dh += ds.reshape(batch, frames, filters, mels).transpose(0, 2, 1, 3)

        if self.mode.has_asc:
            target_prob = (asc_probs * targets.scene).sum(axis=1)
            inside = (target_prob > PROB_FLOOR) & (target_prob < 1.0 - PROB_FLOOR)
            weight = asc_loss_weight if self.mode is Mode.MTL else 1.0
            da = weight * (asc_probs - targets.scene) * inside[:, None] / batch
            for layer in reversed(self.asc_dense):
                da = layer.backward(da)
            da = da.reshape(pooled_shape)
            for layer in reversed(self.asc_layers):
                da = layer.backward(da)
            dh += da

        for layer in reversed(self.trunk):
            dh = layer.backward(dh)
        return self.gradients()


def _clamp(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PROB_FLOOR, 1.0 - PROB_FLOOR)


def loss(
    sed_probs: Optional[np.ndarray],
    asc_probs: Optional[np.ndarray],
    targets: TargetBatch,
    asc_loss_weight: float,
) -> LossReport:
    """sed_loss is the binary cross-entropy averaged over valid frames and
    classes, asc_loss the categorical cross-entropy averaged over the
    batch, total = sed_loss + asc_loss_weight * asc_loss. A branch that is
    absent contributes zero; a single-task scene network is not down-weighted.
    """
    sed_loss = 0.0
    if sed_probs is not None:
        p = _clamp(sed_probs)
        y = targets.sed
        mask = np.broadcast_to(targets.mask[:, :, None], p.shape)
        bce = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
        if mask.any():
            sed_loss = float(bce[mask].mean())

    asc_loss = 0.0
    if asc_probs is not None:
        p = _clamp(asc_probs)
        asc_loss = float(-(targets.scene * np.log(p)).sum(axis=1).mean())

    weight = asc_loss_weight if sed_probs is not None else 1.0
    return LossReport(sed_loss, asc_loss, sed_loss + weight * asc_loss)


def forward(net: MtlNetwork, x: np.ndarray):
    """inference-mode forward pass"""
    return net.forward(x, train=False)


def backward(
    net: MtlNetwork, x: np.ndarray, targets: TargetBatch, asc_loss_weight: float
) -> Tuple[LossReport, Gradients]:
    """training-mode forward followed by the analytic backward pass"""
    sed_probs, asc_probs = net.forward(x, train=True)
    report = loss(sed_probs, asc_probs, targets, asc_loss_weight)
    return report, net.backward(targets, asc_loss_weight)


def predict(
    net: MtlNetwork, x: np.ndarray, sed_threshold: float = 0.5
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """thresholded events and arg-max scenes (ties go to the lowest index)

    Returns:
        Tuple[Optional[np.ndarray], Optional[np.ndarray]]: B x T x C_SED
        booleans and B scene indices; None for an absent branch
    """
    sed_probs, asc_probs = net.forward(x, train=False)
    sed_binary = None if sed_probs is None else sed_probs >= sed_threshold
    scene_index = None if asc_probs is None else np.argmax(asc_probs, axis=-1)
    return sed_binary, scene_index
