"""Layers with hand-written backward passes.

Each layer keeps named ``params`` and matching ``grads``; ``forward``
caches what ``backward`` needs, so a layer instance serves one forward /
backward pair at a time. Activations are batch-first: conv maps are
B x C x T x M, sequences B x T x F.
"""
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..exception.exceptions import InvalidConfigError, ShapeError

BN_EPS = 1e-5
BN_MOMENTUM = 0.9

_POOL_AXES = {"mel": -1, "time": -2}


def glorot_uniform(
    rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def sigmoid(x: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(x, dtype=np.float64)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    expx = np.exp(x[~positive])
    out[~positive] = expx / (1.0 + expx)
    return out


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = np.exp(x - x.max(axis=axis, keepdims=True))
    return shifted / shifted.sum(axis=axis, keepdims=True)


def _same_padding(kh: int, kw: int):
    return ((kh - 1) // 2, kh // 2), ((kw - 1) // 2, kw // 2)


def _batched(x: np.ndarray, ndim: int):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == ndim - 1:
        return x[np.newaxis], True
    if x.ndim != ndim:
        raise ShapeError(f"expected {ndim - 1} or {ndim} dimensions, got {x.shape}")
    return x, False


def conv2d_forward(
    x: np.ndarray, weight: np.ndarray, bias: np.ndarray
) -> np.ndarray:
    """'same'-padded 2D cross-correlation with bias.

    Args:
        x (np.ndarray): C x T x M or B x C x T x M input
        weight (np.ndarray): P x C x kh x kw filters
        bias (np.ndarray): P biases

    Raises:
        ShapeError: raised if input channels and filter depth differ

    Returns:
        np.ndarray: P x T x M (or B x P x T x M)
    """
    x, squeeze = _batched(x, 4)
    batch, channels, frames, mels = x.shape
    filters, depth, kh, kw = weight.shape
    if depth != channels:
        raise ShapeError(f"input has {channels} channels, filters expect {depth}")
    (top, bottom), (left, right) = _same_padding(kh, kw)
    xp = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)))

    out = np.zeros((filters, batch, frames, mels))
    for i in range(kh):
        for j in range(kw):
            patch = xp[:, :, i : i + frames, j : j + mels]
            out += np.tensordot(weight[:, :, i, j], patch, axes=([1], [1]))
    out = out.transpose(1, 0, 2, 3) + bias[None, :, None, None]
    return out[0] if squeeze else out


def conv2d_backward(
    grad: np.ndarray, x: np.ndarray, weight: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """returns (dx, dweight, dbias) for conv2d_forward on batched input"""
    batch, channels, frames, mels = x.shape
    _, _, kh, kw = weight.shape
    (top, bottom), (left, right) = _same_padding(kh, kw)
    xp = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)))

    dweight = np.zeros_like(weight)
    dxp = np.zeros_like(xp)
    for i in range(kh):
        for j in range(kw):
            patch = xp[:, :, i : i + frames, j : j + mels]
            dweight[:, :, i, j] = np.tensordot(
                grad, patch, axes=([0, 2, 3], [0, 2, 3])
            )
            dxp[:, :, i : i + frames, j : j + mels] += np.tensordot(
                grad, weight[:, :, i, j], axes=([1], [0])
            ).transpose(0, 3, 1, 2)
    dbias = grad.sum(axis=(0, 2, 3))
    dx = dxp[:, :, top : top + frames, left : left + mels]
    return dx, dweight, dbias


def batchnorm_forward(
    x: np.ndarray,
    gamma: np.ndarray,
    beta: np.ndarray,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    train: bool = True,
    momentum: float = BN_MOMENTUM,
    eps: float = BN_EPS,
):
    """per-filter-map normalisation. In train mode the batch statistics
    are used and the running statistics are updated in place with
    ``running = momentum * running + (1 - momentum) * batch``; in eval mode
    the running statistics are used.

    Returns:
        Tuple[np.ndarray, tuple]: output and the cache for backward
    """
    x, squeeze = _batched(x, 4)
    axes = (0, 2, 3)
    if train:
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        running_mean *= momentum
        running_mean += (1.0 - momentum) * mean
        running_var *= momentum
        running_var += (1.0 - momentum) * var
    else:
        mean, var = running_mean, running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
    out = gamma[None, :, None, None] * xhat + beta[None, :, None, None]
    cache = (xhat, inv_std, train)
    return (out[0] if squeeze else out), cache


def batchnorm_backward(grad: np.ndarray, gamma: np.ndarray, cache):
    xhat, inv_std, train = cache
    axes = (0, 2, 3)
    dgamma = (grad * xhat).sum(axis=axes)
    dbeta = grad.sum(axis=axes)
    dxhat = grad * gamma[None, :, None, None]
    scale = inv_std[None, :, None, None]
    if not train:
        return dxhat * scale, dgamma, dbeta
    count = grad.shape[0] * grad.shape[2] * grad.shape[3]
    dx = (
        scale
        / count
        * (
            count * dxhat
            - dxhat.sum(axis=axes)[None, :, None, None]
            - xhat * (dxhat * xhat).sum(axis=axes)[None, :, None, None]
        )
    )
    return dx, dgamma, dbeta


def _pool_axis(axis: Union[str, int]) -> int:
    if isinstance(axis, str):
        if axis not in _POOL_AXES:
            raise InvalidConfigError(f"pool axis must be mel or time, got {axis}")
        return _POOL_AXES[axis]
    return int(axis)


def maxpool_forward(
    x: np.ndarray, axis: Union[str, int], factor: int
) -> Tuple[np.ndarray, np.ndarray]:
    """non-overlapping max over windows of ``factor`` along ``axis``
    ("mel" is the last axis, "time" the one before it). Ties go to the
    first element of a window.

    Raises:
        ShapeError: raised if the axis length is not a multiple of factor

    Returns:
        Tuple[np.ndarray, np.ndarray]: pooled values and winner indices
    """
    axis = _pool_axis(axis)
    x = np.asarray(x, dtype=np.float64)
    length = x.shape[axis]
    if factor < 1 or length % factor:
        raise ShapeError(f"axis of length {length} is not divisible by {factor}")
    moved = np.moveaxis(x, axis, -1)
    windows = moved.reshape(*moved.shape[:-1], length // factor, factor)
    winners = windows.argmax(axis=-1)
    pooled = np.take_along_axis(windows, winners[..., None], axis=-1)[..., 0]
    return np.moveaxis(pooled, -1, axis), winners


def maxpool_backward(
    grad: np.ndarray, winners: np.ndarray, axis: Union[str, int], factor: int
) -> np.ndarray:
    axis = _pool_axis(axis)
    moved = np.moveaxis(grad, axis, -1)
    windows = np.zeros(moved.shape + (factor,))
    np.put_along_axis(windows, winners[..., None], moved[..., None], axis=-1)
    dx = windows.reshape(*moved.shape[:-1], moved.shape[-1] * factor)
    return np.moveaxis(dx, -1, axis)


def gru_forward(x: np.ndarray, wx: np.ndarray, u: np.ndarray, b: np.ndarray):
    """one GRU direction over B x T x F input.

    Gates are packed as [update z | reset r | candidate]:
        z = sigmoid(x Wz + h Uz + bz)
        r = sigmoid(x Wr + h Ur + br)
        c = tanh(x Wc + (r * h) Uc + bc)
        h' = (1 - z) * h + z * c
    with a zero initial state.
    """
    batch, frames, _ = x.shape
    hidden = u.shape[0]
    pre_x = x @ wx + b
    u_zr, u_c = u[:, : 2 * hidden], u[:, 2 * hidden :]

    h = np.zeros((batch, hidden))
    states = np.zeros((batch, frames, hidden))
    gates = np.zeros((batch, frames, 3 * hidden))
    previous = np.zeros((batch, frames, hidden))
    for t in range(frames):
        hu = h @ u_zr
        z = sigmoid(pre_x[:, t, :hidden] + hu[:, :hidden])
        r = sigmoid(pre_x[:, t, hidden : 2 * hidden] + hu[:, hidden:])
        c = np.tanh(pre_x[:, t, 2 * hidden :] + (r * h) @ u_c)
        previous[:, t] = h
        h = (1.0 - z) * h + z * c
        states[:, t] = h
        gates[:, t] = np.concatenate([z, r, c], axis=1)
    return states, (x, gates, previous)


def gru_backward(dstates: np.ndarray, wx: np.ndarray, u: np.ndarray, cache):
    """backpropagation through time for gru_forward; returns
    (dx, dwx, du, db)"""
    x, gates, previous = cache
    batch, frames, features = x.shape
    hidden = u.shape[0]
    u_zr, u_c = u[:, : 2 * hidden], u[:, 2 * hidden :]

    dpre = np.zeros((batch, frames, 3 * hidden))
    du = np.zeros_like(u)
    dh_next = np.zeros((batch, hidden))
    for t in range(frames - 1, -1, -1):
        dh = dstates[:, t] + dh_next
        z = gates[:, t, :hidden]
        r = gates[:, t, hidden : 2 * hidden]
        c = gates[:, t, 2 * hidden :]
        h_prev = previous[:, t]

        dc = dh * z * (1.0 - c * c)
        dz = dh * (c - h_prev) * z * (1.0 - z)
        dh_prev = dh * (1.0 - z)

        du[:, 2 * hidden :] += (r * h_prev).T @ dc
        drh = dc @ u_c.T
        dr = drh * h_prev * r * (1.0 - r)
        dh_prev += drh * r

        dzr = np.concatenate([dz, dr], axis=1)
        du[:, : 2 * hidden] += h_prev.T @ dzr
        dh_prev += dzr @ u_zr.T

        dpre[:, t] = np.concatenate([dz, dr, dc], axis=1)
        dh_next = dh_prev

    flat = dpre.reshape(-1, 3 * hidden)
    dwx = x.reshape(-1, features).T @ flat
    db = flat.sum(axis=0)
    dx = dpre @ wx.T
    return dx, dwx, du, db


class Layer:
    """base class: named parameters, their gradients and optional
    non-trainable buffers"""

    def __init__(self, name: str):
        self.name = name
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.buffers: Dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray, train: bool = True) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def named_parameters(self):
        for key, value in self.params.items():
            yield f"{self.name}.{key}", value

    def named_gradients(self):
        for key in self.params:
            yield f"{self.name}.{key}", self.grads.get(key)

    def named_buffers(self):
        for key, value in self.buffers.items():
            yield f"{self.name}.{key}", value


class Conv2D(Layer):
    def __init__(self, name, in_channels, filters, kernel, rng):
        super().__init__(name)
        kh, kw = kernel
        self.params["weight"] = glorot_uniform(
            rng, (filters, in_channels, kh, kw), in_channels * kh * kw, filters * kh * kw
        )
        self.params["bias"] = np.zeros(filters)

    def forward(self, x, train=True):
        self._x = x
        return conv2d_forward(x, self.params["weight"], self.params["bias"])

    def backward(self, grad):
        dx, self.grads["weight"], self.grads["bias"] = conv2d_backward(
            grad, self._x, self.params["weight"]
        )
        return dx


class BatchNorm(Layer):
    def __init__(self, name, channels):
        super().__init__(name)
        self.params["gamma"] = np.ones(channels)
        self.params["beta"] = np.zeros(channels)
        self.buffers["running_mean"] = np.zeros(channels)
        self.buffers["running_var"] = np.ones(channels)

    def forward(self, x, train=True):
        out, self._cache = batchnorm_forward(
            x,
            self.params["gamma"],
            self.params["beta"],
            self.buffers["running_mean"],
            self.buffers["running_var"],
            train,
        )
        return out

    def backward(self, grad):
        dx, self.grads["gamma"], self.grads["beta"] = batchnorm_backward(
            grad, self.params["gamma"], self._cache
        )
        return dx


class ReLU(Layer):
    def forward(self, x, train=True):
        self._active = x > 0
        return np.where(self._active, x, 0.0)

    def backward(self, grad):
        return grad * self._active


class MaxPool(Layer):
    def __init__(self, name, axis, factor):
        super().__init__(name)
        self.axis = axis
        self.factor = factor

    def forward(self, x, train=True):
        out, self._winners = maxpool_forward(x, self.axis, self.factor)
        return out

    def backward(self, grad):
        return maxpool_backward(grad, self._winners, self.axis, self.factor)


class Dense(Layer):
    """time-distributed affine map over the last axis"""

    def __init__(self, name, in_features, out_features, rng):
        super().__init__(name)
        self.params["weight"] = glorot_uniform(
            rng, (in_features, out_features), in_features, out_features
        )
        self.params["bias"] = np.zeros(out_features)

    def forward(self, x, train=True):
        self._x = x
        return x @ self.params["weight"] + self.params["bias"]

    def backward(self, grad):
        weight = self.params["weight"]
        flat_x = self._x.reshape(-1, weight.shape[0])
        flat_grad = grad.reshape(-1, weight.shape[1])
        self.grads["weight"] = flat_x.T @ flat_grad
        self.grads["bias"] = flat_grad.sum(axis=0)
        return grad @ weight.T


class BiGRU(Layer):
    """bidirectional GRU; each direction has Q/2 units and the outputs are
    concatenated [forward | backward] to width Q"""

    def __init__(self, name, in_features, width, rng):
        super().__init__(name)
        if width % 2:
            raise InvalidConfigError(f"GRU width Q={width} must be even")
        hidden = width // 2
        for direction in ("fw", "bw"):
            self.params[f"{direction}_wx"] = glorot_uniform(
                rng, (in_features, 3 * hidden), in_features, 3 * hidden
            )
            self.params[f"{direction}_u"] = glorot_uniform(
                rng, (hidden, 3 * hidden), hidden, 3 * hidden
            )
            self.params[f"{direction}_b"] = np.zeros(3 * hidden)

    def forward(self, x, train=True):
        p = self.params
        fw, self._fw_cache = gru_forward(x, p["fw_wx"], p["fw_u"], p["fw_b"])
        bw, self._bw_cache = gru_forward(
            x[:, ::-1], p["bw_wx"], p["bw_u"], p["bw_b"]
        )
        return np.concatenate([fw, bw[:, ::-1]], axis=-1)

    def backward(self, grad):
        p = self.params
        hidden = p["fw_u"].shape[0]
        dx_fw, *fw_grads = gru_backward(
            grad[..., :hidden], p["fw_wx"], p["fw_u"], self._fw_cache
        )
        dx_bw, *bw_grads = gru_backward(
            grad[:, ::-1, hidden:], p["bw_wx"], p["bw_u"], self._bw_cache
        )
        for direction, values in (("fw", fw_grads), ("bw", bw_grads)):
            for key, value in zip(("wx", "u", "b"), values):
                self.grads[f"{direction}_{key}"] = value
        return dx_fw + dx_bw[:, ::-1]


def bigru_forward(x: np.ndarray, layer: BiGRU) -> np.ndarray:
    """runs a BiGRU on T x F (or B x T x F) input, returning T x Q"""
    x, squeeze = _batched(x, 3)
    out = layer.forward(x, train=False)
    return out[0] if squeeze else out


class Sequential(Layer):
    def __init__(self, name: str, *layers: Layer):
        super().__init__(name)
        self.layers = list(layers)

    def forward(self, x, train=True):
        for layer in self.layers:
            x = layer.forward(x, train)
        return x

    def backward(self, grad):
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def named_parameters(self):
        for layer in self.layers:
            yield from layer.named_parameters()

    def named_gradients(self):
        for layer in self.layers:
            yield from layer.named_gradients()

    def named_buffers(self):
        for layer in self.layers:
            yield from layer.named_buffers()


def conv_block(
    name: str,
    in_channels: int,
    filters: int,
    kernel,
    pool_axis: str,
    pool_factor: int,
    rng: np.random.Generator,
    index: Optional[int] = None,
) -> Sequential:
    """conv -> batch-norm -> ReLU -> max-pool"""
    suffix = "" if index is None else str(index)
    return Sequential(
        f"{name}{suffix}_block",
        Conv2D(f"{name}{suffix}", in_channels, filters, kernel, rng),
        BatchNorm(f"{name.replace('conv', 'bn')}{suffix}", filters),
        ReLU(f"{name}{suffix}_relu"),
        MaxPool(f"{name}{suffix}_pool", pool_axis, pool_factor),
    )
