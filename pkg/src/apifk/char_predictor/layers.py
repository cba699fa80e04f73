"""Network layers with hand-written forward and backward passes.

Temporal convolution follows h(y) = sum_x f(x) * g(y*d - x + c) with offset
c = k - d + 1: in 0-based terms output position y reads the input window
[y*d, y*d + k) against the kernel reversed. Max-pooling uses the same window
set. Layers are stateless per call: forward returns (output, cache) and
backward consumes the cache, so a trained model can serve concurrent
inference requests with shared immutable weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ShapeError(ValueError):
    """Input length or feature count does not fit the layer."""


def pooled_length(length: int, k: int, d: int) -> int:
    """floor((l - k)/d) + 1, the shared conv/pool output-length rule."""
    if length < k:
        raise ShapeError(f"input length {length} shorter than window {k}")
    return (length - k) // d + 1


def _windows(g: np.ndarray, k: int, d: int) -> np.ndarray:
    """Strided view (batch, features, out_len, k) of every stride-d window."""
    return sliding_window_view(g, k, axis=2)[:, :, ::d, :]


class Layer:
    """Interface: forward(x, rng, train) -> (y, cache); backward(dy, cache) -> dx."""

    params: list[tuple[str, np.ndarray]] = []
    grads: dict[str, np.ndarray] = {}

    def forward(self, x, rng=None, train=False):
        raise NotImplementedError

    def backward(self, dy, cache):
        raise NotImplementedError


class Conv1d(Layer):
    def __init__(self, in_features: int, out_features: int, kernel: int, stride: int = 1):
        if kernel < 1 or stride < 1:
            raise ValueError("kernel and stride must be >= 1")
        self.in_features = in_features
        self.out_features = out_features
        self.kernel = kernel
        self.stride = stride
        # weight[j, i, x] = f_ij(x+1) in the formula's 1-based kernel indexing
        self.weight = np.zeros((out_features, in_features, kernel), dtype=np.float64)
        self.bias = np.zeros(out_features, dtype=np.float64)
        self.grads = {}

    @property
    def params(self):
        return [("weight", self.weight), ("bias", self.bias)]

    def out_length(self, length: int) -> int:
        return pooled_length(length, self.kernel, self.stride)

    def forward(self, x: np.ndarray, rng=None, train=False):
        batch, feats, length = x.shape
        if feats != self.in_features:
            raise ShapeError(f"expected {self.in_features} input features, got {feats}")
        lout = self.out_length(length)
        k = self.kernel
        # window order is ascending input position, so flip the kernel axis
        wf = self.weight[:, :, ::-1].reshape(self.out_features, self.in_features * k)
        cols = (
            _windows(x, k, self.stride)
            .transpose(0, 1, 3, 2)
            .reshape(batch, self.in_features * k, lout)
        )
        out = np.matmul(wf, cols) + self.bias[None, :, None]
        return out, (x.shape, cols)

    def backward(self, dy: np.ndarray, cache):
        x_shape, cols = cache
        batch, _, lout = dy.shape
        k, d = self.kernel, self.stride
        dwf = np.tensordot(dy, cols, axes=([0, 2], [0, 2]))
        dwf = dwf.reshape(self.out_features, self.in_features, k)
        self.grads = {"weight": dwf[:, :, ::-1].copy(), "bias": dy.sum(axis=(0, 2))}
        wf = self.weight[:, :, ::-1]
        dx = np.zeros(x_shape, dtype=np.float64)
        for t in range(k):
            # all windows contribute to input position y*d + t
            dx[:, :, t : t + d * lout : d] += np.matmul(wf[:, :, t].T, dy)
        return dx


class MaxPool1d(Layer):
    def __init__(self, size: int):
        if size < 1:
            raise ValueError("pool size must be >= 1")
        self.size = size  # pool stride equals pool size

    def out_length(self, length: int) -> int:
        return pooled_length(length, self.size, self.size)

    def forward(self, x: np.ndarray, rng=None, train=False):
        self.out_length(x.shape[2])  # raises ShapeError on too-short input
        windows = _windows(x, self.size, self.size)
        arg = windows.argmax(axis=3)  # first max wins ties
        out = np.take_along_axis(windows, arg[..., None], axis=3)[..., 0]
        return out, (x.shape, arg)

    def backward(self, dy: np.ndarray, cache):
        x_shape, arg = cache
        dx = np.zeros(x_shape, dtype=np.float64)
        batch, feats, lout = dy.shape
        b, f, y = np.ogrid[:batch, :feats, :lout]
        np.add.at(dx, (b, f, y * self.size + arg), dy)
        return dx


class ReLU(Layer):
    def forward(self, x: np.ndarray, rng=None, train=False):
        mask = x > 0
        return x * mask, mask

    def backward(self, dy: np.ndarray, mask):
        return dy * mask


class Flatten(Layer):
    def forward(self, x: np.ndarray, rng=None, train=False):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, dy: np.ndarray, shape):
        return dy.reshape(shape)


class Dense(Layer):
    def __init__(self, in_features: int, out_features: int):
        self.in_features = in_features
        self.out_features = out_features
        self.weight = np.zeros((out_features, in_features), dtype=np.float64)
        self.bias = np.zeros(out_features, dtype=np.float64)
        self.grads = {}

    @property
    def params(self):
        return [("weight", self.weight), ("bias", self.bias)]

    def forward(self, x: np.ndarray, rng=None, train=False):
        if x.shape[1] != self.in_features:
            raise ShapeError(f"expected {self.in_features} inputs, got {x.shape[1]}")
        return x @ self.weight.T + self.bias, x

    def backward(self, dy: np.ndarray, x):
        self.grads = {"weight": dy.T @ x, "bias": dy.sum(axis=0)}
        return dy @ self.weight


class Dropout(Layer):
    """Inverted dropout: scaling happens at train time, eval is a no-op."""

    def __init__(self, p: float = 0.5):
        if not 0 <= p < 1:
            raise ValueError("dropout probability must be in [0, 1)")
        self.p = p

    def forward(self, x: np.ndarray, rng=None, train=False):
        if not train or self.p == 0:
            return x, None
        if rng is None:
            raise ValueError("train-mode dropout needs an rng")
        mask = (rng.random(x.shape) >= self.p) / (1.0 - self.p)
        return x * mask, mask

    def backward(self, dy: np.ndarray, mask):
        return dy if mask is None else dy * mask
