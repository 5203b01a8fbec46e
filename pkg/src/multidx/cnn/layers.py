"""Layer kernels and batch-aware layer classes.

Batched activations are shaped (N, H, W, C) through the conv stack and
(N, D) after Flatten. Each layer caches what its backward pass needs;
distinct layer instances share no mutable state.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

KERNEL_SIZE = 3
POOL_SIZE = 2
_OFFSETS = [(m, n) for m in range(KERNEL_SIZE) for n in range(KERNEL_SIZE)]


class ShapeError(ValueError):
    """Raised when tensor shapes do not line up."""


# ---------------------------------------------------------------------------
# Functional kernels (single-sample contracts)
# ---------------------------------------------------------------------------

def conv2d_forward(image: np.ndarray, kernels: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Same-padded 3x3 cross-correlation summed over input channels.

    image: (H, W, Cin); kernels: (3, 3, Cin, Cout); bias: (Cout,).
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3:
        raise ShapeError("image must be (H, W, Cin)")
    if kernels.shape[:2] != (KERNEL_SIZE, KERNEL_SIZE):
        raise ShapeError("kernels must be 3x3")
    if kernels.shape[2] != image.shape[2]:
        raise ShapeError(
            f"channel mismatch: image has {image.shape[2]}, kernels expect {kernels.shape[2]}"
        )
    out = _batch_conv_forward(image[None, ...], kernels, bias)[1]
    return out[0]


def relu(t: np.ndarray) -> np.ndarray:
    """Elementwise max(0, x)."""
    return np.maximum(np.asarray(t, dtype=np.float64), 0.0)


def maxpool(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """2x2/stride-2 window maxima over (H, W, C); returns (pooled, argmax).

    Odd edges are padded with -inf. The argmax index (0..3) is the first
    maximum in row-major window order and is what backprop routes through.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise ShapeError("maxpool expects (H, W, C)")
    pooled, argmax = _batch_pool_forward(t[None, ...])
    return pooled[0], argmax[0]


def softmax(z: np.ndarray) -> np.ndarray:
    """Max-subtracted stable softmax along the last axis."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, true_class: int) -> float:
    """-ln of the probability assigned to the true class, clamped at 1e-12."""
    p = float(np.asarray(probs, dtype=np.float64)[true_class])
    return -float(np.log(max(p, 1e-12)))


# ---------------------------------------------------------------------------
# Batched conv / pool internals
# ---------------------------------------------------------------------------

def _batch_conv_forward(x, kernels, bias):
    n, h, w, cin = x.shape
    cout = kernels.shape[3]
    padded = np.zeros((n, h + 2, w + 2, cin))
    padded[:, 1:-1, 1:-1, :] = x
    cols = np.empty((n, h, w, KERNEL_SIZE * KERNEL_SIZE, cin))
    for idx, (m, nn) in enumerate(_OFFSETS):
        cols[:, :, :, idx, :] = padded[:, m : m + h, nn : nn + w, :]
    cols = cols.reshape(n, h, w, KERNEL_SIZE * KERNEL_SIZE * cin)
    out = cols @ kernels.reshape(-1, cout) + bias
    return cols, out


def _batch_conv_backward(cols, x_shape, kernels, grad_out):
    n, h, w, cin = x_shape
    cout = kernels.shape[3]
    flat_cols = cols.reshape(-1, KERNEL_SIZE * KERNEL_SIZE * cin)
    flat_grad = grad_out.reshape(-1, cout)
    grad_kernels = (flat_cols.T @ flat_grad).reshape(kernels.shape)
    grad_bias = flat_grad.sum(axis=0)
    grad_cols = (flat_grad @ kernels.reshape(-1, cout).T).reshape(
        n, h, w, KERNEL_SIZE * KERNEL_SIZE, cin
    )
    grad_padded = np.zeros((n, h + 2, w + 2, cin))
    for idx, (m, nn) in enumerate(_OFFSETS):
        grad_padded[:, m : m + h, nn : nn + w, :] += grad_cols[:, :, :, idx, :]
    return grad_padded[:, 1:-1, 1:-1, :], grad_kernels, grad_bias


def _batch_pool_forward(x):
    n, h, w, c = x.shape
    oh, ow = (h + 1) // 2, (w + 1) // 2
    padded = np.full((n, oh * 2, ow * 2, c), -np.inf)
    padded[:, :h, :w, :] = x
    windows = np.stack(
        [
            padded[:, 0::2, 0::2, :],
            padded[:, 0::2, 1::2, :],
            padded[:, 1::2, 0::2, :],
            padded[:, 1::2, 1::2, :],
        ],
        axis=-1,
    )  # (..., 4) in row-major window order; argmax takes the first max
    argmax = windows.argmax(axis=-1)
    pooled = np.take_along_axis(windows, argmax[..., None], axis=-1)[..., 0]
    return pooled, argmax


def _batch_pool_backward(argmax, x_shape, grad_out):
    n, h, w, c = x_shape
    oh, ow = grad_out.shape[1], grad_out.shape[2]
    grad_padded = np.zeros((n, oh * 2, ow * 2, c))
    for slot, (dy, dx) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        mask = argmax == slot
        grad_padded[:, dy::2, dx::2, :] += np.where(mask, grad_out, 0.0)
    return grad_padded[:, :h, :w, :]


# ---------------------------------------------------------------------------
# Layer classes
# ---------------------------------------------------------------------------

class Layer:
    """Forward/backward node with optional trainable parameters."""

    def params(self) -> List[np.ndarray]:
        return []

    def grads(self) -> List[np.ndarray]:
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def output_shape(self, input_shape: Tuple[int, ...]) -> Tuple[int, ...]:
        raise NotImplementedError


class Conv2D(Layer):
    """3x3 stride-1 same-padding convolution (cross-correlation form)."""

    def __init__(self, in_channels: int, filters: int, rng: np.random.Generator):
        fan_in = KERNEL_SIZE * KERNEL_SIZE * in_channels
        scale = np.sqrt(2.0 / fan_in)
        self.kernels = rng.normal(0.0, scale, size=(KERNEL_SIZE, KERNEL_SIZE, in_channels, filters))
        self.bias = np.zeros(filters)
        self.grad_kernels = np.zeros_like(self.kernels)
        self.grad_bias = np.zeros_like(self.bias)
        self._cache: Optional[Tuple[np.ndarray, Tuple[int, ...]]] = None

    def params(self):
        return [self.kernels, self.bias]

    def grads(self):
        return [self.grad_kernels, self.grad_bias]

    def forward(self, x):
        if x.shape[3] != self.kernels.shape[2]:
            raise ShapeError(
                f"channel mismatch: input has {x.shape[3]}, layer expects {self.kernels.shape[2]}"
            )
        cols, out = _batch_conv_forward(x, self.kernels, self.bias)
        self._cache = (cols, x.shape)
        return out

    def backward(self, grad):
        cols, x_shape = self._cache
        grad_x, gk, gb = _batch_conv_backward(cols, x_shape, self.kernels, grad)
        self.grad_kernels[...] = gk
        self.grad_bias[...] = gb
        return grad_x

    def output_shape(self, input_shape):
        h, w, c = input_shape
        if c != self.kernels.shape[2]:
            raise ShapeError("channel mismatch in shape algebra")
        return (h, w, self.kernels.shape[3])


class ReLU(Layer):
    def __init__(self):
        self._mask: Optional[np.ndarray] = None

    def forward(self, x):
        self._mask = x > 0.0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad):
        return np.where(self._mask, grad, 0.0)

    def output_shape(self, input_shape):
        return input_shape


class MaxPool2D(Layer):
    def __init__(self):
        self._cache: Optional[Tuple[np.ndarray, Tuple[int, ...]]] = None

    def forward(self, x):
        pooled, argmax = _batch_pool_forward(x)
        self._cache = (argmax, x.shape)
        return pooled

    def backward(self, grad):
        argmax, x_shape = self._cache
        return _batch_pool_backward(argmax, x_shape, grad)

    def output_shape(self, input_shape):
        h, w, c = input_shape
        return ((h + 1) // 2, (w + 1) // 2, c)


class Flatten(Layer):
    def __init__(self):
        self._shape: Optional[Tuple[int, ...]] = None

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)

    def output_shape(self, input_shape):
        prod = 1
        for d in input_shape:
            prod *= d
        return (prod,)


class Dense(Layer):
    def __init__(self, in_features: int, units: int, rng: np.random.Generator):
        scale = np.sqrt(2.0 / in_features)
        self.weights = rng.normal(0.0, scale, size=(in_features, units))
        self.bias = np.zeros(units)
        self.grad_weights = np.zeros_like(self.weights)
        self.grad_bias = np.zeros_like(self.bias)
        self._x: Optional[np.ndarray] = None

    def params(self):
        return [self.weights, self.bias]

    def grads(self):
        return [self.grad_weights, self.grad_bias]

    def forward(self, x):
        if x.shape[1] != self.weights.shape[0]:
            raise ShapeError(
                f"width mismatch: input has {x.shape[1]}, layer expects {self.weights.shape[0]}"
            )
        self._x = x
        return x @ self.weights + self.bias

    def backward(self, grad):
        self.grad_weights[...] = self._x.T @ grad
        self.grad_bias[...] = grad.sum(axis=0)
        return grad @ self.weights.T

    def output_shape(self, input_shape):
        return (self.weights.shape[1],)


class Softmax(Layer):
    def __init__(self):
        self._out: Optional[np.ndarray] = None

    def forward(self, x):
        self._out = softmax(x)
        return self._out

    def backward(self, grad):
        s = self._out
        dot = np.sum(grad * s, axis=-1, keepdims=True)
        return s * (grad - dot)

    def output_shape(self, input_shape):
        return input_shape
