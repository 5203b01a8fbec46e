"""CNN model container, Adam optimizer and the training loop.

A network is described by an ordered LayerSpec list; building a model
allocates seeded parameters for it. Shape algebra runs on the specs
alone, so large topologies can be checked without allocating weights.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..tabular import DataError, SplitSpec, split_indices
from .layers import Conv2D, Dense, Flatten, Layer, MaxPool2D, ReLU, ShapeError, Softmax

LOSS_CLAMP = 1e-12

LAYER_KINDS = ("conv", "relu", "maxpool", "flatten", "dense", "softmax")


@dataclass(frozen=True)
class LayerSpec:
    """One layer descriptor: conv carries filters, dense carries units.

    Convolutions are fixed 3x3/stride-1/same; pools fixed 2x2/stride-2.
    """

    kind: str
    size: int = 0

    def __post_init__(self) -> None:
        if self.kind not in LAYER_KINDS:
            raise DataError(f"unknown layer kind {self.kind!r}")
        if self.kind in ("conv", "dense") and self.size < 1:
            raise DataError(f"{self.kind} layer needs a positive size")


def spec_output_shape(spec: LayerSpec, shape: Tuple[int, ...]) -> Tuple[int, ...]:
    """Shape algebra for one layer: conv preserves HxW, pool ceil-halves."""
    if spec.kind == "conv":
        h, w, _ = shape
        return (h, w, spec.size)
    if spec.kind == "maxpool":
        h, w, c = shape
        return ((h + 1) // 2, (w + 1) // 2, c)
    if spec.kind == "flatten":
        prod = 1
        for d in shape:
            prod *= d
        return (prod,)
    if spec.kind == "dense":
        return (spec.size,)
    return shape  # relu, softmax


def topology_output_shape(
    specs: Sequence[LayerSpec], input_shape: Tuple[int, int, int]
) -> Tuple[int, ...]:
    shape: Tuple[int, ...] = tuple(input_shape)
    for spec in specs:
        shape = spec_output_shape(spec, shape)
    return shape


@dataclass(frozen=True)
class TrainConfig:
    """Adam hyperparameters and loop controls."""

    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = 25
    batch_size: int = 16
    seed: int = 0
    train_fraction: float = 0.7
    validation_fraction: float = 0.2


@dataclass
class TrainHistory:
    """Per-epoch loss/accuracy curves."""

    epochs: List[int] = field(default_factory=list)
    train_loss: List[float] = field(default_factory=list)
    train_acc: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    val_acc: List[float] = field(default_factory=list)

    def append(self, epoch, tl, ta, vl, va):
        self.epochs.append(epoch)
        self.train_loss.append(tl)
        self.train_acc.append(ta)
        self.val_loss.append(vl)
        self.val_acc.append(va)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["epoch", "train_loss", "train_acc", "val_loss", "val_acc"])
        for row in zip(self.epochs, self.train_loss, self.train_acc, self.val_loss, self.val_acc):
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()


class CnnModel:
    """LayerSpec list plus allocated parameters, ending in Softmax."""

    def __init__(
        self,
        specs: Sequence[LayerSpec],
        class_count: int,
        input_shape: Tuple[int, int, int],
        seed: int = 0,
    ):
        if specs[-1].kind != "softmax":
            raise DataError("final layer must be softmax")
        out = topology_output_shape(specs, input_shape)
        if out != (class_count,):
            raise DataError(f"network emits shape {out}, expected ({class_count},)")
        self.specs = tuple(specs)
        self.class_count = class_count
        self.input_shape = tuple(input_shape)
        self.seed = seed
        self.layers = self._build(np.random.default_rng(seed))

    def _build(self, rng: np.random.Generator) -> List[Layer]:
        layers: List[Layer] = []
        shape: Tuple[int, ...] = self.input_shape
        for spec in self.specs:
            if spec.kind == "conv":
                layers.append(Conv2D(shape[2], spec.size, rng))
            elif spec.kind == "relu":
                layers.append(ReLU())
            elif spec.kind == "maxpool":
                layers.append(MaxPool2D())
            elif spec.kind == "flatten":
                layers.append(Flatten())
            elif spec.kind == "dense":
                layers.append(Dense(shape[0], spec.size, rng))
            elif spec.kind == "softmax":
                layers.append(Softmax())
            shape = spec_output_shape(spec, shape)
        return layers

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[1:] != self.input_shape:
            raise ShapeError(
                f"batch shape {x.shape[1:]} does not match input shape {self.input_shape}"
            )
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.forward(np.asarray(x, dtype=np.float64))

    def predict_label(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(x), axis=1)

    def params(self) -> List[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def grads(self) -> List[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def snapshot(self) -> List[np.ndarray]:
        return [p.copy() for p in self.params()]

    def restore(self, snapshot: List[np.ndarray]) -> None:
        for p, saved in zip(self.params(), snapshot):
            p[...] = saved


def batch_loss_and_grad(
    model: CnnModel, probs: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Mean clamped cross-entropy over the batch plus dL/dprobs."""
    n = probs.shape[0]
    idx = np.arange(n)
    p_true = probs[idx, labels]
    loss = float(np.mean(-np.log(np.maximum(p_true, LOSS_CLAMP))))
    grad = np.zeros_like(probs)
    live = p_true > LOSS_CLAMP  # clamped samples contribute no gradient
    grad[idx[live], labels[live]] = -1.0 / (n * p_true[live])
    return loss, grad


class AdamState:
    """Adam moments with bias correction, one slot per parameter array."""

    def __init__(self, model: CnnModel, config: TrainConfig):
        self.config = config
        self.m = [np.zeros_like(p) for p in model.params()]
        self.v = [np.zeros_like(p) for p in model.params()]
        self.t = 0

    def step(self, model: CnnModel) -> None:
        c = self.config
        self.t += 1
        for p, g, m, v in zip(model.params(), model.grads(), self.m, self.v):
            m[...] = c.beta1 * m + (1.0 - c.beta1) * g
            v[...] = c.beta2 * v + (1.0 - c.beta2) * g * g
            m_hat = m / (1.0 - c.beta1**self.t)
            v_hat = v / (1.0 - c.beta2**self.t)
            p -= c.learning_rate * m_hat / (np.sqrt(v_hat) + c.epsilon)


def backward_and_step(
    model: CnnModel, batch: np.ndarray, labels: np.ndarray, adam: AdamState
) -> float:
    """One optimization step: forward, backprop, Adam update (in place).

    Returns the pre-update batch loss.
    """
    probs = model.forward(np.asarray(batch, dtype=np.float64))
    loss, grad = batch_loss_and_grad(model, probs, np.asarray(labels))
    for layer in reversed(model.layers):
        grad = layer.backward(grad)
    adam.step(model)
    return loss


def evaluate(
    model: CnnModel, x: np.ndarray, labels: np.ndarray, batch_size: int = 64
) -> Tuple[float, float]:
    """(mean loss, accuracy) over a dataset, batched to bound memory."""
    losses: List[float] = []
    correct = 0
    for start in range(0, x.shape[0], batch_size):
        xb = x[start : start + batch_size]
        yb = labels[start : start + batch_size]
        probs = model.forward(np.asarray(xb, dtype=np.float64))
        p_true = probs[np.arange(len(yb)), yb]
        losses.extend((-np.log(np.maximum(p_true, LOSS_CLAMP))).tolist())
        correct += int((np.argmax(probs, axis=1) == yb).sum())
    return float(np.mean(losses)), correct / x.shape[0]


def train(
    model: CnnModel,
    images: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
) -> Tuple[CnnModel, TrainHistory]:
    """Train with seeded shuffling and a stratified 70:20:10 internal split.

    Parameters with the best validation accuracy seen across epochs are
    restored at the end. epochs=0 returns the model untouched.
    """
    images = np.asarray(images, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if np.unique(labels).size < 2:
        raise DataError("degenerate labels: need at least two classes")
    history = TrainHistory()
    if config.epochs == 0:
        return model, history

    spec = SplitSpec(
        train_fraction=config.train_fraction,
        validation_fraction=config.validation_fraction,
        seed=config.seed,
        stratified=True,
    )
    train_idx, val_idx, _ = split_indices(labels, labels.size, spec)
    x_train, y_train = images[train_idx], labels[train_idx]
    x_val = images[val_idx] if val_idx is not None else None
    y_val = labels[val_idx] if val_idx is not None else None

    adam = AdamState(model, config)
    rng = np.random.default_rng(config.seed)
    best_val = -1.0
    best_params: Optional[List[np.ndarray]] = None
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(x_train.shape[0])
        for start in range(0, order.size, config.batch_size):
            sel = order[start : start + config.batch_size]
            backward_and_step(model, x_train[sel], y_train[sel], adam)
        train_loss, train_acc = evaluate(model, x_train, y_train)
        if x_val is not None and x_val.shape[0] > 0:
            val_loss, val_acc = evaluate(model, x_val, y_val)
            if val_acc > best_val:
                best_val = val_acc
                best_params = model.snapshot()
        else:
            val_loss, val_acc = float("nan"), float("nan")
        history.append(epoch, train_loss, train_acc, val_loss, val_acc)
    if best_params is not None:
        model.restore(best_params)
    return model, history


# ---------------------------------------------------------------------------
# Architectures
# ---------------------------------------------------------------------------

def custom_cnn_specs(classes: int) -> Tuple[LayerSpec, ...]:
    """Stock trace-image topology: three conv/pool stages and a 128-unit head."""
    return (
        LayerSpec("conv", 16),
        LayerSpec("relu"),
        LayerSpec("maxpool"),
        LayerSpec("conv", 32),
        LayerSpec("relu"),
        LayerSpec("maxpool"),
        LayerSpec("conv", 64),
        LayerSpec("relu"),
        LayerSpec("maxpool"),
        LayerSpec("flatten"),
        LayerSpec("dense", 128),
        LayerSpec("relu"),
        LayerSpec("dense", classes),
        LayerSpec("softmax"),
    )


def vgg16_specs(classes: int = 2) -> Tuple[LayerSpec, ...]:
    """VGG-16 layer topology with the head sized for `classes` outputs.

    Used for shape algebra; no pretrained weights are involved.
    """
    specs: List[LayerSpec] = []
    for block in ((64, 64), (128, 128), (256, 256, 256), (512, 512, 512), (512, 512, 512)):
        for filters in block:
            specs.extend([LayerSpec("conv", filters), LayerSpec("relu")])
        specs.append(LayerSpec("maxpool"))
    specs.extend(
        [
            LayerSpec("flatten"),
            LayerSpec("dense", 4096),
            LayerSpec("relu"),
            LayerSpec("dense", 4096),
            LayerSpec("relu"),
            LayerSpec("dense", classes),
            LayerSpec("softmax"),
        ]
    )
    return tuple(specs)


def default_custom_cnn(
    input_shape: Tuple[int, int, int], classes: int, seed: int = 0
) -> CnnModel:
    """Build the stock classifier with seeded He-style initialization."""
    specs = custom_cnn_specs(classes)
    return CnnModel(specs=specs, class_count=classes, input_shape=input_shape, seed=seed)


# ---------------------------------------------------------------------------
# State round-trip (serialization support)
# ---------------------------------------------------------------------------

def model_state(model: CnnModel) -> dict:
    return {
        "specs": [{"kind": s.kind, "size": s.size} for s in model.specs],
        "class_count": model.class_count,
        "input_shape": list(model.input_shape),
        "seed": model.seed,
        "params": model.snapshot(),
    }


def model_from_state(state: dict) -> CnnModel:
    specs = tuple(LayerSpec(kind=s["kind"], size=int(s["size"])) for s in state["specs"])
    model = CnnModel(
        specs=specs,
        class_count=int(state["class_count"]),
        input_shape=tuple(int(v) for v in state["input_shape"]),
        seed=int(state["seed"]),
    )
    model.restore([np.asarray(p, dtype=np.float64) for p in state["params"]])
    return model
