"""Minimal trainable CNN: conv/ReLU/max-pool/dense/softmax with Adam.

Tensors are plain float64 numpy arrays, channels-last. Layer kernels are
fixed at 3x3 stride-1 same-padding convolutions and 2x2 stride-2 pooling.
"""

from .layers import (
    Conv2D,
    Dense,
    Flatten,
    MaxPool2D,
    ReLU,
    Softmax,
    conv2d_forward,
    cross_entropy,
    maxpool,
    relu,
    softmax,
)
from .network import (
    AdamState,
    CnnModel,
    LayerSpec,
    TrainConfig,
    TrainHistory,
    backward_and_step,
    custom_cnn_specs,
    default_custom_cnn,
    evaluate,
    topology_output_shape,
    train,
    vgg16_specs,
)

__all__ = [
    "AdamState",
    "CnnModel",
    "Conv2D",
    "Dense",
    "Flatten",
    "LayerSpec",
    "MaxPool2D",
    "ReLU",
    "Softmax",
    "TrainConfig",
    "TrainHistory",
    "backward_and_step",
    "conv2d_forward",
    "cross_entropy",
    "custom_cnn_specs",
    "default_custom_cnn",
    "evaluate",
    "maxpool",
    "relu",
    "softmax",
    "topology_output_shape",
    "train",
    "vgg16_specs",
]
