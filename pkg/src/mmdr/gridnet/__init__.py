"""Minimal dense-tensor engine with reverse-mode differentiation.

Exactly the layer set the fusion pipeline needs: convolutions,
transposed convolutions, channel concat/slice, a couple of elementwise
activations, detection losses, and two optimizers. Everything is
float64.
"""

from .tensor import (
    ContractViolation,
    Tensor,
    add,
    add_const,
    backward,
    concat_channels,
    conv2d,
    exp,
    leaky_relu,
    mul_const,
    pointwise_conv,
    scale,
    sigmoid,
    slice_channels,
    sub,
    tensor,
    tensor_sum,
    transposed_conv2d,
    zero_grad,
)
from .losses import bce, iou_loss, smooth_l1
from .optim import SGD, Adam
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "ContractViolation",
    "Tensor",
    "tensor",
    "conv2d",
    "transposed_conv2d",
    "pointwise_conv",
    "concat_channels",
    "slice_channels",
    "leaky_relu",
    "sigmoid",
    "exp",
    "add",
    "sub",
    "scale",
    "add_const",
    "mul_const",
    "tensor_sum",
    "backward",
    "zero_grad",
    "bce",
    "iou_loss",
    "smooth_l1",
    "SGD",
    "Adam",
    "save_checkpoint",
    "load_checkpoint",
]
