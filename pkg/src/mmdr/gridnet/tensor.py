"""Tensor type and differentiable operations.

A :class:`Tensor` wraps a float64 numpy array plus an implicit
computation graph: every op records its parent tensors and a closure
that routes the output gradient back to them. ``backward(loss)`` walks
the graph once in reverse topological order and sums contributions from
all consumers into each node's ``grad`` accumulator.

Gradient semantics: grads accumulate across repeated backward calls;
call :func:`zero_grad` (or ``Tensor.zero_grad``) before each step.

Feature maps use the (batch, channels, height, width) layout. Loss
values are single-element tensors. Tensors are value-semantic: ops
never mutate their inputs, so instances may be shared across threads
read-only; a graph (a chain of tensors under construction) belongs to
one thread.
"""

from __future__ import annotations

import numpy as np

from .. import backend


class ContractViolation(ValueError):
    """An operation was called outside its documented contract."""


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    def zero_grad(self):
        self.grad = None

    def accumulate_grad(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def item(self):
        if self.data.size != 1:
            raise ContractViolation(f"item() on non-scalar tensor of shape {self.data.shape}")
        return float(self.data.reshape(-1)[0])

    def backward(self):
        backward(self)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def tensor(data, requires_grad=False):
    return Tensor(data, requires_grad=requires_grad)


def _result(data, parents, backward_fn):
    req = any(p.requires_grad for p in parents)
    return Tensor(data, requires_grad=req, _parents=tuple(parents) if req else (),
                  _backward=backward_fn if req else None)


def _require_4d(t, name, op):
    if t.data.ndim != 4:
        raise ContractViolation(f"{op}: {name} must be 4-D (b,c,h,w), got shape {t.data.shape}")


# ---------------------------------------------------------------------------
# convolutions


def conv2d(x, w, b, stride=1, padding=0):
    """2-D convolution, weight (out_c, in_c, k, k), bias (out_c,)."""
    _require_4d(x, "input", "conv2d")
    _require_4d(w, "weight", "conv2d")
    if stride < 1:
        raise ContractViolation(f"conv2d: stride must be >= 1, got {stride}")
    O, C, K, K2 = w.data.shape
    if K != K2:
        raise ContractViolation(f"conv2d: kernel must be square, got weight shape {w.data.shape}")
    if x.data.shape[1] != C:
        raise ContractViolation(
            f"conv2d: input channels {x.data.shape[1]} != weight in-channels {C} "
            f"(input {x.data.shape}, weight {w.data.shape})")
    if b.data.shape != (O,):
        raise ContractViolation(f"conv2d: bias shape {b.data.shape} != ({O},)")
    if x.data.shape[2] + 2 * padding < K or x.data.shape[3] + 2 * padding < K:
        raise ContractViolation(
            f"conv2d: kernel {K} larger than padded input {x.data.shape} with padding {padding}")
    out = backend.conv2d_forward(x.data, w.data, b.data, stride, padding)

    def back(gout, out_t):
        gx, gw, gb = backend.conv2d_backward(x.data, w.data, gout, stride, padding)
        if x.requires_grad:
            x.accumulate_grad(gx)
        if w.requires_grad:
            w.accumulate_grad(gw)
        if b.requires_grad:
            b.accumulate_grad(gb)

    return _result(out, (x, w, b), back)


def transposed_conv2d(x, w, b, stride=1, padding=0):
    """Transposed 2-D convolution, weight (in_c, out_c, k, k), bias (out_c,).

    Output spatial size is (h - 1) * stride - 2 * padding + k. With the
    same weight array this is the adjoint of :func:`conv2d` at equal
    stride/padding.
    """
    _require_4d(x, "input", "transposed_conv2d")
    _require_4d(w, "weight", "transposed_conv2d")
    if stride < 1:
        raise ContractViolation(f"transposed_conv2d: stride must be >= 1, got {stride}")
    C, O, K, K2 = w.data.shape
    if K != K2:
        raise ContractViolation(
            f"transposed_conv2d: kernel must be square, got weight shape {w.data.shape}")
    if x.data.shape[1] != C:
        raise ContractViolation(
            f"transposed_conv2d: input channels {x.data.shape[1]} != weight in-channels {C} "
            f"(input {x.data.shape}, weight {w.data.shape})")
    if b.data.shape != (O,):
        raise ContractViolation(f"transposed_conv2d: bias shape {b.data.shape} != ({O},)")
    if (x.data.shape[2] - 1) * stride - 2 * padding + K <= 0:
        raise ContractViolation(
            f"transposed_conv2d: empty output for input {x.data.shape}, k={K}, "
            f"stride={stride}, padding={padding}")
    out = backend.tconv2d_forward(x.data, w.data, b.data, stride, padding)

    def back(gout, out_t):
        gx, gw, gb = backend.tconv2d_backward(x.data, w.data, gout, stride, padding)
        if x.requires_grad:
            x.accumulate_grad(gx)
        if w.requires_grad:
            w.accumulate_grad(gw)
        if b.requires_grad:
            b.accumulate_grad(gb)

    return _result(out, (x, w, b), back)


def pointwise_conv(x, w, b):
    """1x1 convolution: remaps channel count, spatial size unchanged."""
    _require_4d(w, "weight", "pointwise_conv")
    if w.data.shape[2:] != (1, 1):
        raise ContractViolation(f"pointwise_conv: kernel must be 1x1, got weight shape {w.data.shape}")
    return conv2d(x, w, b, stride=1, padding=0)


# ---------------------------------------------------------------------------
# channel ops


def concat_channels(inputs):
    """Concatenate tensors along the channel axis; order preserved."""
    if not inputs:
        raise ContractViolation("concat_channels: empty input list")
    if len(inputs) == 1:
        return inputs[0]
    first = inputs[0].data.shape
    for t in inputs[1:]:
        s = t.data.shape
        if s[0] != first[0] or s[2:] != first[2:]:
            raise ContractViolation(
                f"concat_channels: batch/spatial mismatch {first} vs {s}")
    out = np.concatenate([t.data for t in inputs], axis=1)
    sizes = [t.data.shape[1] for t in inputs]
    offsets = np.cumsum([0] + sizes)

    def back(gout, out_t):
        for t, lo, hi in zip(inputs, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                t.accumulate_grad(gout[:, lo:hi])

    return _result(out, inputs, back)


def slice_channels(x, start, stop):
    """Channel slice x[:, start:stop]; gradient routes back into the slice."""
    _require_4d(x, "input", "slice_channels")
    C = x.data.shape[1]
    if not (0 <= start < stop <= C):
        raise ContractViolation(f"slice_channels: [{start}:{stop}] invalid for {C} channels")
    out = x.data[:, start:stop].copy()

    def back(gout, out_t):
        if x.requires_grad:
            g = np.zeros_like(x.data)
            g[:, start:stop] = gout
            x.accumulate_grad(g)

    return _result(out, (x,), back)


# ---------------------------------------------------------------------------
# elementwise


def leaky_relu(x, alpha=0.1):
    out = np.where(x.data > 0, x.data, alpha * x.data)

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout * np.where(x.data > 0, 1.0, alpha))

    return _result(out, (x,), back)


def sigmoid(x):
    out = 1.0 / (1.0 + np.exp(-x.data))

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout * out * (1.0 - out))

    return _result(out, (x,), back)


def exp(x, max_x=8.0):
    """Clamped exponential exp(min(x, max_x)); keeps box sizes finite."""
    clamped = np.minimum(x.data, max_x)
    out = np.exp(clamped)

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout * out * (x.data < max_x))

    return _result(out, (x,), back)


def add(x, y):
    if x.data.shape != y.data.shape:
        raise ContractViolation(f"add: shape mismatch {x.data.shape} vs {y.data.shape}")
    out = x.data + y.data

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout)
        if y.requires_grad:
            y.accumulate_grad(gout)

    return _result(out, (x, y), back)


def sub(x, y):
    if x.data.shape != y.data.shape:
        raise ContractViolation(f"sub: shape mismatch {x.data.shape} vs {y.data.shape}")
    out = x.data - y.data

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout)
        if y.requires_grad:
            y.accumulate_grad(-gout)

    return _result(out, (x, y), back)


def scale(x, k):
    """Multiply by a python scalar."""
    k = float(k)
    out = x.data * k

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout * k)

    return _result(out, (x,), back)


def add_const(x, c):
    """Add a constant scalar or array (no gradient for the constant)."""
    c = np.asarray(c, dtype=np.float64)
    out = x.data + c
    if out.shape != x.data.shape:
        raise ContractViolation(f"add_const: constant shape {c.shape} broadcasts {x.data.shape} to {out.shape}")

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout)

    return _result(out, (x,), back)


def mul_const(x, c):
    """Multiply by a constant array elementwise (no gradient for the constant)."""
    c = np.asarray(c, dtype=np.float64)
    out = x.data * c
    if out.shape != x.data.shape:
        raise ContractViolation(f"mul_const: constant shape {c.shape} broadcasts {x.data.shape} to {out.shape}")

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(gout * c)

    return _result(out, (x,), back)


def tensor_sum(x):
    """Sum all elements to a scalar tensor."""
    out = np.array([x.data.sum()])

    def back(gout, out_t):
        if x.requires_grad:
            x.accumulate_grad(np.full_like(x.data, gout.reshape(-1)[0]))

    return _result(out, (x,), back)


# ---------------------------------------------------------------------------
# backward


def backward(loss):
    """Populate gradients of every requires_grad tensor reachable from loss.

    ``loss`` must be a scalar (single-element) tensor. Gradients
    accumulate into existing ``grad`` buffers; zero them first.
    """
    if loss.data.size != 1:
        raise ContractViolation(f"backward: root must be scalar, got shape {loss.data.shape}")

    # iterative post-order topological sort
    order = []
    visited = set()
    stack = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited:
                stack.append((p, False))

    loss.accumulate_grad(np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad, node)


def zero_grad(tensors):
    """Clear gradient buffers of an iterable (or dict) of tensors."""
    if isinstance(tensors, dict):
        tensors = tensors.values()
    for t in tensors:
        t.zero_grad()
