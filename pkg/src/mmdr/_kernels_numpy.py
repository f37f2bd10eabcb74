"""Vectorized numpy reference kernels for conv2d / transposed conv2d.

These are the fallback path when numba is unavailable or disabled via
``MMDR_BACKEND=numpy``. All arrays are float64, layout (batch, channel,
height, width); weights are (out_c, in_c, k, k) for conv2d and
(in_c, out_c, k, k) for transposed_conv2d.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_forward(x, w, b, stride, pad):
    B, C, H, W = x.shape
    O, _, K, _ = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = sliding_window_view(xp, (K, K), axis=(2, 3))[:, :, ::stride, ::stride]
    out = np.einsum("bcijuv,ocuv->boij", win, w, optimize=True)
    out += b[None, :, None, None]
    return np.ascontiguousarray(out)


def conv2d_backward(x, w, gout, stride, pad):
    B, C, H, W = x.shape
    O, _, K, _ = w.shape
    _, _, OH, OW = gout.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = sliding_window_view(xp, (K, K), axis=(2, 3))[:, :, ::stride, ::stride]
    gb = gout.sum(axis=(0, 2, 3))
    gw = np.einsum("boij,bcijuv->ocuv", gout, win, optimize=True)
    gxp = np.zeros_like(xp)
    for u in range(K):
        for v in range(K):
            contrib = np.einsum("boij,oc->bcij", gout, w[:, :, u, v], optimize=True)
            gxp[:, :, u : u + OH * stride : stride, v : v + OW * stride : stride] += contrib
    gx = gxp[:, :, pad : pad + H, pad : pad + W]
    return np.ascontiguousarray(gx), np.ascontiguousarray(gw), gb


def tconv2d_forward(x, w, b, stride, pad):
    B, C, H, W = x.shape
    _, O, K, _ = w.shape
    HF = (H - 1) * stride + K
    WF = (W - 1) * stride + K
    full = np.zeros((B, O, HF, WF), dtype=x.dtype)
    for u in range(K):
        for v in range(K):
            contrib = np.einsum("bcij,co->boij", x, w[:, :, u, v], optimize=True)
            full[:, :, u : u + (H - 1) * stride + 1 : stride, v : v + (W - 1) * stride + 1 : stride] += contrib
    out = full[:, :, pad : HF - pad, pad : WF - pad] + b[None, :, None, None]
    return np.ascontiguousarray(out)


def tconv2d_backward(x, w, gout, stride, pad):
    B, C, H, W = x.shape
    _, O, K, _ = w.shape
    HF = (H - 1) * stride + K
    WF = (W - 1) * stride + K
    full_g = np.zeros((B, O, HF, WF), dtype=gout.dtype)
    full_g[:, :, pad : HF - pad, pad : WF - pad] = gout
    gb = gout.sum(axis=(0, 2, 3))
    gx = np.zeros_like(x)
    gw = np.zeros_like(w)
    for u in range(K):
        for v in range(K):
            sl = full_g[:, :, u : u + (H - 1) * stride + 1 : stride, v : v + (W - 1) * stride + 1 : stride]
            gx += np.einsum("boij,co->bcij", sl, w[:, :, u, v], optimize=True)
            gw[:, :, u, v] = np.einsum("bcij,boij->co", x, sl, optimize=True)
    return np.ascontiguousarray(gx), np.ascontiguousarray(gw), gb
