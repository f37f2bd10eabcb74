"""Numba-jitted loop kernels for conv2d / transposed conv2d.

Plain nested loops, compiled with ``@njit(cache=True)``. Serial on
purpose: scatter-adds in the backward passes would race under prange,
and run-to-run determinism matters more here than the last 2x.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def conv2d_forward(x, w, b, stride, pad):
    B, C, H, W = x.shape
    O = w.shape[0]
    K = w.shape[2]
    OH = (H + 2 * pad - K) // stride + 1
    OW = (W + 2 * pad - K) // stride + 1
    out = np.empty((B, O, OH, OW), dtype=np.float64)
    for bb in range(B):
        for o in range(O):
            for i in range(OH):
                ib = i * stride - pad
                for j in range(OW):
                    jb = j * stride - pad
                    acc = b[o]
                    for c in range(C):
                        for u in range(K):
                            y = ib + u
                            if y < 0 or y >= H:
                                continue
                            for v in range(K):
                                xx = jb + v
                                if 0 <= xx < W:
                                    acc += x[bb, c, y, xx] * w[o, c, u, v]
                    out[bb, o, i, j] = acc
    return out


@njit(cache=True)
def conv2d_backward(x, w, gout, stride, pad):
    B, C, H, W = x.shape
    O = w.shape[0]
    K = w.shape[2]
    OH = gout.shape[2]
    OW = gout.shape[3]
    gx = np.zeros((B, C, H, W), dtype=np.float64)
    gw = np.zeros((O, C, K, K), dtype=np.float64)
    gb = np.zeros(O, dtype=np.float64)
    for bb in range(B):
        for o in range(O):
            for i in range(OH):
                ib = i * stride - pad
                for j in range(OW):
                    jb = j * stride - pad
                    g = gout[bb, o, i, j]
                    gb[o] += g
                    for c in range(C):
                        for u in range(K):
                            y = ib + u
                            if y < 0 or y >= H:
                                continue
                            for v in range(K):
                                xx = jb + v
                                if 0 <= xx < W:
                                    gx[bb, c, y, xx] += g * w[o, c, u, v]
                                    gw[o, c, u, v] += g * x[bb, c, y, xx]
    return gx, gw, gb


@njit(cache=True)
def tconv2d_forward(x, w, b, stride, pad):
    B, C, H, W = x.shape
    O = w.shape[1]
    K = w.shape[2]
    OH = (H - 1) * stride - 2 * pad + K
    OW = (W - 1) * stride - 2 * pad + K
    out = np.empty((B, O, OH, OW), dtype=np.float64)
    for bb in range(B):
        for o in range(O):
            for y in range(OH):
                for xx in range(OW):
                    acc = b[o]
                    # output position y = i*stride - pad + u
                    for u in range(K):
                        num = y + pad - u
                        if num < 0 or num % stride != 0:
                            continue
                        i = num // stride
                        if i >= H:
                            continue
                        for v in range(K):
                            num2 = xx + pad - v
                            if num2 < 0 or num2 % stride != 0:
                                continue
                            j = num2 // stride
                            if j >= W:
                                continue
                            for c in range(C):
                                acc += x[bb, c, i, j] * w[c, o, u, v]
                    out[bb, o, y, xx] = acc
    return out


@njit(cache=True)
def tconv2d_backward(x, w, gout, stride, pad):
    B, C, H, W = x.shape
    O = w.shape[1]
    K = w.shape[2]
    OH = gout.shape[2]
    OW = gout.shape[3]
    gx = np.zeros((B, C, H, W), dtype=np.float64)
    gw = np.zeros((C, O, K, K), dtype=np.float64)
    gb = np.zeros(O, dtype=np.float64)
    for bb in range(B):
        for o in range(O):
            for y in range(OH):
                for xx in range(OW):
                    g = gout[bb, o, y, xx]
                    gb[o] += g
                    for u in range(K):
                        num = y + pad - u
                        if num < 0 or num % stride != 0:
                            continue
                        i = num // stride
                        if i >= H:
                            continue
                        for v in range(K):
                            num2 = xx + pad - v
                            if num2 < 0 or num2 % stride != 0:
                                continue
                            j = num2 // stride
                            if j >= W:
                                continue
                            for c in range(C):
                                gx[bb, c, i, j] += g * w[c, o, u, v]
                                gw[c, o, u, v] += g * x[bb, c, i, j]
    return gx, gw, gb
