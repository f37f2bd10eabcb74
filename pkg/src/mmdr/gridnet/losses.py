"""Detection losses as single graph nodes with hand-derived backwards.

Each loss reduces to a scalar mean over the unmasked (or all) elements.
Targets and masks are plain numpy constants; only predictions carry
gradient.
"""

import numpy as np

from .tensor import ContractViolation, Tensor, _result

BCE_EPS = 1e-7


def _prep_mask(mask, shape):
    if mask is None:
        return np.ones(shape, dtype=np.float64)
    m = np.asarray(mask, dtype=np.float64)
    try:
        return np.broadcast_to(m, shape).astype(np.float64)
    except ValueError:
        raise ContractViolation(f"mask shape {m.shape} does not broadcast to {shape}") from None


def bce(pred, target, mask=None):
    """Mean binary cross-entropy over unmasked elements.

    Predictions are probabilities; they get clamped to
    [BCE_EPS, 1 - BCE_EPS] so exact 0/1 inputs stay finite. An empty
    mask yields loss 0 with zero gradient.
    """
    y = np.asarray(target, dtype=np.float64)
    y = np.broadcast_to(y, pred.data.shape)
    m = _prep_mask(mask, pred.data.shape)
    n = m.sum()
    if n == 0:
        return _result(np.array([0.0]), (pred,), lambda gout, out_t: None)
    p = np.clip(pred.data, BCE_EPS, 1.0 - BCE_EPS)
    per = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    out = np.array([(per * m).sum() / n])

    def back(gout, out_t):
        if pred.requires_grad:
            inside = (pred.data > BCE_EPS) & (pred.data < 1.0 - BCE_EPS)
            dper = (-y / p + (1.0 - y) / (1.0 - p)) * inside
            pred.accumulate_grad(gout.reshape(-1)[0] * dper * m / n)

    return _result(out, (pred,), back)


def iou_loss(pred_boxes, gt_boxes, mask):
    """Mean (1 - IoU) over masked cells.

    ``pred_boxes`` is a tensor with 4 channels (x1, y1, x2, y2) on
    axis 1; ``gt_boxes`` the same shape as a constant. The gradient is
    zero on cells whose boxes do not overlap (the IoU plateau).
    """
    if pred_boxes.data.ndim != 4 or pred_boxes.data.shape[1] != 4:
        raise ContractViolation(f"iou_loss: pred must be (b,4,h,w), got {pred_boxes.data.shape}")
    g = np.asarray(gt_boxes, dtype=np.float64)
    if g.shape != pred_boxes.data.shape:
        raise ContractViolation(f"iou_loss: gt shape {g.shape} != pred shape {pred_boxes.data.shape}")
    m = _prep_mask(mask, (pred_boxes.data.shape[0], 1) + pred_boxes.data.shape[2:])[:, 0]
    n = m.sum()
    if n == 0:
        return _result(np.array([0.0]), (pred_boxes,), lambda gout, out_t: None)

    p = pred_boxes.data
    px1, py1, px2, py2 = p[:, 0], p[:, 1], p[:, 2], p[:, 3]
    gx1, gy1, gx2, gy2 = g[:, 0], g[:, 1], g[:, 2], g[:, 3]

    ix1 = np.maximum(px1, gx1)
    iy1 = np.maximum(py1, gy1)
    ix2 = np.minimum(px2, gx2)
    iy2 = np.minimum(py2, gy2)
    iw = ix2 - ix1
    ih = iy2 - iy1
    overlap = (iw > 0) & (ih > 0)
    inter = np.where(overlap, iw * ih, 0.0)
    area_p = (px2 - px1) * (py2 - py1)
    area_g = (gx2 - gx1) * (gy2 - gy1)
    union = area_p + area_g - inter
    safe_union = np.where(union > 0, union, 1.0)
    iou = np.where(union > 0, inter / safe_union, 0.0)
    out = np.array([(m * (1.0 - iou)).sum() / n])

    def back(gout, out_t):
        if not pred_boxes.requires_grad:
            return
        g0 = gout.reshape(-1)[0]
        # d iou / d inter and d iou / d area_p
        d_inter = np.where(overlap, (union + inter) / safe_union**2, 0.0)
        d_area = -inter / safe_union**2
        # intersection edge subgradients (active side of each min/max)
        di_px1 = np.where(overlap & (px1 > gx1), -ih, 0.0)
        di_px2 = np.where(overlap & (px2 < gx2), ih, 0.0)
        di_py1 = np.where(overlap & (py1 > gy1), -iw, 0.0)
        di_py2 = np.where(overlap & (py2 < gy2), iw, 0.0)
        h_p = py2 - py1
        w_p = px2 - px1
        diou = np.empty_like(p)
        diou[:, 0] = d_inter * di_px1 + d_area * (-h_p)
        diou[:, 1] = d_inter * di_py1 + d_area * (-w_p)
        diou[:, 2] = d_inter * di_px2 + d_area * h_p
        diou[:, 3] = d_inter * di_py2 + d_area * w_p
        pred_boxes.accumulate_grad(-g0 * diou * m[:, None] / n)

    return _result(out, (pred_boxes,), back)


def smooth_l1(pred, target, mask=None):
    """Mean smooth-L1 (threshold 1) over unmasked elements."""
    t = np.broadcast_to(np.asarray(target, dtype=np.float64), pred.data.shape)
    m = _prep_mask(mask, pred.data.shape)
    n = m.sum()
    if n == 0:
        return _result(np.array([0.0]), (pred,), lambda gout, out_t: None)
    d = pred.data - t
    ad = np.abs(d)
    per = np.where(ad < 1.0, 0.5 * d * d, ad - 0.5)
    out = np.array([(per * m).sum() / n])

    def back(gout, out_t):
        if pred.requires_grad:
            dper = np.where(ad < 1.0, d, np.sign(d))
            pred.accumulate_grad(gout.reshape(-1)[0] * dper * m / n)

    return _result(out, (pred,), back)
