"""Numpy implementations of the compiled kernels (same signatures and results)."""

from __future__ import annotations

import numpy as np

GINI, GAIN_RATIO, SSE = 0, 1, 2
MIN_GAIN = 1e-12


def _entropy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    t = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        pa = a / t
        pb = b / t
        ha = np.where(a > 0, -pa * np.log2(np.where(a > 0, pa, 1.0)), 0.0)
        hb = np.where(b > 0, -pb * np.log2(np.where(b > 0, pb, 1.0)), 0.0)
    return ha + hb


def best_split(xt, order, start, end, features, y, w, criterion):
    seg0 = order[0, start:end]
    ws = w[seg0]
    if criterion == SSE:
        tot_w = np.cumsum(ws)[-1]
        tot_a = np.cumsum(ws * y[seg0])[-1]
        tot_b = 0.0
        parent = tot_a * tot_a / tot_w
    else:
        pos = y[seg0] > 0.5
        tot_w = np.cumsum(ws)[-1]
        tot_a = np.cumsum(np.where(pos, 0.0, ws))[-1]
        tot_b = np.cumsum(np.where(pos, ws, 0.0))[-1]
        if criterion == GINI:
            pl, pr = tot_a / tot_w, tot_b / tot_w
            parent = 1.0 - pl * pl - pr * pr
        else:
            parent = float(_entropy(np.array([tot_a]), np.array([tot_b]))[0])

    best_f, best_thr, best_gain = -1, 0.0, MIN_GAIN
    for f in features:
        seg = order[f, start:end]
        vals = xt[f, seg]
        cut = np.flatnonzero(vals[1:] > vals[:-1])
        if cut.size == 0:
            continue
        wseg = w[seg]
        wl = np.cumsum(wseg)[cut]
        wr = tot_w - wl
        if criterion == SSE:
            al = np.cumsum(wseg * y[seg])[cut]
            ar = tot_a - al
            gain = al * al / wl + ar * ar / wr - parent
        else:
            pos = y[seg] > 0.5
            al = np.cumsum(np.where(pos, 0.0, wseg))[cut]
            bl = np.cumsum(np.where(pos, wseg, 0.0))[cut]
            ar = tot_a - al
            br = tot_b - bl
            if criterion == GINI:
                pl, pr = al / wl, bl / wl
                gl = 1.0 - pl * pl - pr * pr
                pl, pr = ar / wr, br / wr
                gr = 1.0 - pl * pl - pr * pr
                gain = parent - (wl / tot_w) * gl - (wr / tot_w) * gr
            else:
                gain = parent - (wl / tot_w) * _entropy(al, bl) - (wr / tot_w) * _entropy(ar, br)
                pl, pr = wl / tot_w, wr / tot_w
                gain = gain / (-pl * np.log2(pl) - pr * np.log2(pr))
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            v, vn = vals[cut[k]], vals[cut[k] + 1]
            thr = 0.5 * (v + vn)
            if thr >= vn:
                thr = v
            best_f, best_thr, best_gain = int(f), float(thr), float(gain[k])
    return best_f, best_thr, best_gain


def partition(xt, order, start, end, feature, threshold, goes_left, scratch):
    seg = order[:, start:end]
    left_rows = xt[feature, seg[0]] <= threshold
    goes_left[seg[0]] = left_rows
    mask = goes_left[seg].astype(bool)
    # stable: left rows first, each side keeps its sorted order
    perm = np.argsort(~mask, axis=1, kind="stable")
    order[:, start:end] = np.take_along_axis(seg, perm, axis=1)
    return start + int(left_rows.sum())


def pegasos(x, y, lam, perms, w):
    d = x.shape[1]
    radius2 = 1.0 / lam
    t = 0.0
    for perm in perms:
        for i in perm:
            t += 1.0
            eta = 1.0 / (lam * t)
            xi = x[i]
            margin = y[i] * (w[d] + float(np.dot(w[:d], xi)))
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w[:d] += eta * y[i] * xi
                w[d] += eta * y[i]
            norm2 = float(np.dot(w, w))
            if norm2 > radius2:
                w *= (radius2 / norm2) ** 0.5
    return t
