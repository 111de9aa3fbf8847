# cython: language_level=3
"""Compiled inner loops: presorted split search, node partitioning, Pegasos.

Every function here has a numpy twin in ``_kernels_py`` with the same
signature. Gini and squared-error split searches accumulate in the same
order as the twin, so both backends grow identical trees.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()

DEF GINI = 0
DEF GAIN_RATIO = 1
DEF SSE = 2
DEF MIN_GAIN = 1e-12


cdef inline double _entropy(double a, double b) noexcept nogil:
    cdef double t = a + b, h = 0.0, p
    if a > 0.0:
        p = a / t
        h -= p * log2(p)
    if b > 0.0:
        p = b / t
        h -= p * log2(p)
    return h


def best_split(
    const double[:, ::1] xt,
    const int[:, ::1] order,
    Py_ssize_t start,
    Py_ssize_t end,
    const long long[::1] features,
    const double[::1] y,
    const double[::1] w,
    int criterion,
):
    """Best (feature, threshold, gain) over ``features`` for node rows order[:, start:end].

    Returns feature -1 when no split improves the criterion.
    """
    cdef Py_ssize_t i, k, f, r, rn
    cdef Py_ssize_t best_f = -1
    cdef double best_thr = 0.0, best_gain = MIN_GAIN
    cdef double tot_w = 0.0, tot_a = 0.0, tot_b = 0.0
    cdef double wl, al, bl, wr, ar, br, v, vn, thr, gain, parent, pl, pr, gl, gr, si
    cdef Py_ssize_t nfeat = features.shape[0]

    with nogil:
        # totals: a = weight of class 0 / weighted sum of y; b = weight of class 1
        for i in range(start, end):
            r = order[0, i]
            tot_w += w[r]
            if criterion == SSE:
                tot_a += w[r] * y[r]
            elif y[r] > 0.5:
                tot_b += w[r]
            else:
                tot_a += w[r]

        if criterion == GINI:
            pl = tot_a / tot_w
            pr = tot_b / tot_w
            parent = 1.0 - pl * pl - pr * pr
        elif criterion == GAIN_RATIO:
            parent = _entropy(tot_a, tot_b)
        else:
            parent = tot_a * tot_a / tot_w

        for k in range(nfeat):
            f = features[k]
            wl = 0.0
            al = 0.0
            bl = 0.0
            for i in range(start, end - 1):
                r = order[f, i]
                wl += w[r]
                if criterion == SSE:
                    al += w[r] * y[r]
                elif y[r] > 0.5:
                    bl += w[r]
                else:
                    al += w[r]
                rn = order[f, i + 1]
                v = xt[f, r]
                vn = xt[f, rn]
                if not (vn > v):
                    continue
                wr = tot_w - wl
                if criterion == GINI:
                    ar = tot_a - al
                    br = tot_b - bl
                    pl = al / wl
                    pr = bl / wl
                    gl = 1.0 - pl * pl - pr * pr
                    pl = ar / wr
                    pr = br / wr
                    gr = 1.0 - pl * pl - pr * pr
                    gain = parent - (wl / tot_w) * gl - (wr / tot_w) * gr
                elif criterion == GAIN_RATIO:
                    ar = tot_a - al
                    br = tot_b - bl
                    gain = parent - (wl / tot_w) * _entropy(al, bl) - (wr / tot_w) * _entropy(ar, br)
                    pl = wl / tot_w
                    pr = wr / tot_w
                    si = -pl * log2(pl) - pr * log2(pr)
                    gain = gain / si
                else:
                    ar = tot_a - al
                    gain = al * al / wl + ar * ar / wr - parent
                if gain > best_gain:
                    thr = 0.5 * (v + vn)
                    if thr >= vn:
                        thr = v
                    best_gain = gain
                    best_f = f
                    best_thr = thr
    return best_f, best_thr, best_gain


def partition(
    const double[:, ::1] xt,
    int[:, ::1] order,
    Py_ssize_t start,
    Py_ssize_t end,
    Py_ssize_t feature,
    double threshold,
    unsigned char[::1] goes_left,
    int[::1] scratch,
):
    """Stable in-place partition of every feature's node segment; returns the split point."""
    cdef Py_ssize_t nf = order.shape[0]
    cdef Py_ssize_t f, i, r, nl = 0, lo, hi
    with nogil:
        for i in range(start, end):
            r = order[0, i]
            if xt[feature, r] <= threshold:
                goes_left[r] = 1
                nl += 1
            else:
                goes_left[r] = 0
        for f in range(nf):
            lo = start
            hi = 0
            for i in range(start, end):
                r = order[f, i]
                if goes_left[r]:
                    order[f, lo] = <int>r
                    lo += 1
                else:
                    scratch[hi] = <int>r
                    hi += 1
            for i in range(hi):
                order[f, lo + i] = scratch[i]
    return start + nl


def pegasos(
    const double[:, ::1] x,
    const double[::1] y,
    double lam,
    const long long[:, ::1] perms,
    double[::1] w,
):
    """Run Pegasos epochs in place on ``w`` (last entry is the bias weight).

    ``y`` holds +/-1 labels; ``perms`` holds one row visit order per epoch.
    """
    cdef Py_ssize_t n_epochs = perms.shape[0], n = perms.shape[1], d = x.shape[1]
    cdef Py_ssize_t e, s, i, j
    cdef double t = 0.0, eta, margin, scale, norm2, radius2 = 1.0 / lam, shrink
    with nogil:
        for e in range(n_epochs):
            for s in range(n):
                i = perms[e, s]
                t += 1.0
                eta = 1.0 / (lam * t)
                margin = w[d]
                for j in range(d):
                    margin += w[j] * x[i, j]
                margin *= y[i]
                scale = 1.0 - eta * lam
                for j in range(d + 1):
                    w[j] *= scale
                if margin < 1.0:
                    for j in range(d):
                        w[j] += eta * y[i] * x[i, j]
                    w[d] += eta * y[i]
                norm2 = 0.0
                for j in range(d + 1):
                    norm2 += w[j] * w[j]
                if norm2 > radius2:
                    shrink = (radius2 / norm2) ** 0.5
                    for j in range(d + 1):
                        w[j] *= shrink
    return t
