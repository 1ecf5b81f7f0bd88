"""Exact greedy split search for the boosted trees.

Two implementations with identical semantics: a loop kernel compiled by numba
and a vectorized numpy version. ``best_split`` points at the numba kernel
unless numba is unavailable or disabled via ``CLIMRISK_NO_NUMBA``.

Split gain follows the regularized objective with squared-error hessians:
``0.5 * (GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam)) - gamma``. Candidate
thresholds are midpoints between consecutive distinct values; rows with
``x < threshold`` go left. Ties keep the lowest feature, then the lowest
threshold.
"""
import numpy as np

from .._accel import HAVE_NUMBA, njit


def _best_split_py(X, order, in_node, g, h, lam, gamma, min_child):
    n, p = X.shape
    G = 0.0
    H = 0.0
    cnt_total = 0
    for i in range(n):
        if in_node[i]:
            G += g[i]
            H += h[i]
            cnt_total += 1
    parent = G * G / (H + lam)
    best_gain = 0.0
    best_f = -1
    best_thr = 0.0
    for f in range(p):
        GL = 0.0
        HL = 0.0
        cnt = 0
        prev = 0.0
        for j in range(n):
            i = order[j, f]
            if not in_node[i]:
                continue
            x = X[i, f]
            if cnt > 0 and x > prev and cnt >= min_child and cnt_total - cnt >= min_child:
                GR = G - GL
                HR = H - HL
                gain = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent) - gamma
                if gain > best_gain:
                    thr = 0.5 * (prev + x)
                    if thr <= prev:
                        thr = x
                    best_gain = gain
                    best_f = f
                    best_thr = thr
            GL += g[i]
            HL += h[i]
            cnt += 1
            prev = x
    return best_gain, best_f, best_thr


def best_split_numpy(X, order, in_node, g, h, lam, gamma, min_child):
    """Vectorized counterpart of the compiled kernel (same accumulation order)."""
    node_rows = np.flatnonzero(in_node)
    cnt_total = node_rows.size
    G = float(np.cumsum(g[node_rows])[-1]) if cnt_total else 0.0
    H = float(np.cumsum(h[node_rows])[-1]) if cnt_total else 0.0
    parent = G * G / (H + lam)
    best_gain, best_f, best_thr = 0.0, -1, 0.0
    if cnt_total < 2:
        return best_gain, best_f, best_thr
    for f in range(X.shape[1]):
        o = order[:, f]
        o = o[in_node[o]]
        xs = X[o, f]
        GL = np.cumsum(g[o])[:-1]
        HL = np.cumsum(h[o])[:-1]
        cnt = np.arange(1, cnt_total)
        ok = (xs[1:] > xs[:-1]) & (cnt >= min_child) & (cnt_total - cnt >= min_child)
        if not ok.any():
            continue
        GR = G - GL
        HR = H - HL
        gain = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent) - gamma
        gain = np.where(ok, gain, -np.inf)
        j = int(np.argmax(gain))
        if gain[j] > best_gain:
            thr = 0.5 * (xs[j] + xs[j + 1])
            if thr <= xs[j]:
                thr = xs[j + 1]
            best_gain, best_f, best_thr = float(gain[j]), f, float(thr)
    return best_gain, best_f, best_thr


def _predict_tree_py(X, feature, threshold, left, right, value):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] < threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


def predict_tree_numpy(X, feature, threshold, left, right, value):
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    while True:
        f = feature[node]
        internal = f >= 0
        if not internal.any():
            return value[node]
        go_left = np.zeros_like(internal)
        go_left[internal] = X[rows[internal], f[internal]] < threshold[node[internal]]
        node = np.where(internal, np.where(go_left, left[node], right[node]), node)


best_split_numba = njit(_best_split_py) if HAVE_NUMBA else None
predict_tree_numba = njit(_predict_tree_py) if HAVE_NUMBA else None

if HAVE_NUMBA:
    best_split = best_split_numba
    predict_tree = predict_tree_numba
else:
    best_split = best_split_numpy
    predict_tree = predict_tree_numpy
