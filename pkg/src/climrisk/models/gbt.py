"""Gradient-boosted regression trees with squared-error loss.

Level-wise growth (XGBoost style) splits every node of a level before moving
deeper; leaf-wise growth (LightGBM style) repeatedly splits the single leaf
with the largest gain until the ``2**max_depth`` leaf budget is used up.
Gradient-based one-side sampling is not modeled.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from . import _kernels

GROWTH = ("levelwise", "leafwise")


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    @property
    def depth(self) -> int:
        depth = np.zeros(self.feature.size, dtype=int)
        for node in range(self.feature.size):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def predict(self, X) -> np.ndarray:
        return _kernels.predict_tree(X, self.feature, self.threshold, self.left, self.right, self.value)


@dataclass(frozen=True)
class GbtEnsemble:
    trees: tuple
    base_score: float
    learning_rate: float
    max_depth: int
    n_estimators: int
    reg_lambda: float
    reg_gamma: float
    growth: str
    n_features: int
    min_child_samples: int = 1
    degenerate: bool = False
    objective_history: tuple = field(default=(), compare=False)


class _Builder:
    def __init__(self, X, order, g, h, lam, gamma, min_child):
        self.X, self.order, self.g, self.h = X, order, g, h
        self.lam, self.gamma, self.min_child = lam, gamma, min_child
        self.feature, self.threshold, self.left, self.right = [], [], [], []
        self.masks, self.depths = [], []

    def add(self, mask, depth):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.masks.append(mask)
        self.depths.append(depth)
        return len(self.feature) - 1

    def candidate(self, node):
        return _kernels.best_split(self.X, self.order, self.masks[node], self.g, self.h,
                                   self.lam, self.gamma, self.min_child)

    def split(self, node, f, thr):
        mask = self.masks[node]
        go_left = mask & (self.X[:, f] < thr)
        self.feature[node] = f
        self.threshold[node] = thr
        self.left[node] = self.add(go_left, self.depths[node] + 1)
        self.right[node] = self.add(mask & ~go_left, self.depths[node] + 1)
        return self.left[node], self.right[node]

    def finish(self):
        value = np.zeros(len(self.feature))
        leaves = [i for i, f in enumerate(self.feature) if f < 0]
        for i in leaves:
            m = self.masks[i]
            value[i] = -self.g[m].sum() / (self.h[m].sum() + self.lam)
        tree = Tree(np.array(self.feature, dtype=np.int64), np.array(self.threshold, dtype=float),
                    np.array(self.left, dtype=np.int64), np.array(self.right, dtype=np.int64), value)
        return tree, [(self.masks[i], value[i]) for i in leaves]


def _grow_levelwise(b: _Builder, max_depth):
    frontier = [b.add(np.ones(b.X.shape[0], dtype=np.bool_), 0)]
    for _ in range(max_depth):
        nxt = []
        for node in frontier:
            gain, f, thr = b.candidate(node)
            if f >= 0 and gain > 0:
                nxt.extend(b.split(node, f, thr))
        frontier = nxt
        if not frontier:
            break


def _grow_leafwise(b: _Builder, max_depth):
    root = b.add(np.ones(b.X.shape[0], dtype=np.bool_), 0)
    cands = {root: b.candidate(root) if max_depth > 0 else (0.0, -1, 0.0)}
    n_leaves, budget = 1, 2 ** max_depth
    while n_leaves < budget:
        best = None
        for node in sorted(cands):
            gain, f, _ = cands[node]
            if f >= 0 and gain > 0 and (best is None or gain > cands[best][0]):
                best = node
        if best is None:
            break
        _, f, thr = cands.pop(best)
        for child in b.split(best, f, thr):
            cands[child] = b.candidate(child) if b.depths[child] < max_depth else (0.0, -1, 0.0)
        n_leaves += 1


def fit_gbt(features, dy, n_estimators: int = 500, max_depth: int = 2, learning_rate: float = 0.01,
            growth: str = "levelwise", reg_lambda: float = 1.0, reg_gamma: float = 0.0,
            min_child_samples: int = 1) -> GbtEnsemble:
    """Boost ``n_estimators`` trees on squared error starting from ``mean(dy)``.

    Leaf weights are ``-G/(H + lambda)``; each tree is added with shrinkage
    ``learning_rate``. ``objective_history`` holds the initial loss followed by
    the per-round objective ``loss + gamma*T + lambda/2 * ||lr * w||^2``, with
    loss ``0.5 * sum(residual^2)``.
    """
    X = np.ascontiguousarray(np.asarray(features, dtype=float))
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(dy, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise DataError("features and response lengths differ")
    if y.size < 10:
        raise DataError("boosting needs at least 10 observations")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in boosting inputs")
    if growth not in GROWTH:
        raise DataError(f"growth must be one of {GROWTH}")
    if not 0 < learning_rate <= 1:
        raise DataError("learning_rate must lie in (0, 1]")
    if max_depth < 1 or n_estimators < 0 or reg_lambda < 0 or reg_gamma < 0 or min_child_samples < 1:
        raise DataError("invalid boosting hyperparameters")

    base = float(np.mean(y))
    pred = np.full(y.size, base)
    degenerate = not np.any(np.ptp(X, axis=0) > 0)
    loss = 0.5 * float(np.sum((y - pred) ** 2))
    history = [loss]
    common = dict(base_score=base, learning_rate=learning_rate, max_depth=max_depth,
                  n_estimators=n_estimators, reg_lambda=reg_lambda, reg_gamma=reg_gamma, growth=growth,
                  n_features=X.shape[1], min_child_samples=min_child_samples)
    if degenerate or n_estimators == 0:
        return GbtEnsemble(trees=(), degenerate=degenerate, objective_history=tuple(history), **common)

    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable"))
    h = np.ones(y.size)
    trees = []
    grow = _grow_levelwise if growth == "levelwise" else _grow_leafwise
    for _ in range(n_estimators):
        g = pred - y
        b = _Builder(X, order, g, h, float(reg_lambda), float(reg_gamma), int(min_child_samples))
        grow(b, max_depth)
        tree, leaves = b.finish()
        for mask, w in leaves:
            pred[mask] += learning_rate * w
        trees.append(tree)
        loss = 0.5 * float(np.sum((y - pred) ** 2))
        shrunk = learning_rate * tree.value[tree.feature < 0]
        history.append(loss + reg_gamma * tree.n_leaves + 0.5 * reg_lambda * float(shrunk @ shrunk))
    return GbtEnsemble(trees=tuple(trees), objective_history=tuple(history), **common)


def predict_gbt(ens: GbtEnsemble, features) -> np.ndarray:
    X = np.ascontiguousarray(np.asarray(features, dtype=float))
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != ens.n_features:
        raise DataError(f"expected {ens.n_features} features, got {X.shape[1]}")
    pred = np.full(X.shape[0], ens.base_score)
    for tree in ens.trees:
        pred += ens.learning_rate * tree.predict(X)
    return pred
