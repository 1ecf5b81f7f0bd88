"""Log-link GLM (normal or gamma response) fitted by IRLS with step halving."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError

GLM_FAMILIES = ("normal", "gamma")
TOL = 1e-8
MAX_ITER = 100
RIDGE_JITTER = 1e-10


def deviance(family: str, y, mu) -> float:
    if family == "normal":
        return float(np.sum((y - mu) ** 2))
    return float(2.0 * np.sum(-np.log(y / mu) + (y - mu) / mu))


def irls_weights(family: str, mu):
    # log link: dmu/deta = mu, so w = mu^2 / V(mu)
    return mu ** 2 if family == "normal" else np.ones_like(mu)


def pearson_dispersion(family: str, y, mu, dof: float) -> float:
    r = (y - mu) if family == "normal" else (y - mu) / mu
    phi = float(np.sum(r ** 2)) / max(dof, 1.0)
    return max(phi, np.finfo(float).tiny)


def solve_weighted(X, w, z, penalty=None):
    """Solve the (penalized) weighted normal equations, retrying once with a ridge jitter."""
    A = X.T @ (w[:, None] * X)
    if penalty is not None:
        A = A + penalty
    b = X.T @ (w * z)
    for jitter in (0.0, RIDGE_JITTER):
        M = A + jitter * np.eye(A.shape[0]) if jitter else A
        if np.linalg.matrix_rank(M) == M.shape[0]:
            try:
                return np.linalg.solve(M, b)
            except np.linalg.LinAlgError:
                pass
    raise DataError("singular working matrix in IRLS")


def check_response(y, min_n=6):
    y = np.asarray(y, dtype=float).ravel()
    if y.size < min_n:
        raise DataError(f"need more than 5 observations, got {y.size}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise DataError("response must be finite and strictly positive")
    return y


def add_intercept(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])


def irls(X, y, family, penalty=None, tol=TOL, max_iter=MAX_ITER):
    """Penalized IRLS on a design with intercept column; returns beta and per-iteration
    (penalized) deviance."""
    if family not in GLM_FAMILIES:
        raise DataError(f"family must be one of {GLM_FAMILIES}")
    # start from mu = y, i.e. eta = log y regressed onto the design
    eta = np.log(y)
    mu = y.copy()
    beta = None
    history = []
    converged = False

    def objective(b):
        m = np.exp(np.clip(X @ b, -700, 700))
        pen = 0.0 if penalty is None else float(b @ penalty @ b)
        return deviance(family, y, m) + pen, m

    for _ in range(max_iter):
        w = irls_weights(family, mu)
        z = eta + (y - mu) / mu
        new = solve_weighted(X, w, z, penalty)
        dev, m = objective(new)
        if beta is not None:
            # step halving keeps the objective non-increasing
            halvings = 0
            while not (np.isfinite(dev) and dev <= history[-1]) and halvings < 60:
                new = 0.5 * (new + beta)
                dev, m = objective(new)
                halvings += 1
            if not (np.isfinite(dev) and dev <= history[-1]):
                new, dev, m = beta, history[-1], mu
        beta, mu, eta = new, m, X @ new
        history.append(dev)
        if len(history) > 1 and abs(history[-1] - history[-2]) / (abs(history[-1]) + 0.1) < tol:
            converged = True
            break
    return beta, history, converged


@dataclass(frozen=True)
class GlmFit:
    family: str
    beta: np.ndarray
    dispersion: float
    converged: bool
    iterations: int
    deviance_history: tuple = field(default=(), compare=False)
    link: str = "log"

    @property
    def n_features(self) -> int:
        return self.beta.size - 1


def fit_glm(scores, dy, family: str = "normal") -> GlmFit:
    """``log E[dy] = b0 + sum_h b_h * score_h`` by IRLS.

    Converges when the relative deviance change drops below 1e-8 (at most
    100 iterations). Dispersion is the Pearson estimate.
    """
    y = check_response(dy)
    X = add_intercept(scores)
    if X.shape[0] != y.size:
        raise DataError("scores and response lengths differ")
    beta, history, converged = irls(X, y, family)
    mu = np.exp(X @ beta)
    phi = pearson_dispersion(family, y, mu, y.size - X.shape[1])
    return GlmFit(family, beta, phi, converged, len(history), tuple(history))


def predict_glm(fit: GlmFit, scores) -> np.ndarray:
    X = add_intercept(scores)
    if X.shape[1] != fit.beta.size:
        raise DataError(f"expected {fit.n_features} features, got {X.shape[1] - 1}")
    return np.exp(X @ fit.beta)
