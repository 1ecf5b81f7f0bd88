"""Additive log-link model: one penalized cubic B-spline smooth per predictor.

Each smooth uses equally spaced (P-spline) knots over the training range, a
second-difference penalty and a sum-to-zero constraint over the training
rows, so the intercept stays identified. Outside the training range a smooth
continues linearly from its boundary value and slope.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import null_space

from ..errors import DataError
from .glm import GLM_FAMILIES, check_response, irls, pearson_dispersion

DEFAULT_BASIS = 6
DEFAULT_LAMBDA = 1.0
DEGREE = 3


@dataclass(frozen=True)
class SmoothTerm:
    lo: float
    hi: float
    knots: np.ndarray
    constraint: np.ndarray  # maps reduced coefficients to spline coefficients
    coef: np.ndarray | None = None

    @property
    def basis_size(self) -> int:
        return self.knots.size - DEGREE - 1

    def raw_basis(self, x):
        x = np.asarray(x, dtype=float)
        spline = BSpline(self.knots, np.eye(self.basis_size), DEGREE, extrapolate=True)
        xc = np.clip(x, self.lo, self.hi)
        B = spline(xc)
        outside = x != xc
        if np.any(outside):
            dB = spline.derivative()(xc[outside])
            B[outside] += (x[outside] - xc[outside])[:, None] * dB
        return B

    def basis(self, x):
        return self.raw_basis(x) @ self.constraint

    def penalty(self):
        D = np.diff(np.eye(self.basis_size), n=2, axis=0)
        return self.constraint.T @ D.T @ D @ self.constraint

    def evaluate(self, x):
        if self.coef is None:
            return np.zeros(np.asarray(x).shape[0])
        return self.basis(x) @ self.coef


def make_term(x, basis_size: int = DEFAULT_BASIS) -> SmoothTerm:
    if basis_size < DEGREE + 1:
        raise DataError("smooths need at least 4 basis functions")
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        hi = lo + 1.0
    nseg = basis_size - DEGREE
    dx = (hi - lo) / nseg
    knots = lo + dx * np.arange(-DEGREE, nseg + DEGREE + 1)
    term = SmoothTerm(lo, hi, knots, np.eye(basis_size))
    # identifiability: training-set sum of the smooth is zero
    col_sums = term.raw_basis(x).sum(axis=0)[None, :]
    return SmoothTerm(lo, hi, knots, null_space(col_sums))


@dataclass(frozen=True)
class GamFit:
    family: str
    intercept: float
    terms: tuple
    smoothing_lambda: float
    basis_size: int
    dispersion: float
    converged: bool
    iterations: int
    deviance_history: tuple = field(default=(), compare=False)
    link: str = "log"

    @property
    def n_features(self) -> int:
        return len(self.terms)

    def smooths(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[1] != self.n_features:
            raise DataError(f"expected {self.n_features} features, got {X.shape[1]}")
        return np.column_stack([t.evaluate(X[:, j]) for j, t in enumerate(self.terms)])


def fit_gam(scores, dy, family: str = "normal", smoothing_lambda: float = DEFAULT_LAMBDA,
            basis_size: int = DEFAULT_BASIS) -> GamFit:
    """Penalized IRLS for ``log E[dy] = b0 + sum_h f_h(score_h)``."""
    if family not in GLM_FAMILIES:
        raise DataError(f"family must be one of {GLM_FAMILIES}")
    if smoothing_lambda < 0:
        raise DataError("smoothing_lambda must be non-negative")
    y = check_response(dy)
    X = np.asarray(scores, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.size:
        raise DataError("scores and response lengths differ")
    terms = [make_term(X[:, j], basis_size) for j in range(X.shape[1])]
    blocks = [np.ones((y.size, 1))] + [t.basis(X[:, j]) for j, t in enumerate(terms)]
    design = np.hstack(blocks)
    sizes = [b.shape[1] for b in blocks]
    P = np.zeros((design.shape[1], design.shape[1]))
    start = 1
    for t, size in zip(terms, sizes[1:]):
        P[start:start + size, start:start + size] = smoothing_lambda * t.penalty()
        start += size
    beta, history, converged = irls(design, y, family, penalty=P)
    fitted_terms = []
    start = 1
    for t, size in zip(terms, sizes[1:]):
        fitted_terms.append(SmoothTerm(t.lo, t.hi, t.knots, t.constraint, beta[start:start + size].copy()))
        start += size
    mu = np.exp(design @ beta)
    # effective degrees of freedom of the penalized fit
    w = mu ** 2 if family == "normal" else np.ones_like(mu)
    XtWX = design.T @ (w[:, None] * design)
    edf = float(np.trace(np.linalg.solve(XtWX + P, XtWX)))
    phi = pearson_dispersion(family, y, mu, y.size - edf)
    return GamFit(family, float(beta[0]), tuple(fitted_terms), float(smoothing_lambda), basis_size,
                  phi, converged, len(history), tuple(history))


def predict_gam(fit: GamFit, scores) -> np.ndarray:
    return np.exp(fit.intercept + fit.smooths(scores).sum(axis=1))
