"""Principal component reducers: plain PCA and FPCA on a cubic B-spline basis.

Both return a :class:`PcResult` holding exactly ``n_components`` score columns.
Sign convention: every loading vector (PCA) or eigenfunction sampled on the
grid (FPCA) has its largest-magnitude entry positive.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline

from ..errors import DataError, DegenerateError
from ..ingest import atomic_write_text
from .design import DesignMatrix, matrix_from_array

N_COMPONENTS = 4
MAX_BASIS = 12
SPLINE_DEGREE = 3


@dataclass(frozen=True)
class PcResult:
    scores: np.ndarray
    explained_ratio: np.ndarray
    explained_ratio_all: np.ndarray
    basis: str
    components: np.ndarray
    center: np.ndarray
    scale: np.ndarray
    basis_size: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def explained_total(self) -> float:
        return float(np.sum(self.explained_ratio))

    def to_files(self, scores_path, years=None) -> None:
        """Scores as CSV plus a JSON sidecar next to it (``<name>.json``)."""
        k = self.scores.shape[1]
        lines = ["year," + ",".join(f"PC{j + 1}" for j in range(k))]
        rows = np.arange(self.scores.shape[0]) if years is None else years
        for y, row in zip(rows, self.scores):
            lines.append(f"{y}," + ",".join(repr(float(v)) for v in row))
        atomic_write_text(scores_path, "\n".join(lines) + "\n")
        sidecar = {
            "basis": self.basis,
            "explained_ratio": [float(v) for v in self.explained_ratio],
            "explained_ratio_all": [float(v) for v in self.explained_ratio_all],
            "basis_size": self.basis_size,
            "sign_convention": "largest-magnitude loading positive",
            **self.meta,
        }
        atomic_write_text(str(scores_path).rsplit(".", 1)[0] + ".json", json.dumps(sidecar, indent=2))


def _as_matrix(X) -> np.ndarray:
    values = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
    if values.ndim != 2:
        raise DataError("expected a two-dimensional matrix")
    if not np.all(np.isfinite(values)):
        raise DataError("matrix has missing or non-finite cells")
    return values


def standardize_columns(values):
    """Center and scale to unit sample variance; constant columns are rejected."""
    mean = values.mean(axis=0)
    sd = values.std(axis=0, ddof=1)
    tol = 1e-12 * np.maximum(1.0, np.abs(mean))
    const = np.flatnonzero(sd <= tol)
    if const.size:
        raise DegenerateError(f"constant column(s) {const.tolist()} cannot be standardized")
    return (values - mean) / sd, mean, sd


def _fix_signs(vectors, reference=None):
    """Flip columns so the largest-magnitude entry of ``reference`` (default: the vectors) is positive."""
    ref = vectors if reference is None else reference
    idx = np.argmax(np.abs(ref), axis=0)
    signs = np.where(ref[idx, np.arange(ref.shape[1])] < 0, -1.0, 1.0)
    return vectors * signs, signs


def _check_components(n, available, n_components):
    if n_components < 1:
        raise DataError("n_components must be positive")
    if n <= n_components:
        raise DataError(f"need more than {n_components} observations, got {n}")
    if available < n_components:
        raise DataError(f"only {available} components available, {n_components} requested")


def pca(X, n_components: int = N_COMPONENTS) -> PcResult:
    """PCA of the standardized matrix via SVD.

    Scores are ``Z V_k``; explained ratios are the covariance eigenvalues
    over their total.
    """
    values = _as_matrix(X)
    n, p = values.shape
    _check_components(n, min(n, p), n_components)
    Z, mean, sd = standardize_columns(values)
    _, s, vt = np.linalg.svd(Z, full_matrices=False)
    eig = s ** 2 / (n - 1)
    total = eig.sum()
    if not total > 0:
        raise DegenerateError("degenerate covariance")
    V, _ = _fix_signs(vt.T)
    return PcResult(
        scores=Z @ V[:, :n_components],
        explained_ratio=(eig / total)[:n_components],
        explained_ratio_all=eig / total,
        basis="pca",
        components=V[:, :n_components],
        center=mean,
        scale=sd,
        meta={"standardized": True},
    )


# ---------------------------------------------------------------------------
# FPCA

def bspline_knots(basis_size: int, lo: float = 0.0, hi: float = 1.0, degree: int = SPLINE_DEGREE):
    """Clamped knot vector with equally spaced interior knots."""
    interior = np.linspace(lo, hi, basis_size - degree + 1)
    return np.concatenate([np.full(degree, lo), interior, np.full(degree, hi)])


def bspline_gram(knots, degree: int = SPLINE_DEGREE, deriv: int = 0):
    """Integrals of products of basis functions (or their derivatives), by Gauss-Legendre
    quadrature on each knot span (exact for the polynomial degree involved)."""
    nb = knots.size - degree - 1
    nodes, weights = leggauss(degree + 1)
    spans = np.unique(knots)
    x, w = [], []
    for a, b in zip(spans[:-1], spans[1:]):
        x.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        w.append(0.5 * (b - a) * weights)
    x, w = np.concatenate(x), np.concatenate(w)
    spline = BSpline(knots, np.eye(nb), degree)
    if deriv:
        spline = spline.derivative(deriv)
    B = spline(x)
    return (B * w[:, None]).T @ B


def fpca(X, n_components: int = N_COMPONENTS, basis_size: int | None = None,
         penalty: float = 0.0, standardize: bool = True) -> PcResult:
    """Functional PCA treating each row as a curve on an equally spaced grid.

    Rows are projected on a cubic B-spline basis by (penalized) least squares;
    the coefficient covariance is then decomposed in the metric of the basis
    Gram matrix, i.e. the eigenproblem of ``W^1/2 S W^1/2``.
    """
    values = _as_matrix(X)
    n, p = values.shape
    if p < SPLINE_DEGREE + 1:
        raise DataError(f"grid of {p} points too short for a cubic basis")
    if basis_size is None:
        basis_size = min(p, MAX_BASIS)
    if basis_size < SPLINE_DEGREE + 1:
        raise DataError("basis_size must be at least 4 for cubic splines")
    if basis_size > p:
        raise DataError(f"basis_size {basis_size} exceeds grid length {p}")
    _check_components(n, basis_size, n_components)
    if np.all(np.ptp(values, axis=0) == 0):
        raise DegenerateError("degenerate covariance: all curves identical")

    if standardize:
        data, mean, sd = standardize_columns(values)
    else:
        mean, sd = values.mean(axis=0), np.ones(p)
        data = values - mean

    grid = np.linspace(0.0, 1.0, p)
    knots = bspline_knots(basis_size)
    Phi = BSpline.design_matrix(grid, knots, SPLINE_DEGREE).toarray()
    lhs = Phi.T @ Phi
    if penalty > 0:
        lhs = lhs + penalty * bspline_gram(knots, deriv=2)
    coef = np.linalg.solve(lhs, Phi.T @ data.T).T
    coef = coef - coef.mean(axis=0)

    W = bspline_gram(knots)
    wval, wvec = np.linalg.eigh(W)
    W_half = (wvec * np.sqrt(wval)) @ wvec.T
    W_ihalf = (wvec / np.sqrt(wval)) @ wvec.T
    S = coef.T @ coef / (n - 1)
    M = W_half @ S @ W_half
    M = 0.5 * (M + M.T)
    lam, U = np.linalg.eigh(M)
    order = np.argsort(lam)[::-1]
    lam = np.clip(lam[order], 0.0, None)
    U = U[:, order]
    total = lam.sum()
    if not total > 1e-14 * max(1.0, float(np.trace(W_half @ W_half))):
        raise DegenerateError("degenerate covariance")

    B = W_ihalf @ U
    _, signs = _fix_signs(B, Phi @ B)
    B = B * signs
    U = U * signs
    scores = coef @ W_half @ U[:, :n_components]
    ratio = lam / total
    return PcResult(
        scores=scores,
        explained_ratio=ratio[:n_components],
        explained_ratio_all=ratio,
        basis="fpca",
        components=B[:, :n_components],
        center=mean,
        scale=sd,
        basis_size=basis_size,
        meta={"standardized": standardize, "penalty": penalty, "knots": knots.tolist()},
    )


def reduce(X, method: str, n_components: int = N_COMPONENTS, basis_size: int | None = None) -> PcResult:
    if method == "pca":
        return pca(X, n_components)
    if method == "fpca":
        return fpca(X, n_components, basis_size)
    raise DataError(f"unknown reducer {method!r}")


__all__ = ["PcResult", "pca", "fpca", "reduce", "standardize_columns", "matrix_from_array",
           "bspline_knots", "bspline_gram"]
