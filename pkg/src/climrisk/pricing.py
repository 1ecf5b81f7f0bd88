"""Uncapped call options on climate indexes.

Historical Burn Analysis (HBA) prices a contract as the mean of the payoffs it
would have paid in past years; Index Modeling (IM) fits a parametric
distribution to the index and averages payoffs over simulated values. Both
use the strike ``mean + 0.2 * sd`` of the historical (possibly detrended)
index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DataError, DegenerateError
from .ingest import atomic_write_text
from .preprocess import gated_detrend, linear_detrend
from .stats import (FAMILIES, DistributionFit, HypothesisResult, ad_two_sample, sample_from_fit,
                    select_best_distribution, spearman_rho)
from .stats._common import as_series

MIN_SERIES = 10
STRIKE_SD_FACTOR = 0.2
DEFAULT_ALPHA = 100.0
DEFAULT_SIMS = 1000


@dataclass(frozen=True)
class OptionContract:
    index_series: np.ndarray
    years: np.ndarray
    tick_alpha: float = DEFAULT_ALPHA
    strike: float | None = None
    name: str = ""

    def __post_init__(self):
        series = as_series(self.index_series, "index series", MIN_SERIES)
        years = np.asarray(self.years, dtype=int)
        if years.shape != series.shape:
            raise DataError("years and index values differ in length")
        if not self.tick_alpha > 0:
            raise DataError("tick size must be positive")
        object.__setattr__(self, "index_series", series)
        object.__setattr__(self, "years", years)

    @classmethod
    def from_series(cls, values, years=None, tick_alpha=DEFAULT_ALPHA, name=""):
        values = np.asarray(values, dtype=float)
        if years is None:
            years = np.arange(1, values.size + 1)
        return cls(values, np.asarray(years), tick_alpha, None, name)


@dataclass(frozen=True)
class PricingReport:
    name: str
    years: np.ndarray
    index_used: np.ndarray  # series after optional detrending
    detrended: bool
    strike: float
    tick_alpha: float
    payoffs_hba: np.ndarray
    fair_price_hba: float
    fit: DistributionFit | None = None
    payoffs_im: np.ndarray | None = None
    fair_price_im: float | None = None
    seed: object = None
    discount: float = 1.0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        fit = None
        if self.fit is not None:
            fit = {"family": self.fit.family, "params": [float(p) for p in self.fit.params],
                   "fit_score": self.fit.fit_score, "loglik": self.fit.loglik,
                   "support_shift": self.fit.support_shift, "support_scale": self.fit.support_scale}
        return {
            "name": self.name,
            "strike": self.strike,
            "tick_alpha": self.tick_alpha,
            "detrended": self.detrended,
            "fair_price_hba": self.fair_price_hba,
            "fair_price_im": self.fair_price_im,
            "n_sims": None if self.payoffs_im is None else int(self.payoffs_im.size),
            "fit": fit,
            "seed": seed_repr(self.seed),
            "discount": self.discount,
            **self.meta,
        }


def seed_repr(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": int(seed.entropy), "spawn_key": list(seed.spawn_key)}
    return seed


def contract_seeds(seed, n: int) -> list[np.random.SeedSequence]:
    """Independent sub-seeds, one per contract, derived from a single run seed."""
    return np.random.SeedSequence(seed).spawn(n)


def fair_strike(series) -> float:
    x = as_series(series, "index series", MIN_SERIES)
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise DegenerateError("index series is constant; strike undefined")
    return float(np.mean(x)) + STRIKE_SD_FACTOR * sd


def call_payoff(i, k, alpha):
    """``alpha * max(i - k, 0)``; scalar in, float out."""
    if not np.all(np.asarray(alpha) > 0):
        raise DataError("tick size must be positive")
    out = alpha * np.maximum(np.asarray(i, dtype=float) - k, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def _prepare(contract: OptionContract, detrend):
    """Index series used for pricing, and whether it was detrended."""
    y = contract.index_series
    if detrend is True or detrend == "on":
        return linear_detrend(y, run_adf=False).dy, True
    if detrend is False or detrend in ("off", None):
        return y, False
    if detrend == "auto":
        res = gated_detrend(y)
        return res.dy, res.applied
    raise ConfigError(f"detrend must be one of auto/on/off, got {detrend!r}")


def hba_price(contract: OptionContract, detrend=False, discount: float = 1.0) -> PricingReport:
    """Fair price as the (discounted) mean of historically realized payoffs."""
    series, applied = _prepare(contract, detrend)
    strike = fair_strike(series) if contract.strike is None else float(contract.strike)
    payoffs = call_payoff(series, strike, contract.tick_alpha)
    price = float(np.mean(payoffs))
    if discount != 1.0:
        price *= discount
    return PricingReport(contract.name, contract.years, series, applied, strike, contract.tick_alpha,
                         payoffs, price, discount=discount)


def im_price(contract: OptionContract, families=FAMILIES, n_sims: int = DEFAULT_SIMS, seed=0,
             detrend=False, discount: float = 1.0) -> PricingReport:
    """Fair price as the mean payoff over ``n_sims`` values simulated from the best-fitting family.

    The returned report also carries the HBA payoffs on the same series and strike.
    """
    if n_sims < 1:
        raise DataError("n_sims must be positive")
    base = hba_price(contract, detrend, discount)
    fit = select_best_distribution(base.index_used, tuple(families))
    sims = sample_from_fit(fit, n_sims, seed)
    payoffs = call_payoff(sims, base.strike, contract.tick_alpha)
    price = float(np.mean(payoffs))
    if discount != 1.0:
        price *= discount
    return replace(base, fit=fit, payoffs_im=payoffs, fair_price_im=price, seed=seed)


@dataclass(frozen=True)
class PayoffComparison:
    rho: float
    ad: HypothesisResult
    ad_im: HypothesisResult | None = None


def compare_payoffs(a: PricingReport, b: PricingReport) -> PayoffComparison:
    """Spearman correlation and A-D test of yearly HBA payoffs; A-D on simulated payoffs when both have them."""
    if a.years.shape != b.years.shape or np.any(a.years != b.years):
        raise DataError("payoff series cover different years")
    rho = spearman_rho(a.payoffs_hba, b.payoffs_hba)
    ad = ad_two_sample(a.payoffs_hba, b.payoffs_hba)
    ad_im = None
    if a.payoffs_im is not None and b.payoffs_im is not None:
        ad_im = ad_two_sample(a.payoffs_im, b.payoffs_im)
    return PayoffComparison(rho, ad, ad_im)


def write_pricing_report(report: PricingReport, path) -> None:
    atomic_write_text(path, json.dumps(report.to_dict(), indent=2) + "\n")


def write_payoffs(report: PricingReport, path) -> None:
    lines = ["year,index,payoff"]
    lines += [f"{int(y)},{float(i)!r},{float(p)!r}"
              for y, i, p in zip(report.years, report.index_used, report.payoffs_hba)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_simulated_payoffs(report: PricingReport, path) -> None:
    if report.payoffs_im is None:
        raise DataError("report has no simulated payoffs")
    lines = ["sim,payoff"] + [f"{j},{float(p)!r}" for j, p in enumerate(report.payoffs_im, start=1)]
    atomic_write_text(path, "\n".join(lines) + "\n")


__all__ = ["OptionContract", "PricingReport", "PayoffComparison", "fair_strike", "call_payoff", "hba_price",
           "im_price", "compare_payoffs", "contract_seeds", "write_pricing_report", "write_payoffs",
           "write_simulated_payoffs", "DEFAULT_ALPHA", "DEFAULT_SIMS"]
