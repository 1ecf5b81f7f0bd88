"""Statistical primitives shared by the yield and pricing pipelines."""
from ._common import HypothesisResult
from .anderson import ad_two_sample
from .correlation import ecdf, spearman_rho
from .distributions import (
    FAMILIES,
    DistributionFit,
    fit_distribution,
    sample_from_fit,
    select_best_distribution,
)
from .unitroot import adf_test

__all__ = [
    "HypothesisResult", "ad_two_sample", "ecdf", "spearman_rho", "FAMILIES", "DistributionFit",
    "fit_distribution", "sample_from_fit", "select_best_distribution", "adf_test",
]
