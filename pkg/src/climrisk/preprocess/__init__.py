"""Detrending, design matrices and dimensionality reduction."""
from .design import MODEL_SPECS, SINGLE_VARIABLE_SPECS, DesignMatrix, ModelSpec, build_design_matrix, get_spec
from .detrend import DetrendResult, gated_detrend, linear_detrend, no_detrend
from .reduce import PcResult, fpca, pca, reduce

__all__ = [
    "MODEL_SPECS", "SINGLE_VARIABLE_SPECS", "DesignMatrix", "ModelSpec", "build_design_matrix", "get_spec",
    "DetrendResult", "gated_detrend", "linear_detrend", "no_detrend", "PcResult", "fpca", "pca", "reduce",
]
