"""Yield models: log-link GLM, P-spline GAM and boosted regression trees."""
from .gam import GamFit, SmoothTerm, fit_gam, predict_gam
from .gbt import GROWTH, GbtEnsemble, Tree, fit_gbt, predict_gbt
from .glm import GLM_FAMILIES, GlmFit, fit_glm, predict_glm
from .serialize import FORMAT_VERSION, dumps, load_model, loads, save_model

__all__ = [
    "GlmFit", "fit_glm", "predict_glm", "GLM_FAMILIES",
    "GamFit", "SmoothTerm", "fit_gam", "predict_gam",
    "GbtEnsemble", "Tree", "fit_gbt", "predict_gbt", "GROWTH",
    "FORMAT_VERSION", "dumps", "loads", "save_model", "load_model",
]
