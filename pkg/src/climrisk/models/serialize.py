"""JSON persistence for fitted models.

Floats are written with their shortest round-tripping representation, so a
saved and reloaded model predicts bit-identically.
"""
from __future__ import annotations

import json

import numpy as np

from ..errors import DataError
from ..ingest import atomic_write_text
from .gam import GamFit, SmoothTerm
from .gbt import GbtEnsemble, Tree
from .glm import GlmFit

FORMAT_VERSION = 1


def _arr(a):
    return np.asarray(a).tolist()


def model_to_dict(model) -> dict:
    if isinstance(model, GlmFit):
        body = {"kind": "glm", "family": model.family, "link": model.link, "beta": _arr(model.beta),
                "dispersion": model.dispersion, "converged": model.converged,
                "iterations": model.iterations, "deviance_history": list(model.deviance_history)}
    elif isinstance(model, GamFit):
        body = {"kind": "gam", "family": model.family, "link": model.link, "intercept": model.intercept,
                "smoothing_lambda": model.smoothing_lambda, "basis_size": model.basis_size,
                "dispersion": model.dispersion, "converged": model.converged,
                "iterations": model.iterations, "deviance_history": list(model.deviance_history),
                "terms": [{"lo": t.lo, "hi": t.hi, "knots": _arr(t.knots), "constraint": _arr(t.constraint),
                           "coef": _arr(t.coef)} for t in model.terms]}
    elif isinstance(model, GbtEnsemble):
        body = {"kind": "gbt", "base_score": model.base_score, "learning_rate": model.learning_rate,
                "max_depth": model.max_depth, "n_estimators": model.n_estimators,
                "reg_lambda": model.reg_lambda, "reg_gamma": model.reg_gamma, "growth": model.growth,
                "n_features": model.n_features, "min_child_samples": model.min_child_samples,
                "degenerate": model.degenerate, "objective_history": list(model.objective_history),
                "trees": [{"feature": _arr(t.feature), "threshold": _arr(t.threshold), "left": _arr(t.left),
                           "right": _arr(t.right), "value": _arr(t.value)} for t in model.trees]}
    else:
        raise DataError(f"cannot serialize {type(model).__name__}")
    return {"format_version": FORMAT_VERSION, **body}


def model_from_dict(doc: dict):
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version!r}")
    kind = doc.get("kind")
    if kind == "glm":
        return GlmFit(doc["family"], np.array(doc["beta"], dtype=float), doc["dispersion"], doc["converged"],
                      doc["iterations"], tuple(doc["deviance_history"]), doc["link"])
    if kind == "gam":
        terms = tuple(SmoothTerm(t["lo"], t["hi"], np.array(t["knots"], dtype=float),
                                 np.array(t["constraint"], dtype=float), np.array(t["coef"], dtype=float))
                      for t in doc["terms"])
        return GamFit(doc["family"], doc["intercept"], terms, doc["smoothing_lambda"], doc["basis_size"],
                      doc["dispersion"], doc["converged"], doc["iterations"], tuple(doc["deviance_history"]),
                      doc["link"])
    if kind == "gbt":
        trees = tuple(Tree(np.array(t["feature"], dtype=np.int64), np.array(t["threshold"], dtype=float),
                           np.array(t["left"], dtype=np.int64), np.array(t["right"], dtype=np.int64),
                           np.array(t["value"], dtype=float)) for t in doc["trees"])
        return GbtEnsemble(trees=trees, base_score=doc["base_score"], learning_rate=doc["learning_rate"],
                           max_depth=doc["max_depth"], n_estimators=doc["n_estimators"],
                           reg_lambda=doc["reg_lambda"], reg_gamma=doc["reg_gamma"], growth=doc["growth"],
                           n_features=doc["n_features"], min_child_samples=doc["min_child_samples"],
                           degenerate=doc["degenerate"], objective_history=tuple(doc["objective_history"]))
    raise DataError(f"unknown model kind {kind!r}")


def dumps(model) -> str:
    return json.dumps(model_to_dict(model))


def loads(text: str):
    return model_from_dict(json.loads(text))


def save_model(model, path) -> None:
    atomic_write_text(path, dumps(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
