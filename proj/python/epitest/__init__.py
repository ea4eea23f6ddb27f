"""Testing-regime models for epidemic surveillance data."""

import json

from ._core import (
    ConfigError,
    DataError,
    DomainError,
    Error,
    SchemaError,
    estimate_prevalence,
    incidence,
    median_ci,
    onset_to_death_pmf,
    predict_deaths,
    prediction_error,
    simulate_csv,
    testing_function,
)
from . import _core

__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "Error",
    "SchemaError",
    "cross_validate",
    "estimate_prevalence",
    "incidence",
    "kruskal_wallis",
    "median_ci",
    "onset_to_death_pmf",
    "poisson_regress",
    "predict_deaths",
    "prediction_error",
    "simulate_csv",
    "testing_function",
    "wilcoxon_signed_rank",
]


def poisson_regress(counts, t, offset=()):
    """Poisson regression of counts on t with an optional log-exposure offset."""
    return json.loads(_core.poisson_regress_json(list(counts), list(t), list(offset)))


def wilcoxon_signed_rank(x, y, alternative="two_sided"):
    return json.loads(_core.wilcoxon_json(list(x), list(y), alternative))


def kruskal_wallis(groups):
    return json.loads(_core.kruskal_wallis_json([list(g) for g in groups]))


def cross_validate(path, model="up", folds=10, seed=0, schema="world", covariates=False):
    """Cross-validated death-prediction errors for one testing model, as a dict."""
    return json.loads(_core.cross_validate_json(str(path), model, folds, seed, schema, covariates))
