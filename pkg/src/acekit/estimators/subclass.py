"""Subclassification on a scalar score."""

from __future__ import annotations

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from acekit.core.models import AceEstimate, Dataset
from acekit.estimators.regression import mean_difference
from acekit.exceptions import DomainError, EmptySubclassArmError
from acekit.propensity import PropensityFunction


def strata(score: ArrayLike, k: int) -> list[np.ndarray]:
    """Row indices of ``k`` equal-count strata ordered by score.

    Ties are broken by row index; the first ``n % k`` strata hold one extra unit.
    Indices within each stratum are in ascending row order.
    """
    score = np.asarray(score, dtype=np.float64)
    n = score.shape[0]
    if k < 1 or k > n:
        raise DomainError(f"subclass count must lie in [1, {n}], got {k}")
    order = np.lexsort((np.arange(n), score))
    return [np.sort(block) for block in np.array_split(order, k)]


def subclassification_ace(
    data: Dataset, score: PropensityFunction | ArrayLike, k: int = 5
) -> AceEstimate:
    """Average of within-stratum mean differences, each stratum weighted 1/k."""
    values = score.evaluate(data.x) if isinstance(score, PropensityFunction) else score
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (data.n,):
        raise DomainError(f"score must have one value per row, got shape {values.shape}")

    effects = []
    variance = 0.0
    sizes = []
    for j, rows in enumerate(strata(values, k)):
        t = data.t[rows]
        n1 = int(t.sum())
        if n1 == 0 or n1 == rows.size:
            missing = "treated" if n1 == 0 else "control"
            raise EmptySubclassArmError(
                f"subclass {j + 1} of {k} has no {missing} units", stratum=j
            )
        effect, var = mean_difference(data.y[rows], t)
        effects.append(effect)
        variance += var
        sizes.append({"n": int(rows.size), "n1": n1})
    logger.debug(f"Subclass effects: {np.round(effects, 4).tolist()}")
    return AceEstimate(
        method="subclass",
        estimate=float(np.mean(effects)),
        se=float(np.sqrt(variance)) / k,
        diagnostics={"k": k, "strata": sizes, "effects": effects},
    )
