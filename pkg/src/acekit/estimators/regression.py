"""Face-value contrast and regression-based ACE estimators."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Union

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from acekit.core.models import AceEstimate, Dataset
from acekit.core.numkit import logistic_irls, ols
from acekit.estimators.outcome import OutcomeModel
from acekit.exceptions import DomainError, EmptyGroupError
from acekit.propensity import PropensityFunction

Adjustment = Union[
    None,
    PropensityFunction,
    Callable[[NDArray[np.float64]], NDArray[np.float64]],
    Sequence[int],
    Sequence[PropensityFunction],
]


def mean_difference(y: NDArray[np.float64], t: NDArray[np.int64]) -> tuple[float, float]:
    """Treated minus control mean of ``y`` and the two-sample variance of that difference."""
    y1, y0 = y[t == 1], y[t == 0]
    if y1.size == 0 or y0.size == 0:
        raise EmptyGroupError(
            f"both treatment arms need observations (n0={y0.size}, n1={y1.size})"
        )
    var1 = float(np.var(y1, ddof=1)) / y1.size if y1.size > 1 else 0.0
    var0 = float(np.var(y0, ddof=1)) / y0.size if y0.size > 1 else 0.0
    return float(np.mean(y1) - np.mean(y0)), var1 + var0


def face(data: Dataset) -> AceEstimate:
    """Face-value average causal effect: mean(Y | T=1) - mean(Y | T=0)."""
    estimate, variance = mean_difference(data.y, data.t)
    return AceEstimate(
        method="face",
        estimate=estimate,
        se=float(np.sqrt(variance)),
        diagnostics={"n1": int(data.treated.sum()), "n0": int(data.control.sum())},
    )


def adjustment_columns(data: Dataset, adjust: Adjustment) -> tuple[NDArray[np.float64], str]:
    """Columns to adjust for and a label describing them."""
    if adjust is None:
        return data.x, "x"
    if isinstance(adjust, PropensityFunction):
        return adjust.evaluate(data.x)[:, None], adjust.kind.value
    if callable(adjust):
        values = np.asarray(adjust(data.x), dtype=np.float64)
        return values.reshape(data.n, -1), getattr(adjust, "__name__", "custom")
    items = list(adjust)
    if all(isinstance(item, PropensityFunction) for item in items):
        columns = [item.evaluate(data.x) for item in items]
        label = "+".join(item.kind.value for item in items)
        return np.column_stack(columns) if columns else np.empty((data.n, 0)), label
    indices = [int(j) for j in items]
    if any(j < 0 or j >= data.p for j in indices):
        raise DomainError(f"covariate indices {indices} out of range for p={data.p}")
    return data.x[:, indices], "x[" + ",".join(str(j) for j in indices) + "]"


def regression_adjusted_ace(data: Dataset, adjust: Adjustment = None) -> AceEstimate:
    """Coefficient of T in the least-squares regression of Y on (1, T, adjustment).

    ``adjust`` is ``None`` for all covariates, a list of covariate indices, one or more
    propensity functions, or any callable mapping the covariate matrix to columns.
    """
    columns, label = adjustment_columns(data, adjust)
    design = np.column_stack([np.ones(data.n), data.t, columns])
    fit = ols(design, data.y)
    return AceEstimate(
        method="reg",
        estimate=float(fit.coef[1]),
        se=float(fit.se[1]),
        diagnostics={"adjust": label, "sigma2": fit.sigma2, "df_resid": fit.df_resid},
    )


def outcome_regression_ace(data: Dataset, m: OutcomeModel) -> AceEstimate:
    """Plug-in estimate n^-1 sum_i [m(1, X_i) - m(0, X_i)]."""
    diff = m.treated(data.x) - m.control(data.x)
    return AceEstimate(
        method="plugin",
        estimate=float(np.mean(diff)),
        se=None,
        diagnostics={"outcome_model": m.provenance.value},
    )


def logistic_adjusted_effect(
    data: Dataset,
    adjust: Adjustment = None,
    *,
    tol: float = 1e-10,
    max_iter: int = 100,
    separation_bound: float = 1e4,
) -> AceEstimate:
    """Log odds ratio of T from a logistic regression of binary Y on (1, T, adjustment)."""
    if not np.isin(data.y, (0.0, 1.0)).all():
        raise DomainError("logistic adjustment needs a binary (0/1) response")
    columns, label = adjustment_columns(data, adjust)
    design = np.column_stack([np.ones(data.n), data.t, columns])
    fit = logistic_irls(
        design, data.y, tol=tol, max_iter=max_iter, separation_bound=separation_bound
    )
    log_or = float(fit.coef[1])
    logger.debug(f"Logistic adjustment on {label}: log OR {log_or:.4f}, loglik {fit.loglik:.3f}")
    return AceEstimate(
        method="logit",
        estimate=log_or,
        se=float(fit.se[1]),
        diagnostics={
            "adjust": label,
            "odds_ratio": float(np.exp(log_or)),
            "loglik": fit.loglik,
            "converged": fit.converged,
            "iterations": fit.iterations,
        },
    )
