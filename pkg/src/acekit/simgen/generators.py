"""Observational and interventional data generation for every model family."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from scipy.special import expit

from acekit.core.models import (
    BinaryLogisticModel,
    Dataset,
    LogitNormalModel,
    NormalLinearModel,
    Regime,
)
from acekit.core.rng import SeededRng, mvn_sample
from acekit.estimators.closed_form import (
    ENUMERATE_MAX_P,
    logistic_ace_closed_form,
    logistic_ace_enumerate,
)
from acekit.exceptions import DomainError, EmptyGroupError, WrongShapeError

MAX_ASSIGNMENT_DRAWS = 1000


def _assign(
    draw: Callable[[], NDArray[np.int64]], n: int, regime: Regime, rng: SeededRng
) -> NDArray[np.int64]:
    """Treatment vector for ``regime``; observational draws are repeated until both arms occur."""
    fixed = regime.fixed_treatment
    if fixed is not None:
        return np.full(n, fixed, dtype=np.int64)
    t = draw()
    if n < 2:
        return t
    for attempt in range(1, MAX_ASSIGNMENT_DRAWS + 1):
        if 0 < t.sum() < n:
            return t
        logger.debug(
            f"Redrawing treatment (attempt {attempt}): empty arm for seed={rng.seed} "
            f"stream={rng.stream}"
        )
        t = draw()
    raise EmptyGroupError(f"treatment assignment left an arm empty {MAX_ASSIGNMENT_DRAWS} times")


def _normal_response(
    x: NDArray, t: NDArray, d: float, delta: float, b: list[float], phi: float, rng: SeededRng
) -> NDArray[np.float64]:
    noise = np.sqrt(phi) * rng.standard_normal(x.shape[0])
    return d + delta * t + x @ np.asarray(b, dtype=np.float64) + noise


def _check_n(n: int) -> None:
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")


def generate_normal(
    model: NormalLinearModel, n: int, regime: Regime, rng: SeededRng
) -> Dataset:
    """Normal covariates within each arm and a normal linear response.

    Under intervention T is fixed and X is drawn from the theta-mixture of the two
    arm distributions, so the covariate law matches the observational one.
    """
    _check_n(n)
    t = _assign(lambda: rng.bernoulli(model.theta, size=n), n, regime, rng)
    component = t if regime is Regime.OBSERVATIONAL else rng.bernoulli(model.theta, size=n)
    x = np.empty((n, model.p))
    for arm in (0, 1):
        rows = component == arm
        count = int(rows.sum())
        if count:
            x[rows] = mvn_sample(rng, model.mean(arm), model.cov(arm), count)
    y = _normal_response(x, t, model.d, model.delta, model.b, model.phi, rng)
    return Dataset(x=x, t=t, y=y)


def generate_logistic(
    model: BinaryLogisticModel, n: int, regime: Regime, rng: SeededRng
) -> Dataset:
    """Independent Bernoulli covariates, logistic assignment and a logistic binary response."""
    _check_n(n)
    pi = np.broadcast_to(np.asarray(model.pi, dtype=np.float64), (n, model.p))
    x = rng.bernoulli(pi).astype(np.float64)
    ps = expit(model.c + x @ np.asarray(model.a, dtype=np.float64))
    t = _assign(lambda: rng.bernoulli(ps), n, regime, rng)
    eta = model.d + model.delta * t + x @ np.asarray(model.b, dtype=np.float64)
    y = rng.bernoulli(expit(eta)).astype(np.float64)
    return Dataset(x=x, t=t, y=y)


def generate_logit_normal(
    model: LogitNormalModel, n: int, regime: Regime, rng: SeededRng
) -> Dataset:
    """Normal covariates, logistic assignment and a normal linear response."""
    _check_n(n)
    x = mvn_sample(rng, model.mean, model.cov, n)
    ps = expit(model.c + x @ np.asarray(model.a, dtype=np.float64))
    t = _assign(lambda: rng.bernoulli(ps), n, regime, rng)
    y = _normal_response(x, t, model.d, model.delta, model.b, model.phi, rng)
    return Dataset(x=x, t=t, y=y)


def generate(
    model: NormalLinearModel | BinaryLogisticModel | LogitNormalModel,
    n: int,
    regime: Regime,
    rng: SeededRng,
) -> Dataset:
    """Dispatch to the generator of the model's family."""
    if isinstance(model, NormalLinearModel):
        return generate_normal(model, n, regime, rng)
    if isinstance(model, BinaryLogisticModel):
        return generate_logistic(model, n, regime, rng)
    if isinstance(model, LogitNormalModel):
        return generate_logit_normal(model, n, regime, rng)
    raise DomainError(f"no generator for {type(model).__name__}")


def true_ace(
    model: NormalLinearModel | BinaryLogisticModel | LogitNormalModel,
    *,
    max_p: int = ENUMERATE_MAX_P,
) -> float:
    """Average causal effect implied by the model.

    A general logistic model is enumerated over its 2^p covariate patterns, up to ``max_p``.
    """
    if isinstance(model, BinaryLogisticModel):
        try:
            return logistic_ace_closed_form(model)
        except WrongShapeError:
            return logistic_ace_enumerate(model, max_p=max_p)
    return model.delta
