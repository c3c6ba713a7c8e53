"""Outcome models m(t, x) used for augmentation and plug-in estimation."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit

from acekit.core.models import (
    BinaryLogisticModel,
    Dataset,
    LogitNormalModel,
    NormalLinearModel,
)
from acekit.core.numkit import ols
from acekit.exceptions import EmptyGroupError

ArmFunction = Callable[[NDArray[np.float64]], NDArray[np.float64]]


class OutcomeProvenance(str, Enum):
    FITTED_JOINT = "FittedJoint"
    FITTED_PER_ARM = "FittedPerArm"
    KNOWN = "Known"
    ZERO = "Zero"
    OPTIMAL_BLEND = "OptimalBlend"


@dataclass(frozen=True)
class LinearArm:
    """x -> intercept + coef'x[:, columns], optionally passed through expit."""

    intercept: float
    coef: NDArray[np.float64]
    columns: tuple[int, ...] | None = None
    logistic: bool = False

    def __call__(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        x = np.atleast_2d(x)
        if self.columns is not None:
            x = x[:, list(self.columns)]
        value = self.intercept + x @ self.coef
        return expit(value) if self.logistic else value


@dataclass(frozen=True)
class BlendArm:
    """(1 - pi(x)) m1(x) + pi(x) m0(x)."""

    ps: Callable[[NDArray[np.float64]], NDArray[np.float64]]
    m1: ArmFunction
    m0: ArmFunction

    def __call__(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        pi = self.ps(x)
        return (1.0 - pi) * self.m1(x) + pi * self.m0(x)


@dataclass(frozen=True)
class OutcomeModel:
    """m(t, x) as one function per treatment arm."""

    provenance: OutcomeProvenance
    treated: ArmFunction
    control: ArmFunction
    details: dict = field(default_factory=dict, compare=False)

    @classmethod
    def shared(
        cls, arm: ArmFunction, provenance: OutcomeProvenance, **details
    ) -> OutcomeModel:
        """A model that ignores t and uses ``arm`` for both treatment values."""
        return cls(provenance=provenance, treated=arm, control=arm, details=details)

    def __call__(self, t: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.broadcast_to(np.asarray(t), (x.shape[0],))
        return np.where(t == 1, self.treated(x), self.control(x))


def _columns(data: Dataset, covariates: Sequence[int] | None) -> tuple[int, ...]:
    return tuple(range(data.p)) if covariates is None else tuple(int(j) for j in covariates)


def fit_joint(data: Dataset, covariates: Sequence[int] | None = None) -> OutcomeModel:
    """One regression of Y on (1, T, X); the arms differ only by the T coefficient."""
    columns = _columns(data, covariates)
    design = np.column_stack([np.ones(data.n), data.t, data.x[:, list(columns)]])
    fit = ols(design, data.y)
    slope = fit.coef[2:]
    return OutcomeModel(
        provenance=OutcomeProvenance.FITTED_JOINT,
        treated=LinearArm(float(fit.coef[0] + fit.coef[1]), slope, columns),
        control=LinearArm(float(fit.coef[0]), slope, columns),
        details={"coef": fit.coef.tolist(), "columns": list(columns)},
    )


def fit_per_arm(data: Dataset, covariates: Sequence[int] | None = None) -> OutcomeModel:
    """Separate regressions of Y on (1, X) within each treatment arm."""
    columns = _columns(data, covariates)
    arms = {}
    for t, mask in ((1, data.treated), (0, data.control)):
        if not mask.any():
            raise EmptyGroupError(f"no observations with T={t} to fit its outcome model")
        design = np.column_stack([np.ones(int(mask.sum())), data.x[mask][:, list(columns)]])
        fit = ols(design, data.y[mask])
        arms[t] = LinearArm(float(fit.coef[0]), fit.coef[1:], columns)
        logger.debug(f"Per-arm outcome fit T={t}: coef={np.round(fit.coef, 4).tolist()}")
    return OutcomeModel(
        provenance=OutcomeProvenance.FITTED_PER_ARM,
        treated=arms[1],
        control=arms[0],
        details={"columns": list(columns)},
    )


def known_outcome_model(
    model: NormalLinearModel | LogitNormalModel | BinaryLogisticModel,
) -> OutcomeModel:
    """E(Y | T = t, X = x) under the generative model."""
    b = np.asarray(model.b, dtype=np.float64)
    logistic = isinstance(model, BinaryLogisticModel)
    return OutcomeModel(
        provenance=OutcomeProvenance.KNOWN,
        treated=LinearArm(model.d + model.delta, b, logistic=logistic),
        control=LinearArm(model.d, b, logistic=logistic),
    )


def zero() -> OutcomeModel:
    return constant(0.0, provenance=OutcomeProvenance.ZERO)


def constant(value: float, provenance: OutcomeProvenance = OutcomeProvenance.KNOWN) -> OutcomeModel:
    """m(t, x) = value for every t and x; a deliberately wrong model unless the truth is flat."""
    arm = LinearArm(float(value), np.zeros(0), columns=())
    return OutcomeModel.shared(arm, provenance, value=value)


def optimal_m(
    ps: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    m1: ArmFunction,
    m0: ArmFunction,
) -> OutcomeModel:
    """The augmentation (1 - pi) m1 + pi m0 that minimises the AIPW variance.

    ``ps`` maps covariates to probabilities, for example ``PropensityFunction.evaluate``.
    """
    return OutcomeModel.shared(BlendArm(ps, m1, m0), OutcomeProvenance.OPTIMAL_BLEND)
