"""Propensity scores and propensity variables: LD, QD and logistic estimates.

A propensity object is stored as ``intercept + linear'x + x'Qx``; probability kinds
pass that score through the logistic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, model_validator
from scipy.special import expit, logit

from acekit.core.models import (
    BinaryLogisticModel,
    Dataset,
    LogitNormalModel,
    NormalLinearModel,
)
from acekit.core.numkit import logdet_spd, logistic_irls, solve_spd
from acekit.exceptions import (
    DomainError,
    EmptyGroupError,
    InsufficientGroupSizeError,
    WrongShapeError,
)


class PropensityKind(str, Enum):
    PS = "PS"
    LD = "LD"
    QD = "QD"
    ESTIMATED_PS = "EstimatedPS"
    ESTIMATED_LD = "EstimatedLD"
    ESTIMATED_QD = "EstimatedQD"

    @property
    def is_probability(self) -> bool:
        return self in (PropensityKind.PS, PropensityKind.ESTIMATED_PS)

    @property
    def is_linear(self) -> bool:
        return self in (PropensityKind.LD, PropensityKind.ESTIMATED_LD)


class PropensityFunction(BaseModel):
    """A scored mapping x -> value used as the adjustment variable."""

    model_config = {"frozen": True}

    kind: PropensityKind
    intercept: float = 0.0
    linear: list[float]
    quad: list[list[float]]

    @model_validator(mode="after")
    def _check(self) -> PropensityFunction:
        p = len(self.linear)
        quad = np.asarray(self.quad, dtype=float).reshape(p, p) if p else np.zeros((0, 0))
        if len(self.quad) != p or quad.shape != (p, p):
            raise ValueError(f"quadratic matrix must be {p}x{p}")
        if not np.allclose(quad, quad.T, rtol=0.0, atol=1e-12):
            raise ValueError("quadratic matrix must be symmetric")
        if self.kind.is_linear and np.any(quad != 0.0):
            raise ValueError(f"{self.kind.value} must have a zero quadratic part")
        return self

    @classmethod
    def constant(cls, prob: float, p: int) -> PropensityFunction:
        """The propensity score that equals ``prob`` everywhere."""
        if not 0.0 <= prob <= 1.0:
            raise DomainError(f"constant propensity must lie in [0, 1], got {prob}")
        return cls(
            kind=PropensityKind.PS,
            intercept=float(logit(prob)),
            linear=[0.0] * p,
            quad=[[0.0] * p for _ in range(p)],
        )

    @property
    def p(self) -> int:
        return len(self.linear)

    @property
    def is_probability(self) -> bool:
        return self.kind.is_probability

    @cached_property
    def linear_array(self) -> NDArray[np.float64]:
        return np.asarray(self.linear, dtype=np.float64)

    @cached_property
    def quad_array(self) -> NDArray[np.float64]:
        return np.asarray(self.quad, dtype=np.float64).reshape(self.p, self.p)

    def score(self, x: ArrayLike) -> NDArray[np.float64]:
        """``intercept + linear'x + x'Qx`` for each row of ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        value = self.intercept + x @ self.linear_array
        if self.kind.is_linear:
            return value
        return value + np.einsum("ij,jk,ik->i", x, self.quad_array, x)

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64]:
        """Value of the propensity object; a probability for PS kinds."""
        value = self.score(x)
        return expit(value) if self.is_probability else value

    def to_document(self) -> dict:
        return self.model_dump(mode="json")

    @classmethod
    def from_document(cls, document: dict) -> PropensityFunction:
        return cls.model_validate(document)


@dataclass(frozen=True)
class GroupMoments:
    """Treated fraction, per-arm means and covariances, and the pooled dispersion."""

    theta: float
    mu0: NDArray[np.float64]
    mu1: NDArray[np.float64]
    sigma0: NDArray[np.float64]
    sigma1: NDArray[np.float64]
    pooled: NDArray[np.float64]
    n0: int | None = None
    n1: int | None = None

    @classmethod
    def from_model(cls, model: NormalLinearModel) -> GroupMoments:
        sigma0, sigma1 = model.cov(0), model.cov(1)
        return cls(
            theta=model.theta,
            mu0=model.mean(0),
            mu1=model.mean(1),
            sigma0=sigma0,
            sigma1=sigma1,
            pooled=(1.0 - model.theta) * sigma0 + model.theta * sigma1,
        )


def ps_from_lambda(lam: float, theta: float) -> float:
    """Propensity score from the likelihood ratio q1(x)/q0(x) and the prior theta."""
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if not lam > 0.0:
        raise DomainError(f"likelihood ratio must be positive, got {lam}")
    if math.isinf(lam):
        return 1.0
    return theta * lam / (1.0 - theta + theta * lam)


def _moments(source: NormalLinearModel | GroupMoments) -> GroupMoments:
    return source if isinstance(source, GroupMoments) else GroupMoments.from_model(source)


def _as_matrix(values: NDArray[np.float64]) -> list[list[float]]:
    return [[float(v) for v in row] for row in values]


def population_ld(
    source: NormalLinearModel | GroupMoments, *, kind: PropensityKind = PropensityKind.LD
) -> PropensityFunction:
    """Fisher's linear discriminant gamma'x with gamma = Sigma^-1 (mu1 - mu0)."""
    moments = _moments(source)
    gamma = solve_spd(moments.pooled, moments.mu1 - moments.mu0)
    p = gamma.shape[0]
    return PropensityFunction(
        kind=kind,
        intercept=0.0,
        linear=[float(g) for g in gamma],
        quad=[[0.0] * p for _ in range(p)],
    )


def _qd_parts(moments: GroupMoments) -> tuple[NDArray, NDArray, float]:
    p = moments.mu0.shape[0]
    eye = np.eye(p)
    prec1 = solve_spd(moments.sigma1, eye)
    prec0 = solve_spd(moments.sigma0, eye)
    linear = prec1 @ moments.mu1 - prec0 @ moments.mu0
    quad = -0.5 * (prec1 - prec0)
    quad = (quad + quad.T) / 2.0
    constant = -0.5 * (
        moments.mu1 @ prec1 @ moments.mu1 - moments.mu0 @ prec0 @ moments.mu0
    ) - 0.5 * (logdet_spd(moments.sigma1) - logdet_spd(moments.sigma0))
    return linear, quad, float(constant)


def population_qd(
    source: NormalLinearModel | GroupMoments,
    *,
    with_constant: bool = False,
    kind: PropensityKind = PropensityKind.QD,
) -> PropensityFunction:
    """Quadratic discriminant (S1^-1 mu1 - S0^-1 mu0)'x - 1/2 x'(S1^-1 - S0^-1)x.

    The additive constant is dropped unless ``with_constant`` is set, in which case
    the score equals log q1(x)/q0(x).
    """
    linear, quad, constant = _qd_parts(_moments(source))
    return PropensityFunction(
        kind=kind,
        intercept=constant if with_constant else 0.0,
        linear=[float(v) for v in linear],
        quad=_as_matrix(quad),
    )


def sample_moments(data: Dataset) -> GroupMoments:
    """Per-arm sample means and unbiased covariances.

    The pooled dispersion weights each arm by its degrees of freedom,
    ((n0 - 1) S0 + (n1 - 1) S1) / (n - 2).
    """
    n1 = int(data.treated.sum())
    n0 = data.n - n1
    if n1 == 0 or n0 == 0:
        raise EmptyGroupError(f"both treatment arms need observations (n0={n0}, n1={n1})")
    if min(n0, n1) <= data.p:
        raise InsufficientGroupSizeError(
            f"each arm needs more than p={data.p} observations to estimate a covariance "
            f"(n0={n0}, n1={n1})"
        )
    x0, x1 = data.x[data.control], data.x[data.treated]
    sigma0 = np.atleast_2d(np.cov(x0, rowvar=False, ddof=1))
    sigma1 = np.atleast_2d(np.cov(x1, rowvar=False, ddof=1))
    pooled = ((n0 - 1) * sigma0 + (n1 - 1) * sigma1) / (data.n - 2)
    return GroupMoments(
        theta=n1 / data.n,
        mu0=x0.mean(axis=0),
        mu1=x1.mean(axis=0),
        sigma0=sigma0,
        sigma1=sigma1,
        pooled=pooled,
        n0=n0,
        n1=n1,
    )


def sample_ld(data: Dataset) -> PropensityFunction:
    """Sample linear discriminant LD* from the data's group moments."""
    return population_ld(sample_moments(data), kind=PropensityKind.ESTIMATED_LD)


def sample_qd(data: Dataset) -> PropensityFunction:
    """Sample quadratic discriminant QD* from the data's group moments."""
    return population_qd(sample_moments(data), kind=PropensityKind.ESTIMATED_QD)


def _ps_from_log_lambda(
    theta: float,
    log_lambda: PropensityFunction,
    kind: PropensityKind,
) -> PropensityFunction:
    return PropensityFunction(
        kind=kind,
        intercept=float(logit(theta)) + log_lambda.intercept,
        linear=log_lambda.linear,
        quad=log_lambda.quad,
    )


def population_ps(
    model: NormalLinearModel | LogitNormalModel | BinaryLogisticModel,
) -> PropensityFunction:
    """True propensity score Pr(T = 1 | x) of a generative model."""
    if isinstance(model, NormalLinearModel):
        log_lambda = population_qd(model, with_constant=True)
        return _ps_from_log_lambda(model.theta, log_lambda, PropensityKind.PS)
    p = model.p
    return PropensityFunction(
        kind=PropensityKind.PS,
        intercept=model.c,
        linear=list(model.a),
        quad=[[0.0] * p for _ in range(p)],
    )


def sample_ps(data: Dataset, via: Literal["ld", "qd"]) -> PropensityFunction:
    """Propensity score implied by the estimated normal discriminant model.

    ``via="ld"`` assumes a common covariance, ``via="qd"`` separate covariances.
    """
    moments = sample_moments(data)
    if via == "qd":
        log_lambda = population_qd(moments, with_constant=True)
    elif via == "ld":
        ld = population_ld(moments)
        gamma = ld.linear_array
        midpoint = 0.5 * (moments.mu0 + moments.mu1)
        log_lambda = ld.model_copy(update={"intercept": -float(gamma @ midpoint)})
    else:
        raise WrongShapeError(f"unknown discriminant {via!r}")
    return _ps_from_log_lambda(moments.theta, log_lambda, PropensityKind.ESTIMATED_PS)


def estimate_ps_logistic(
    data: Dataset,
    *,
    clip: bool = False,
    tol: float = 1e-10,
    max_iter: int = 100,
    separation_bound: float = 1e4,
) -> PropensityFunction:
    """Propensity score fitted by logistic regression of T on (1, X)."""
    design = np.column_stack([np.ones(data.n), data.x])
    fit = logistic_irls(
        design,
        data.t,
        tol=tol,
        max_iter=max_iter,
        separation_bound=separation_bound,
        on_separation="stop" if clip else "raise",
    )
    p = data.p
    return PropensityFunction(
        kind=PropensityKind.ESTIMATED_PS,
        intercept=float(fit.coef[0]),
        linear=[float(v) for v in fit.coef[1:]],
        quad=[[0.0] * p for _ in range(p)],
    )
