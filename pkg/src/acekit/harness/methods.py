"""Estimation method registry and resolution of estimator specifications."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from acekit.core.config import NumericsConfig
from acekit.core.models import (
    AceEstimate,
    BinaryLogisticModel,
    Dataset,
    EstimatorSpec,
    LogitNormalModel,
    NormalLinearModel,
)
from acekit.estimators import (
    OutcomeModel,
    aipw_ace,
    constant,
    face,
    fit_joint,
    fit_per_arm,
    ipw_ace,
    known_outcome_model,
    logistic_adjusted_effect,
    optimal_m,
    outcome_regression_ace,
    regression_adjusted_ace,
    subclassification_ace,
    weighted_response_ace,
    zero,
)
from acekit.estimators.outcome import LinearArm, OutcomeProvenance
from acekit.estimators.regression import Adjustment
from acekit.exceptions import ConfigError, UnknownMethodError
from acekit.propensity import (
    PropensityFunction,
    estimate_ps_logistic,
    population_ld,
    population_ps,
    population_qd,
    sample_ld,
    sample_ps,
    sample_qd,
)

GenerativeModel = NormalLinearModel | BinaryLogisticModel | LogitNormalModel


@dataclass(frozen=True)
class EstimationContext:
    """What an estimator may know beyond the data: the true model and numeric options."""

    model: GenerativeModel | None = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def require_model(self, what: str) -> GenerativeModel:
        if self.model is None:
            raise ConfigError(f"{what} needs the generating model, which is unknown for real data")
        return self.model

    def require_normal(self, what: str) -> NormalLinearModel:
        model = self.require_model(what)
        if not isinstance(model, NormalLinearModel):
            raise ConfigError(f"{what} is defined only for normal covariate models")
        return model


def _logistic_ps(data: Dataset, ctx: EstimationContext) -> PropensityFunction:
    numerics = ctx.numerics
    return estimate_ps_logistic(
        data,
        clip=numerics.clip_ps,
        tol=numerics.irls_tol,
        max_iter=numerics.irls_max_iter,
        separation_bound=numerics.separation_bound,
    )


def resolve_adjust(spec: EstimatorSpec, data: Dataset, ctx: EstimationContext) -> Adjustment:
    """Adjustment columns named by ``spec.adjust``."""
    match spec.adjust:
        case None | "x":
            return spec.covariates
        case "lp":
            model = ctx.require_model("adjusting for the linear predictor")
            return LinearArm(0.0, np.asarray(model.b, dtype=np.float64))
        case "ld":
            return population_ld(ctx.require_normal("population LD"))
        case "ld_sample":
            return sample_ld(data)
        case "qd":
            return population_qd(ctx.require_normal("population QD"))
        case "qd_sample":
            return sample_qd(data)
        case "ps":
            return population_ps(ctx.require_model("the true propensity score"))
        case "ps_logistic":
            return _logistic_ps(data, ctx)
    raise ConfigError(f"unknown adjustment {spec.adjust!r}")


def resolve_ps(spec: EstimatorSpec, data: Dataset, ctx: EstimationContext) -> PropensityFunction:
    """Propensity score named by ``spec.ps``."""
    match spec.ps:
        case "true":
            return population_ps(ctx.require_model("the true propensity score"))
        case "logistic":
            return _logistic_ps(data, ctx)
        case "ld" | "qd":
            return sample_ps(data, via=spec.ps)
        case "constant":
            return PropensityFunction.constant(spec.ps_constant, data.p)
    raise ConfigError(f"unknown propensity score {spec.ps!r}")


def resolve_m(
    spec: EstimatorSpec, data: Dataset, ps: PropensityFunction | None, ctx: EstimationContext
) -> OutcomeModel:
    """Outcome model named by ``spec.m``; blends use ``ps`` as their weights."""

    def blend(arms: OutcomeModel) -> OutcomeModel:
        if ps is None:
            raise ConfigError(f"outcome model {spec.m!r} needs a propensity score")
        return optimal_m(ps.evaluate, arms.treated, arms.control)

    match spec.m:
        case "zero":
            return zero()
        case "constant":
            return constant(spec.m_constant)
        case "joint":
            return fit_joint(data, spec.covariates)
        case "per_arm":
            return fit_per_arm(data, spec.covariates)
        case "known":
            return known_outcome_model(ctx.require_model("a known outcome model"))
        case "optimal":
            return blend(fit_per_arm(data, spec.covariates))
        case "optimal_joint":
            return blend(fit_joint(data, spec.covariates))
        case "known_optimal":
            return blend(known_outcome_model(ctx.require_model("a known outcome model")))
        case "treated_arm":
            arms = fit_per_arm(data, spec.covariates)
            return OutcomeModel.shared(arms.treated, OutcomeProvenance.FITTED_PER_ARM)
    raise ConfigError(f"unknown outcome model {spec.m!r}")


class Method(ABC):
    """An estimation method applied to one dataset."""

    method_name: ClassVar[str]
    description: ClassVar[str]

    @abstractmethod
    def estimate(self, data: Dataset, spec: EstimatorSpec, ctx: EstimationContext) -> AceEstimate:
        """Estimate the ACE from ``data`` as configured by ``spec``."""


_registry: dict[str, type[Method]] = {}


def register(cls: type[Method]) -> type[Method]:
    """Decorator to register an estimation method."""
    _registry[cls.method_name] = cls
    return cls


def get_method(name: str) -> Method:
    """Return an instantiated method by name."""
    try:
        return _registry[name]()
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise UnknownMethodError(f"Unknown method {name!r}; known: {known}") from None


def get_all_methods() -> list[type[Method]]:
    return list(_registry.values())


@register
class FaceMethod(Method):
    method_name = "face"
    description = "Difference of observed group means"

    def estimate(self, data, spec, ctx):
        return face(data)


@register
class RegressionMethod(Method):
    method_name = "reg"
    description = "Coefficient of T in a least-squares regression"

    def estimate(self, data, spec, ctx):
        return regression_adjusted_ace(data, resolve_adjust(spec, data, ctx))


@register
class SubclassMethod(Method):
    method_name = "subclass"
    description = "Equal-count subclassification on a score"

    def estimate(self, data, spec, ctx):
        score = resolve_adjust(spec, data, ctx)
        if not isinstance(score, PropensityFunction):
            raise ConfigError("subclassification needs a scalar propensity adjustment")
        return subclassification_ace(data, score, spec.k)


@register
class IpwMethod(Method):
    method_name = "ipw"
    description = "Inverse probability weighting (Horvitz-Thompson)"

    def estimate(self, data, spec, ctx):
        ps = resolve_ps(spec, data, ctx)
        return ipw_ace(
            data, ps, clip=ctx.numerics.clip_ps, clip_bounds=ctx.numerics.clip_bounds
        )


@register
class AipwMethod(Method):
    method_name = "aipw"
    description = "Augmented inverse probability weighting"

    def estimate(self, data, spec, ctx):
        ps = resolve_ps(spec, data, ctx)
        m = resolve_m(spec, data, ps, ctx)
        return aipw_ace(
            data, ps, m, clip=ctx.numerics.clip_ps, clip_bounds=ctx.numerics.clip_bounds
        )


@register
class WeightedResponseMethod(Method):
    method_name = "wresp"
    description = "AIPW with m regressed from the weighted response"

    def estimate(self, data, spec, ctx):
        ps = resolve_ps(spec, data, ctx)
        return weighted_response_ace(
            data, ps, clip=ctx.numerics.clip_ps, clip_bounds=ctx.numerics.clip_bounds
        )


@register
class PluginMethod(Method):
    method_name = "plugin"
    description = "Average of m(1, X) - m(0, X)"

    def estimate(self, data, spec, ctx):
        return outcome_regression_ace(data, resolve_m(spec, data, None, ctx))


@register
class LogitMethod(Method):
    method_name = "logit"
    description = "Log odds ratio of T from a logistic regression"

    def estimate(self, data, spec, ctx):
        numerics = ctx.numerics
        return logistic_adjusted_effect(
            data,
            resolve_adjust(spec, data, ctx),
            tol=numerics.irls_tol,
            max_iter=numerics.irls_max_iter,
            separation_bound=numerics.separation_bound,
        )


def _spec(name: str, method: str, **kwargs) -> EstimatorSpec:
    return EstimatorSpec(name=name, method=method, **kwargs)


def _fig10_estimators() -> list[EstimatorSpec]:
    return [
        _spec("ht", "ipw", ps="logistic"),
        _spec("aipw_optimal_joint", "aipw", ps="logistic", m="optimal_joint"),
        _spec("aipw_optimal_per_arm", "aipw", ps="logistic", m="optimal"),
        _spec("wresp", "wresp", ps="logistic"),
    ]


DEFAULT_ESTIMATORS = {
    "fig5": lambda: [
        _spec("reg_x", "reg", adjust="x"),
        _spec("reg_ld_sample", "reg", adjust="ld_sample"),
        _spec("reg_ld", "reg", adjust="ld"),
        _spec("reg_lp", "reg", adjust="lp"),
    ],
    "fig6_7": lambda: [
        _spec("reg_lp", "reg", adjust="lp"),
        _spec("subclass_qd", "subclass", adjust="qd", k=5),
        _spec("reg_ld", "reg", adjust="ld"),
        _spec("reg_qd", "reg", adjust="qd"),
        _spec("reg_x", "reg", adjust="x"),
        _spec("subclass_qd_sample", "subclass", adjust="qd_sample", k=5),
        _spec("reg_ld_sample", "reg", adjust="ld_sample"),
        _spec("reg_qd_sample", "reg", adjust="qd_sample"),
    ],
    "fig10": _fig10_estimators,
    "fig10_heavy": _fig10_estimators,
    "logit_toy": lambda: [
        _spec("face", "face"),
        _spec("ipw_logistic", "ipw", ps="logistic"),
        _spec("aipw_joint", "aipw", ps="logistic", m="joint"),
    ],
}

_FAMILY_DEFAULTS = {"normal": "fig5", "logit_normal": "fig10", "binary_logistic": "logit_toy"}


def default_estimators(scenario_name: str | None, model: GenerativeModel) -> list[EstimatorSpec]:
    """Estimators run when a plan does not list its own."""
    key = scenario_name if scenario_name in DEFAULT_ESTIMATORS else _FAMILY_DEFAULTS[model.family]
    return DEFAULT_ESTIMATORS[key]()
