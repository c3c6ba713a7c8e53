"""Built-in simulation scenarios and their JSON form."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from acekit.core.models import (
    BinaryLogisticModel,
    LogitNormalModel,
    NormalLinearModel,
    Scenario,
)
from acekit.exceptions import ConfigError, UnknownScenarioError


def seq(start: float, stop: float, step: float) -> list[float]:
    """Evenly spaced edges from ``start`` to ``stop`` inclusive."""
    count = int(round((stop - start) / step)) + 1
    return [float(v) for v in np.round(start + step * np.arange(count), 10)]


def _identity(p: int) -> list[list[float]]:
    return np.eye(p).tolist()


def _fig5() -> Scenario:
    model = NormalLinearModel.homoscedastic(
        _identity(2),
        p=2,
        d=0.0,
        delta=0.5,
        b=[0.0, 1.0],
        phi=1.0,
        theta=0.5,
        mu0=[0.0, 0.0],
        mu1=[1.0, 0.0],
    )
    return Scenario(
        name="fig5",
        description="Homoscedastic normal covariates, p = 2: adjusting for X, LD*, LD or LP",
        model=model,
        n=20,
        replicates=200,
        bins=seq(-2.5, 2.5, 0.5),
    )


def _fig6_7() -> Scenario:
    p = 20
    sigma0 = np.diag([0.8] * 10 + [1.3] * 10).tolist()
    model = NormalLinearModel(
        p=p,
        d=0.0,
        delta=0.5,
        b=[0.0, 1.0] + [0.0] * (p - 2),
        phi=1.0,
        theta=0.5,
        mu0=[0.0] * p,
        mu1=[0.5] + [0.0] * (p - 1),
        sigma0=sigma0,
        sigma1=_identity(p),
    )
    return Scenario(
        name="fig6_7",
        description="Heteroscedastic normal covariates, p = 20: regression and subclassification",
        model=model,
        n=500,
        replicates=200,
        bins=seq(-0.1, 1.1, 0.1),
    )


def _logit_normal(a_scale: float) -> LogitNormalModel:
    return LogitNormalModel(
        p=4,
        mean=[0.0] * 4,
        cov=_identity(4),
        c=0.0,
        a=[a_scale, a_scale, 0.0, 0.0],
        d=0.0,
        delta=0.5,
        b=[0.0, 1.0, 1.0, 0.0],
        phi=1.0,
    )


def _fig10() -> Scenario:
    return Scenario(
        name="fig10",
        description="Logistic assignment on X1 + X2, linear response in X2 and X3: IPW vs AIPW",
        model=_logit_normal(0.4),
        n=500,
        replicates=100,
        bins=seq(-0.5, 1.5, 0.1),
    )


def _fig10_heavy() -> Scenario:
    return Scenario(
        name="fig10_heavy",
        description="fig10 with a steep propensity model producing extreme weights",
        model=_logit_normal(2.0),
        n=200,
        replicates=100,
        bins=seq(-3.0, 4.0, 0.5),
    )


def _logit_toy() -> Scenario:
    model = BinaryLogisticModel(
        p=3,
        pi=[0.5, 0.4, 0.6],
        c=-0.2,
        a=[1.0, -0.8, 0.0],
        d=-0.5,
        delta=0.7,
        b=[0.0, 0.9, -0.6],
    )
    return Scenario(
        name="logit_toy",
        description="Binary covariates, treatment and response with logistic links",
        model=model,
        n=1000,
        replicates=200,
        bins=seq(-0.2, 0.6, 0.05),
    )


SCENARIOS: dict[str, Callable[[], Scenario]] = {
    "fig5": _fig5,
    "fig6_7": _fig6_7,
    "fig10": _fig10,
    "fig10_heavy": _fig10_heavy,
    "logit_toy": _logit_toy,
}


def scenario(name: str) -> Scenario:
    """Parameter bundle of a built-in scenario."""
    try:
        factory = SCENARIOS[name]
    except KeyError:
        known = ", ".join(SCENARIOS)
        raise UnknownScenarioError(f"Unknown scenario {name!r}; known: {known}") from None
    return factory()


def list_scenarios() -> list[Scenario]:
    return [factory() for factory in SCENARIOS.values()]


def scenario_to_json(item: Scenario) -> str:
    return item.model_dump_json(indent=2)


def scenario_from_json(text: str) -> Scenario:
    try:
        return Scenario.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"Invalid scenario document: {exc}") from exc


def load_scenario_file(path: Path) -> Scenario:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"Cannot read scenario file {path}: {exc}") from exc
    return scenario_from_json(text)
