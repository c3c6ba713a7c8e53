"""Pydantic data models for datasets, generative models, estimates and experiments."""

from __future__ import annotations

from enum import Enum
from typing import Annotated, Any, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Regime(str, Enum):
    """Regime indicator: observational data or intervention on the treatment."""

    OBSERVATIONAL = "observational"
    INTERVENTION_T0 = "t0"
    INTERVENTION_T1 = "t1"

    @property
    def fixed_treatment(self) -> int | None:
        return {Regime.INTERVENTION_T0: 0, Regime.INTERVENTION_T1: 1}.get(self)


class Dataset(BaseModel):
    """n observations of covariates ``x`` (n x p), binary treatment ``t`` and response ``y``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    t: np.ndarray
    y: np.ndarray
    mask: np.ndarray | None = None
    names: list[str] | None = None

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            x = np.asarray(data["x"], dtype=np.float64)
            data["x"] = x.reshape(-1, 1) if x.ndim == 1 else x
            t = np.asarray(data["t"])
            if t.dtype.kind not in "biuf" or not np.isin(t, (0, 1)).all():
                raise ValueError("treatment must be binary (0/1)")
            data["t"] = t.astype(np.int64)
            data["y"] = np.asarray(data["y"], dtype=np.float64)
            if data.get("mask") is not None:
                data["mask"] = np.asarray(data["mask"], dtype=bool)
        return data

    @model_validator(mode="after")
    def _check(self) -> Dataset:
        n = self.x.shape[0]
        if self.x.ndim != 2 or self.t.shape != (n,) or self.y.shape != (n,):
            raise ValueError(
                f"inconsistent shapes: x {self.x.shape}, t {self.t.shape}, y {self.y.shape}"
            )
        if not np.isin(self.t, (0, 1)).all():
            raise ValueError("treatment must be binary (0/1)")
        if self.mask is not None and self.mask.shape != self.x.shape:
            raise ValueError("missingness mask must match covariate shape")
        if self.names is not None and len(self.names) != self.x.shape[1]:
            raise ValueError("covariate names must match covariate count")
        return self

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])

    @property
    def treated(self) -> NDArray[np.bool_]:
        return self.t == 1

    @property
    def control(self) -> NDArray[np.bool_]:
        return self.t == 0

    @property
    def covariate_names(self) -> list[str]:
        return self.names or [f"x{j + 1}" for j in range(self.p)]


def _vector(values: list[float], p: int, name: str) -> None:
    if len(values) != p:
        raise ValueError(f"{name} must have length p={p}, got {len(values)}")


def _matrix(values: list[list[float]], p: int, name: str) -> None:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (p, p):
        raise ValueError(f"{name} must be {p}x{p}, got {arr.shape}")
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")


class NormalLinearModel(BaseModel):
    """Normal covariates per arm with a normal linear response.

    T ~ Bernoulli(theta), X | T ~ N(mu_T, Sigma_T), Y | X, T ~ N(d + delta T + b'X, phi).
    """

    family: Literal["normal"] = "normal"
    p: int = Field(ge=1)
    d: float = 0.0
    delta: float
    b: list[float]
    phi: float = Field(gt=0.0)
    theta: float = Field(gt=0.0, lt=1.0)
    mu0: list[float]
    mu1: list[float]
    sigma0: list[list[float]]
    sigma1: list[list[float]]

    @model_validator(mode="after")
    def _check(self) -> NormalLinearModel:
        for name in ("b", "mu0", "mu1"):
            _vector(getattr(self, name), self.p, name)
        for name in ("sigma0", "sigma1"):
            _matrix(getattr(self, name), self.p, name)
        return self

    @classmethod
    def homoscedastic(cls, sigma: list[list[float]], **kwargs: Any) -> NormalLinearModel:
        return cls(sigma0=sigma, sigma1=sigma, **kwargs)

    @property
    def is_homoscedastic(self) -> bool:
        return bool(np.array_equal(np.asarray(self.sigma0), np.asarray(self.sigma1)))

    def mean(self, t: int) -> NDArray[np.float64]:
        return np.asarray(self.mu1 if t else self.mu0, dtype=np.float64)

    def cov(self, t: int) -> NDArray[np.float64]:
        return np.asarray(self.sigma1 if t else self.sigma0, dtype=np.float64)


class BinaryLogisticModel(BaseModel):
    """Independent Bernoulli covariates with logistic treatment and response models."""

    family: Literal["binary_logistic"] = "binary_logistic"
    p: int = Field(ge=0)
    pi: list[float]
    c: float = 0.0
    a: list[float]
    d: float = 0.0
    delta: float
    b: list[float]

    @model_validator(mode="after")
    def _check(self) -> BinaryLogisticModel:
        for name in ("pi", "a", "b"):
            _vector(getattr(self, name), self.p, name)
        if any(not 0.0 < q < 1.0 for q in self.pi):
            raise ValueError("covariate probabilities must lie in (0, 1)")
        return self


class LogitNormalModel(BaseModel):
    """Normal covariates, logistic treatment assignment and a normal linear response."""

    family: Literal["logit_normal"] = "logit_normal"
    p: int = Field(ge=1)
    mean: list[float]
    cov: list[list[float]]
    c: float = 0.0
    a: list[float]
    d: float = 0.0
    delta: float
    b: list[float]
    phi: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> LogitNormalModel:
        for name in ("mean", "a", "b"):
            _vector(getattr(self, name), self.p, name)
        _matrix(self.cov, self.p, "cov")
        return self


SimulationModel = Annotated[
    NormalLinearModel | BinaryLogisticModel | LogitNormalModel,
    Field(discriminator="family"),
]


class AceEstimate(BaseModel):
    """Point estimate of the average causal effect with optional standard error."""

    method: str
    estimate: float
    se: float | None = None
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class EstimatorSpec(BaseModel):
    """One estimator of an experiment plan and the objects it is configured with."""

    name: str
    method: Literal["face", "reg", "subclass", "ipw", "aipw", "wresp", "plugin", "logit"]
    adjust: (
        Literal["x", "lp", "ld", "ld_sample", "qd", "qd_sample", "ps", "ps_logistic"] | None
    ) = None
    covariates: list[int] | None = None
    ps: Literal["true", "logistic", "ld", "qd", "constant"] = "true"
    ps_constant: float = 0.5
    m: Literal[
        "zero",
        "joint",
        "per_arm",
        "known",
        "optimal",
        "optimal_joint",
        "known_optimal",
        "treated_arm",
        "constant",
    ] = "zero"
    m_constant: float = 0.0
    k: int = Field(default=5, ge=1)


class ExperimentPlan(BaseModel):
    """A Monte Carlo experiment: which data, how many replicates, which estimators."""

    scenario: str | None = None
    model: SimulationModel | None = None
    n: int | None = Field(default=None, ge=2)
    replicates: int | None = Field(default=None, ge=1)
    seed: int = 20240101
    estimators: list[EstimatorSpec] | None = None
    bins: list[float] | None = None

    @model_validator(mode="after")
    def _check(self) -> ExperimentPlan:
        if self.scenario is None and self.model is None:
            raise ValueError("plan needs a scenario name or an inline model")
        if self.estimators is not None and not self.estimators:
            raise ValueError("estimator list must not be empty")
        return self


class HistogramBin(BaseModel):
    bin_left: float
    bin_right: float
    count: int


class EstimatorSummary(BaseModel):
    """Replicate distribution of one estimator."""

    name: str
    mean: float | None
    sd: float | None
    mse: float | None
    successes: int
    failures: int
    failure_messages: dict[str, int] = Field(default_factory=dict)
    estimates: list[float | None]
    histogram: list[HistogramBin]


class McSummary(BaseModel):
    """Summary of a Monte Carlo experiment over all estimators."""

    scenario: str | None
    delta_true: float
    n: int
    replicates: int
    seed: int
    estimators: list[EstimatorSummary]

    def get(self, name: str) -> EstimatorSummary:
        for summary in self.estimators:
            if summary.name == name:
                return summary
        raise KeyError(name)


class Scenario(BaseModel):
    """A named parameter bundle reproducing one simulation study."""

    name: str
    description: str
    model: SimulationModel
    n: int
    replicates: int
    bins: list[float]
