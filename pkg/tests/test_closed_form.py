import numpy as np
import pytest
from scipy.special import expit

from acekit.core.models import BinaryLogisticModel, NormalLinearModel, Regime
from acekit.core.rng import SeededRng
from acekit.estimators import (
    asymptotic_variance_toy,
    logistic_ace_closed_form,
    logistic_ace_enumerate,
)
from acekit.exceptions import DomainError, TooManyCovariatesError, WrongShapeError
from acekit.simgen import generate, scenario


def _random_logistic(rng: np.random.Generator) -> BinaryLogisticModel:
    a = rng.normal(size=3)
    b = rng.normal(size=3)
    return BinaryLogisticModel(
        p=3,
        pi=rng.uniform(0.05, 0.95, size=3).tolist(),
        c=float(rng.normal()),
        a=[float(a[0]), float(a[1]), 0.0],
        d=float(rng.normal()),
        delta=float(rng.normal()),
        b=[0.0, float(b[1]), float(b[2])],
    )


def test_closed_form_matches_enumeration():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        model = _random_logistic(rng)
        assert logistic_ace_closed_form(model) == pytest.approx(
            logistic_ace_enumerate(model), abs=1e-12
        )


def test_closed_form_rejects_other_shapes():
    model = scenario("logit_toy").model
    with pytest.raises(WrongShapeError):
        logistic_ace_closed_form(model.model_copy(update={"b": [0.1, 0.9, -0.6]}))
    with pytest.raises(WrongShapeError):
        logistic_ace_closed_form(model.model_copy(update={"a": [1.0, -0.8, 0.3]}))


def test_enumerate_without_covariates():
    model = BinaryLogisticModel(p=0, pi=[], a=[], b=[], d=0.2, delta=1.0)
    assert logistic_ace_enumerate(model) == pytest.approx(expit(1.2) - expit(0.2))


def test_enumerate_limit():
    model = BinaryLogisticModel(p=3, pi=[0.5] * 3, a=[0.0] * 3, b=[0.0] * 3, delta=1.0)
    with pytest.raises(TooManyCovariatesError):
        logistic_ace_enumerate(model, max_p=2)


def test_enumerate_spans_several_chunks():
    p = 17
    model = BinaryLogisticModel(p=p, pi=[0.3] * p, a=[0.0] * p, b=[0.1] * p, d=-1.0, delta=0.4)
    # the linear predictor depends on the covariates only through their binomial count
    from scipy.stats import binom

    counts = np.arange(p + 1)
    lp = -1.0 + 0.1 * counts
    expected = np.sum(binom.pmf(counts, p, 0.3) * (expit(lp + 0.4) - expit(lp)))
    assert logistic_ace_enumerate(model) == pytest.approx(expected, abs=1e-12)


def test_interventional_contrast_matches_closed_form():
    model = scenario("logit_toy").model
    n = 100_000
    treated = generate(model, n, Regime.INTERVENTION_T1, SeededRng(8, 0))
    control = generate(model, n, Regime.INTERVENTION_T0, SeededRng(8, 1))
    assert treated.t.min() == 1 and control.t.max() == 0
    contrast = treated.y.mean() - control.y.mean()
    assert contrast == pytest.approx(logistic_ace_closed_form(model), abs=0.01)


def test_toy_multipliers(fig5_model):
    values = {which: asymptotic_variance_toy(fig5_model, which) for which in ("M0", "M1", "M2", "M3")}
    assert values == pytest.approx({"M0": 5.0, "M1": 10.0, "M2": 4.0, "M3": 5.0})


def test_toy_multiplier_shape_checks(fig5_model):
    with pytest.raises(WrongShapeError):
        asymptotic_variance_toy(scenario("fig6_7").model, "M0")
    shifted = fig5_model.model_copy(update={"mu1": [1.0, 0.3]})
    with pytest.raises(WrongShapeError):
        asymptotic_variance_toy(shifted, "M1")
    flat = fig5_model.model_copy(update={"b": [0.0, 0.0]})
    with pytest.raises(DomainError):
        asymptotic_variance_toy(flat, "M2")
    with pytest.raises(DomainError):
        asymptotic_variance_toy(fig5_model, "M9")


def test_toy_multiplier_without_confounding_shift():
    model = NormalLinearModel.homoscedastic(
        [[2.0, 0.0], [0.0, 2.0]],
        p=2,
        delta=1.0,
        b=[1.0, 0.0],
        phi=1.0,
        theta=0.25,
        mu0=[0.0, 0.0],
        mu1=[0.0, 0.0],
    )
    # no shift in X1: adjustment costs nothing relative to 1 / (theta (1 - theta))
    assert asymptotic_variance_toy(model, "M0") == pytest.approx(1.0 / (0.25 * 0.75))


@pytest.mark.slow
def test_toy_multipliers_match_monte_carlo(fig5_model):
    from acekit.core.models import EstimatorSpec, ExperimentPlan
    from acekit.harness import run_experiment

    n = 2000
    plan = ExperimentPlan(
        model=fig5_model,
        n=n,
        replicates=1000,
        seed=41,
        estimators=[
            EstimatorSpec(name="x", method="reg", adjust="x"),
            EstimatorSpec(name="ld", method="reg", adjust="ld"),
            EstimatorSpec(name="lp", method="reg", adjust="lp"),
        ],
    )
    summary = run_experiment(plan)
    for name, which in (("x", "M0"), ("ld", "M1"), ("lp", "M2")):
        scaled = n * summary.get(name).sd ** 2
        assert scaled == pytest.approx(asymptotic_variance_toy(fig5_model, which), rel=0.15)
