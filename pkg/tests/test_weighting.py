import numpy as np
import pytest

from acekit.core.models import Dataset
from acekit.estimators import (
    OutcomeProvenance,
    aipw_ace,
    fit_per_arm,
    ipw_ace,
    known_outcome_model,
    weighted_response,
    weighted_response_ace,
    zero,
)
from acekit.exceptions import DegeneratePSError, DomainError
from acekit.propensity import PropensityFunction, estimate_ps_logistic, population_ld, population_ps


def test_ipw_with_constant_propensity(small_data):
    result = ipw_ace(small_data, PropensityFunction.constant(0.5, 1))
    t, y = small_data.t, small_data.y
    expected = np.mean(t * y / 0.5) - np.mean((1 - t) * y / 0.5)
    assert result.estimate == pytest.approx(expected)
    assert result.diagnostics["ps_min"] == pytest.approx(0.5)
    assert result.diagnostics["weight_max"] == pytest.approx(2.0)


def test_aipw_with_zero_model_equals_ipw(fig10_data):
    ps = estimate_ps_logistic(fig10_data)
    ipw = ipw_ace(fig10_data, ps)
    aipw = aipw_ace(fig10_data, ps, zero())
    assert aipw.estimate == ipw.estimate
    assert aipw.se == ipw.se
    assert aipw.diagnostics["outcome_model"] == OutcomeProvenance.ZERO.value


def test_aipw_with_exact_outcome_model_returns_true_effect(fig10_model, fig10_data):
    m = known_outcome_model(fig10_model)
    noiseless = Dataset(x=fig10_data.x, t=fig10_data.t, y=m(fig10_data.t, fig10_data.x))
    # any propensity score works when the residuals vanish
    ps = PropensityFunction.constant(0.3, fig10_data.p)
    result = aipw_ace(noiseless, ps, m)
    assert result.estimate == pytest.approx(fig10_model.delta, abs=1e-12)


def test_degenerate_propensity_is_reported(small_data):
    pi = np.array([0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.5, 0.5])
    with pytest.raises(DegeneratePSError) as info:
        ipw_ace(small_data, pi)
    assert info.value.row == 2

    clipped = ipw_ace(small_data, pi, clip=True)
    assert clipped.diagnostics["clipped"] == 1
    assert clipped.diagnostics["ps_min"] == pytest.approx(1e-6)


def test_weighting_needs_a_probability(fig5_model, small_data):
    ld = population_ld(fig5_model)
    data = Dataset(x=np.column_stack([small_data.x, small_data.x]), t=small_data.t, y=small_data.y)
    with pytest.raises(DomainError):
        ipw_ace(data, ld)
    with pytest.raises(DomainError):
        ipw_ace(small_data, np.full(3, 0.5))


def test_weighted_response_definition(fig10_model, fig10_data):
    pi = population_ps(fig10_model).evaluate(fig10_data.x)
    y_tilde, m = weighted_response(fig10_data, pi)
    t, y = fig10_data.t, fig10_data.y
    expected = np.where(t == 1, (1.0 / pi - 1.0) * y, (1.0 / (1.0 - pi) - 1.0) * y)
    np.testing.assert_allclose(y_tilde, expected, rtol=1e-12)
    assert m.provenance is OutcomeProvenance.OPTIMAL_BLEND
    assert m.treated is m.control


def test_weighted_response_ace_runs(fig10_data):
    result = weighted_response_ace(fig10_data, estimate_ps_logistic(fig10_data))
    assert result.method == "wresp"
    assert result.diagnostics["outcome_model"] == "OptimalBlend"
    assert result.diagnostics["y_tilde_max"] > 0
    assert result.estimate == pytest.approx(0.5, abs=0.5)


def test_aipw_with_fitted_arms(fig10_data):
    ps = PropensityFunction.constant(0.5, fig10_data.p)
    result = aipw_ace(fig10_data, ps, fit_per_arm(fig10_data))
    assert result.method == "aipw"
    assert result.se > 0
    assert result.diagnostics["outcome_model"] == "FittedPerArm"


def test_ipw_with_treated_fraction_equals_face(fig10_data):
    from acekit.estimators import face

    share = fig10_data.treated.mean()
    result = ipw_ace(fig10_data, np.full(fig10_data.n, share))
    assert result.estimate == pytest.approx(face(fig10_data).estimate, abs=1e-12)
