import numpy as np
import pytest

from acekit.core.models import NormalLinearModel, Regime
from acekit.core.rng import SeededRng
from acekit.exceptions import (
    ConfigError,
    DomainError,
    EmptyGroupError,
    TooManyCovariatesError,
    UnknownScenarioError,
)
from acekit.simgen import (
    generate,
    list_scenarios,
    load_scenario_file,
    scenario,
    scenario_from_json,
    scenario_to_json,
    true_ace,
)
from acekit.simgen.scenarios import seq


def test_builtin_scenarios():
    names = [item.name for item in list_scenarios()]
    assert names == ["fig5", "fig6_7", "fig10", "fig10_heavy", "logit_toy"]
    fig5 = scenario("fig5")
    assert fig5.n == 20
    assert fig5.bins == seq(-2.5, 2.5, 0.5)
    assert len(fig5.bins) == 11
    assert scenario("fig6_7").model.p == 20
    assert scenario("fig10_heavy").model.a == [2.0, 2.0, 0.0, 0.0]


def test_unknown_scenario():
    with pytest.raises(UnknownScenarioError, match="fig5"):
        scenario("fig99")


def test_seq_endpoints():
    edges = seq(-0.1, 1.1, 0.1)
    assert edges[0] == -0.1
    assert edges[-1] == 1.1
    assert len(edges) == 13


def test_scenario_json(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(scenario_to_json(scenario("fig10")))
    loaded = load_scenario_file(path)
    assert loaded == scenario("fig10")
    with pytest.raises(ConfigError):
        scenario_from_json('{"name": "broken"}')
    with pytest.raises(ConfigError):
        load_scenario_file(tmp_path / "missing.json")


def test_generation_is_reproducible(fig10_model):
    a = generate(fig10_model, 50, Regime.OBSERVATIONAL, SeededRng(1, 4))
    b = generate(fig10_model, 50, Regime.OBSERVATIONAL, SeededRng(1, 4))
    c = generate(fig10_model, 50, Regime.OBSERVATIONAL, SeededRng(1, 5))
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.y, c.y)


@pytest.mark.parametrize("name", ["fig5", "fig6_7", "fig10", "logit_toy"])
def test_observational_data_has_both_arms(name):
    item = scenario(name)
    data = generate(item.model, item.n, Regime.OBSERVATIONAL, SeededRng(3))
    assert data.n == item.n
    assert data.p == item.model.p
    assert 0 < data.t.sum() < data.n


def test_normal_observational_moments(fig5_model):
    data = generate(fig5_model, 100_000, Regime.OBSERVATIONAL, SeededRng(21))
    assert data.t.mean() == pytest.approx(fig5_model.theta, abs=0.01)
    np.testing.assert_allclose(data.x[data.treated].mean(axis=0), fig5_model.mu1, atol=0.02)
    np.testing.assert_allclose(data.x[data.control].mean(axis=0), fig5_model.mu0, atol=0.02)


def test_normal_intervention_keeps_covariate_law(fig5_model):
    data = generate(fig5_model, 100_000, Regime.INTERVENTION_T1, SeededRng(22))
    assert data.t.min() == 1
    # X follows the theta-mixture of the two arm distributions
    assert data.x[:, 0].mean() == pytest.approx(0.5, abs=0.02)
    residual = data.y - data.x @ np.asarray(fig5_model.b)
    assert residual.mean() == pytest.approx(fig5_model.d + fig5_model.delta, abs=0.02)


def test_assignment_gives_up_after_repeated_empty_arms():
    model = NormalLinearModel.homoscedastic(
        [[1.0]], p=1, delta=0.0, b=[0.0], phi=1.0, theta=1e-12, mu0=[0.0], mu1=[0.0]
    )
    with pytest.raises(EmptyGroupError):
        generate(model, 5, Regime.OBSERVATIONAL, SeededRng(0))


def test_generation_rejects_empty_sample(fig5_model):
    with pytest.raises(DomainError):
        generate(fig5_model, 0, Regime.OBSERVATIONAL, SeededRng(0))


def test_true_ace():
    assert true_ace(scenario("fig5").model) == 0.5
    logit = scenario("logit_toy").model
    assert 0.0 < true_ace(logit) < logit.delta / 4 + 1e-9
    general = logit.model_copy(update={"b": [0.3, 0.9, -0.6]})
    assert true_ace(general) != true_ace(logit)
    with pytest.raises(TooManyCovariatesError):
        true_ace(general, max_p=2)
