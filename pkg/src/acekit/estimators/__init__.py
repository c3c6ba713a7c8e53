"""ACE estimators: regression adjustment, subclassification, IPW and AIPW."""

from acekit.estimators.closed_form import (
    asymptotic_variance_toy,
    logistic_ace_closed_form,
    logistic_ace_enumerate,
)
from acekit.estimators.outcome import (
    OutcomeModel,
    OutcomeProvenance,
    constant,
    fit_joint,
    fit_per_arm,
    known_outcome_model,
    optimal_m,
    zero,
)
from acekit.estimators.regression import (
    face,
    logistic_adjusted_effect,
    outcome_regression_ace,
    regression_adjusted_ace,
)
from acekit.estimators.subclass import subclassification_ace
from acekit.estimators.weighting import (
    aipw_ace,
    ipw_ace,
    weighted_response,
    weighted_response_ace,
)

__all__ = [
    "OutcomeModel",
    "OutcomeProvenance",
    "aipw_ace",
    "asymptotic_variance_toy",
    "constant",
    "face",
    "fit_joint",
    "fit_per_arm",
    "ipw_ace",
    "known_outcome_model",
    "logistic_ace_closed_form",
    "logistic_ace_enumerate",
    "logistic_adjusted_effect",
    "optimal_m",
    "outcome_regression_ace",
    "regression_adjusted_ace",
    "subclassification_ace",
    "weighted_response",
    "weighted_response_ace",
    "zero",
]
