"""Exact ACE values and asymptotic variance multipliers for the toy models."""

from __future__ import annotations

from typing import Literal

import numpy as np
from scipy.special import expit

from acekit.core.models import BinaryLogisticModel, NormalLinearModel
from acekit.exceptions import DomainError, TooManyCovariatesError, WrongShapeError

ENUMERATE_MAX_P = 20
_CHUNK_BITS = 16


def logistic_ace_closed_form(model: BinaryLogisticModel) -> float:
    """Four-term ACE of the three-covariate logistic model with b1 = 0 and a3 = 0.

    Only d, delta, b2, b3 and the probabilities of X2 and X3 enter.
    """
    if model.p != 3 or model.b[0] != 0.0 or model.a[2] != 0.0:
        raise WrongShapeError(
            "closed form needs p = 3, b = (0, b2, b3) and a = (a1, a2, 0); "
            "use logistic_ace_enumerate instead"
        )
    d, delta = model.d, model.delta
    _, b2, b3 = model.b
    _, pi2, pi3 = model.pi

    def contrast(shift: float) -> float:
        return float(expit(d + delta + shift) - expit(d + shift))

    return (
        pi2 * pi3 * contrast(b2 + b3)
        + (1.0 - pi2) * pi3 * contrast(b3)
        + pi2 * (1.0 - pi3) * contrast(b2)
        + (1.0 - pi2) * (1.0 - pi3) * contrast(0.0)
    )


def logistic_ace_enumerate(model: BinaryLogisticModel, *, max_p: int = ENUMERATE_MAX_P) -> float:
    """E[expit(d + delta + b'X) - expit(d + b'X)] summed over all 2^p covariate patterns."""
    p = model.p
    if p > max_p:
        raise TooManyCovariatesError(f"cannot enumerate 2^{p} patterns (limit p <= {max_p})")
    if p == 0:
        return float(expit(model.d + model.delta) - expit(model.d))
    b = np.asarray(model.b, dtype=np.float64)
    pi = np.asarray(model.pi, dtype=np.float64)
    total = 0.0
    chunk = 1 << min(p, _CHUNK_BITS)
    bits = np.arange(p)
    for start in range(0, 1 << p, chunk):
        codes = np.arange(start, min(start + chunk, 1 << p))
        x = ((codes[:, None] >> bits) & 1).astype(np.float64)
        weight = np.prod(np.where(x == 1.0, pi, 1.0 - pi), axis=1)
        lp = model.d + x @ b
        total += float(np.sum(weight * (expit(lp + model.delta) - expit(lp))))
    return total


Multiplier = Literal["M0", "M1", "M2", "M3"]


def asymptotic_variance_toy(model: NormalLinearModel, which: Multiplier) -> float:
    """n times the asymptotic variance of the T coefficient in the two-covariate toy model.

    M0 adjusts for (X1, X2), equivalently the sample discriminant (M3 is an alias);
    M1 adjusts for X1 alone, which is the population discriminant; M2 adjusts for the
    linear predictor b'X.
    """
    if model.p != 2:
        raise WrongShapeError(f"toy model needs p = 2, got p = {model.p}")
    if not model.is_homoscedastic:
        raise WrongShapeError("toy model needs a common covariance in both arms")
    sigma = model.cov(0)
    tau = float(sigma[0, 0])
    if sigma[0, 1] != 0.0 or sigma[1, 1] != tau:
        raise WrongShapeError("toy model needs a diagonal covariance with equal entries")
    mu0, mu1 = model.mean(0), model.mean(1)
    if mu0[1] != mu1[1]:
        raise WrongShapeError("toy model needs E(X2 | T=1) = E(X2 | T=0)")

    theta, phi = model.theta, model.phi
    spread = theta * (1.0 - theta)
    shift = mu1 - mu0
    var_x1 = tau + spread * shift[0] ** 2
    within_x1 = tau

    if which in ("M0", "M3"):
        return phi * var_x1 / (spread * within_x1)
    if which == "M1":
        b2 = model.b[1]
        return (phi + b2**2 * tau) * var_x1 / (spread * within_x1)
    if which == "M2":
        b = np.asarray(model.b, dtype=np.float64)
        within_lp = tau * float(b @ b)
        if within_lp == 0.0:
            raise DomainError("linear predictor is constant when b = 0")
        var_lp = within_lp + spread * float(b @ shift) ** 2
        return phi * var_lp / (spread * within_lp)
    raise DomainError(f"unknown multiplier {which!r}; expected M0, M1, M2 or M3")
