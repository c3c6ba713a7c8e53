"""Inverse probability weighting, AIPW and the weighted-response estimator."""

from __future__ import annotations

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from acekit.core.models import AceEstimate, Dataset
from acekit.core.numkit import ols
from acekit.estimators.outcome import LinearArm, OutcomeModel, OutcomeProvenance, zero
from acekit.exceptions import DegeneratePSError, DomainError
from acekit.propensity import PropensityFunction

CLIP_BOUNDS = (1e-6, 1.0 - 1e-6)


def propensity_values(
    data: Dataset,
    ps: PropensityFunction | ArrayLike,
    *,
    clip: bool = False,
    clip_bounds: tuple[float, float] = CLIP_BOUNDS,
) -> tuple[NDArray[np.float64], int]:
    """Evaluate ``ps`` on the data and enforce 0 < pi < 1 row-wise.

    Returns the probabilities and how many of them were clipped.
    """
    if isinstance(ps, PropensityFunction):
        if not ps.is_probability:
            raise DomainError(f"{ps.kind.value} is not a probability; weighting needs a PS")
        pi = ps.evaluate(data.x)
    else:
        pi = np.asarray(ps, dtype=np.float64)
        if pi.shape != (data.n,):
            raise DomainError(f"propensity vector must have length {data.n}, got {pi.shape}")
    if clip:
        lo, hi = clip_bounds
        clipped = np.clip(pi, lo, hi)
        changed = int(np.count_nonzero(clipped != pi))
        if changed:
            logger.warning(f"Clipped {changed} propensity scores to [{lo:g}, {hi:g}]")
        return clipped, changed
    bad = np.flatnonzero(~((pi > 0.0) & (pi < 1.0)))
    if bad.size:
        row = int(bad[0])
        raise DegeneratePSError(
            f"propensity score {pi[row]!r} at row {row} is not strictly inside (0, 1)", row=row
        )
    return pi, 0


def _augmented_contrast(
    data: Dataset,
    pi: NDArray[np.float64],
    m1: NDArray[np.float64],
    m0: NDArray[np.float64],
    method: str,
    clipped: int,
) -> AceEstimate:
    t, y = data.t, data.y
    treated_weight = t / pi
    control_weight = (1 - t) / (1.0 - pi)
    mu1 = treated_weight * y + (1.0 - treated_weight) * m1
    mu0 = control_weight * y + (1.0 - control_weight) * m0
    influence = mu1 - mu0
    weights = np.where(t == 1, 1.0 / pi, 1.0 / (1.0 - pi))
    return AceEstimate(
        method=method,
        estimate=float(np.mean(mu1) - np.mean(mu0)),
        se=float(np.std(influence, ddof=1) / np.sqrt(data.n)),
        diagnostics={
            "mu1": float(np.mean(mu1)),
            "mu0": float(np.mean(mu0)),
            "ps_min": float(pi.min()),
            "ps_max": float(pi.max()),
            "weight_min": float(weights.min()),
            "weight_max": float(weights.max()),
            "clipped": clipped,
        },
    )


def ipw_ace(
    data: Dataset,
    ps: PropensityFunction | ArrayLike,
    *,
    clip: bool = False,
    clip_bounds: tuple[float, float] = CLIP_BOUNDS,
) -> AceEstimate:
    """Horvitz-Thompson estimate n^-1 sum T Y / pi - n^-1 sum (1 - T) Y / (1 - pi)."""
    pi, clipped = propensity_values(data, ps, clip=clip, clip_bounds=clip_bounds)
    nothing = np.zeros(data.n)
    return _augmented_contrast(data, pi, nothing, nothing, "ipw", clipped)


def aipw_ace(
    data: Dataset,
    ps: PropensityFunction | ArrayLike,
    m: OutcomeModel | None = None,
    *,
    clip: bool = False,
    clip_bounds: tuple[float, float] = CLIP_BOUNDS,
) -> AceEstimate:
    """Augmented IPW estimate with outcome model ``m``.

    mu1 = n^-1 sum [T Y / pi + (1 - T / pi) m(1, X)] and symmetrically for mu0.
    Consistent when either ``ps`` or ``m`` is correct.
    """
    m = m or zero()
    pi, clipped = propensity_values(data, ps, clip=clip, clip_bounds=clip_bounds)
    m1 = np.asarray(m.treated(data.x), dtype=np.float64)
    m0 = np.asarray(m.control(data.x), dtype=np.float64)
    if not (np.isfinite(m1).all() and np.isfinite(m0).all()):
        raise DomainError("outcome model is not finite on the data")
    result = _augmented_contrast(data, pi, m1, m0, "aipw", clipped)
    result.diagnostics["outcome_model"] = m.provenance.value
    return result


def weighted_response(
    data: Dataset,
    pi: NDArray[np.float64],
) -> tuple[NDArray[np.float64], OutcomeModel]:
    """Reweighted response and the regression of it on (1, X).

    Y~ = [(1/pi - 1) T + (1/(1 - pi) - 1)(1 - T)] Y, whose regression on X targets
    (1 - pi) m1 + pi m0.
    """
    t = data.t
    factor = (1.0 / pi - 1.0) * t + (1.0 / (1.0 - pi) - 1.0) * (1 - t)
    y_tilde = factor * data.y
    design = np.column_stack([np.ones(data.n), data.x])
    fit = ols(design, y_tilde)
    arm = LinearArm(float(fit.coef[0]), fit.coef[1:])
    return y_tilde, OutcomeModel.shared(
        arm, OutcomeProvenance.OPTIMAL_BLEND, coef=fit.coef.tolist()
    )


def weighted_response_ace(
    data: Dataset,
    ps: PropensityFunction | ArrayLike,
    *,
    clip: bool = False,
    clip_bounds: tuple[float, float] = CLIP_BOUNDS,
) -> AceEstimate:
    """AIPW with m fitted by regressing the weighted response on the covariates."""
    pi, clipped = propensity_values(data, ps, clip=clip, clip_bounds=clip_bounds)
    y_tilde, m = weighted_response(data, pi)
    result = _augmented_contrast(
        data, pi, m.treated(data.x), m.control(data.x), "wresp", clipped
    )
    result.diagnostics["outcome_model"] = m.provenance.value
    result.diagnostics["y_tilde_max"] = float(np.max(np.abs(y_tilde)))
    return result
