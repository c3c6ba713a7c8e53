"""Dense least squares and logistic regression.

Linear systems go through QR or Cholesky factorizations; no routine here forms
an explicit matrix inverse of a design cross-product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.linalg
from loguru import logger
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit

from acekit.exceptions import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    RankDeficientError,
    SeparationError,
)

RANK_TOL = 1e-10
PINNED_PROB = 1e-10


@dataclass(frozen=True)
class OlsFit:
    coef: NDArray[np.float64]
    sigma2: float
    cov: NDArray[np.float64]
    residuals: NDArray[np.float64]

    @cached_property
    def se(self) -> NDArray[np.float64]:
        return np.sqrt(np.diag(self.cov))

    @property
    def df_resid(self) -> int:
        return self.residuals.shape[0] - self.coef.shape[0]


@dataclass(frozen=True)
class LogisticFit:
    coef: NDArray[np.float64]
    converged: bool
    iterations: int
    score_norm: float
    loglik: float
    cov: NDArray[np.float64]

    @cached_property
    def se(self) -> NDArray[np.float64]:
        return np.sqrt(np.diag(self.cov))


def _check_design(design: ArrayLike, response: ArrayLike) -> tuple[NDArray, NDArray]:
    x = np.asarray(design, dtype=np.float64)
    y = np.asarray(response, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatchError(f"design must be a matrix, got shape {x.shape}")
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise DimensionMismatchError(
            f"response of shape {y.shape} does not match design with {x.shape[0]} rows"
        )
    n, k = x.shape
    if n <= k:
        raise DimensionMismatchError(f"need more observations than columns (n={n}, k={k})")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DimensionMismatchError("design and response must be finite")
    return x, y


def _qr_full_rank(x: NDArray[np.float64]) -> tuple[NDArray, NDArray]:
    """Economic QR of ``x``; raise if a column is (numerically) in the span of earlier ones."""
    q, r = scipy.linalg.qr(x, mode="economic")
    col_norms = np.linalg.norm(x, axis=0)
    diag = np.abs(np.diag(r))
    bad = np.flatnonzero(diag <= RANK_TOL * np.maximum(col_norms, np.finfo(float).tiny))
    if bad.size:
        raise RankDeficientError(
            f"design is rank deficient: column {int(bad[0])} is collinear with earlier columns"
        )
    return q, r


def ols(design: ArrayLike, response: ArrayLike) -> OlsFit:
    """Ordinary least squares with classical standard errors."""
    x, y = _check_design(design, response)
    n, k = x.shape
    q, r = _qr_full_rank(x)
    coef = scipy.linalg.solve_triangular(r, q.T @ y)
    residuals = y - x @ coef
    sigma2 = float(residuals @ residuals) / (n - k)
    # (X'X)^-1 = R^-1 R^-T
    r_inv = scipy.linalg.solve_triangular(r, np.eye(k))
    cov = sigma2 * (r_inv @ r_inv.T)
    cov = (cov + cov.T) / 2.0
    return OlsFit(coef=coef, sigma2=sigma2, cov=cov, residuals=residuals)


def _loglik(eta: NDArray[np.float64], y: NDArray[np.float64]) -> float:
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def logistic_irls(
    design: ArrayLike,
    response01: ArrayLike,
    *,
    tol: float = 1e-10,
    max_iter: int = 100,
    separation_bound: float = 1e4,
    on_separation: Literal["raise", "stop"] = "raise",
) -> LogisticFit:
    """Maximum likelihood logistic regression by iteratively reweighted least squares.

    Starts from zero, takes Newton steps solved through a Cholesky factorization of
    the Fisher information and halves the step while the log-likelihood decreases.
    With ``on_separation="stop"`` a diverging fit is returned unconverged instead of
    raising, for callers that clip the resulting probabilities.
    """
    x, y = _check_design(design, response01)
    if not np.isin(y, (0.0, 1.0)).all():
        raise DimensionMismatchError("logistic response must contain only 0 and 1")
    _qr_full_rank(x)
    k = x.shape[1]

    coef = np.zeros(k)
    eta = x @ coef
    loglik = _loglik(eta, y)
    converged = False
    iterations = 0
    score_norm = np.inf
    for iterations in range(1, max_iter + 1):
        prob = expit(eta)
        score = x.T @ (y - prob)
        score_norm = float(np.max(np.abs(score)))
        if score_norm < tol:
            converged = True
            iterations -= 1
            break
        weights = prob * (1.0 - prob)
        info = (x * weights[:, None]).T @ x
        try:
            step = scipy.linalg.cho_solve(scipy.linalg.cho_factor(info), score)
        except np.linalg.LinAlgError as exc:
            raise SeparationError(f"Fisher information became singular: {exc}") from exc

        scale = 1.0
        candidate = coef + step
        new_loglik = _loglik(x @ candidate, y)
        while new_loglik < loglik - 1e-12 * (1.0 + abs(loglik)) and scale > 1e-8:
            scale /= 2.0
            candidate = coef + scale * step
            new_loglik = _loglik(x @ candidate, y)
        coef, loglik = candidate, new_loglik
        eta = x @ coef
        logger.debug(
            f"IRLS iteration {iterations}: score={score_norm:.3e} loglik={loglik:.6f} step={scale}"
        )

        if np.linalg.norm(coef) > separation_bound:
            if on_separation == "raise":
                raise SeparationError(
                    f"coefficient norm exceeded {separation_bound:g} after {iterations} "
                    "iterations; fitted probabilities are pinned to 0/1"
                )
            logger.warning("Logistic fit stopped at separation bound; probabilities will be clipped")
            break
    else:
        prob = expit(eta)
        score_norm = float(np.max(np.abs(x.T @ (y - prob))))
        converged = score_norm < tol

    pinned = np.minimum(expit(eta), expit(-eta)) < PINNED_PROB
    if converged and pinned.any():
        message = (
            f"{int(pinned.sum())} fitted probabilities are pinned to 0/1 "
            f"(coefficient norm {np.linalg.norm(coef):.3g}); the classes are separated"
        )
        if on_separation == "raise":
            raise SeparationError(message)
        logger.warning(message)
        converged = False

    if not converged:
        logger.warning(f"IRLS did not converge after {iterations} iterations (score {score_norm:.3e})")

    prob = expit(eta)
    weights = prob * (1.0 - prob)
    info = (x * weights[:, None]).T @ x
    try:
        cov = scipy.linalg.cho_solve(scipy.linalg.cho_factor(info), np.eye(k))
    except np.linalg.LinAlgError:
        cov = np.full((k, k), np.nan)
    cov = (cov + cov.T) / 2.0
    return LogisticFit(
        coef=coef,
        converged=converged,
        iterations=iterations,
        score_norm=score_norm,
        loglik=loglik,
        cov=cov,
    )


def solve_spd(matrix: ArrayLike, rhs: ArrayLike) -> NDArray[np.float64]:
    """Solve ``matrix @ z = rhs`` for a symmetric positive definite ``matrix``."""
    a = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    try:
        factor = scipy.linalg.cho_factor(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(factor, np.asarray(rhs, dtype=np.float64))


def logdet_spd(matrix: ArrayLike) -> float:
    """Log-determinant of a symmetric positive definite matrix via Cholesky."""
    a = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    try:
        chol = scipy.linalg.cholesky(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from exc
    return float(2.0 * np.sum(np.log(np.diag(chol))))
