"""Seeded, splittable random streams and the samplers built on them."""

from __future__ import annotations

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from acekit.exceptions import DimensionMismatchError, NotPositiveDefiniteError


class SeededRng:
    """Counter-based random stream identified by ``(seed, stream)``.

    Every stream is an independent Philox key derived from the master seed, so
    replicate ``r`` draws the same numbers regardless of which worker runs it.
    """

    def __init__(self, seed: int, stream: int = 0) -> None:
        self._seed = int(seed)
        self._stream = int(stream)
        sequence = np.random.SeedSequence(self._seed, spawn_key=(self._stream,))
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream(self) -> int:
        return self._stream

    def spawn(self, stream: int) -> SeededRng:
        """Return the sibling stream ``stream`` of the same master seed."""
        return SeededRng(self._seed, stream)

    def standard_normal(self, size: int | tuple[int, ...]) -> NDArray[np.float64]:
        return self._generator.standard_normal(size)

    def uniform(self, size: int | tuple[int, ...]) -> NDArray[np.float64]:
        return self._generator.random(size)

    def bernoulli(self, prob: ArrayLike, size: int | None = None) -> NDArray[np.int64]:
        """Draw 0/1 outcomes with success probability ``prob`` (scalar or per-draw)."""
        prob = np.asarray(prob, dtype=np.float64)
        shape = prob.shape if size is None else (size,)
        return (self._generator.random(shape) < prob).astype(np.int64)

    def choice(self, values: NDArray, size: int) -> NDArray:
        """Uniform draws with replacement from ``values``."""
        return values[self._generator.integers(0, len(values), size=size)]

    def __repr__(self) -> str:
        return f"SeededRng(seed={self._seed}, stream={self._stream})"


def cholesky_lower(cov: ArrayLike) -> NDArray[np.float64]:
    """Lower Cholesky factor of a symmetric positive definite matrix."""
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    if cov.shape[0] != cov.shape[1]:
        raise DimensionMismatchError(f"covariance must be square, got {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
        raise NotPositiveDefiniteError("covariance matrix is not symmetric")
    try:
        return scipy.linalg.cholesky(cov, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"covariance matrix is not positive definite: {exc}") from exc


def mvn_sample(rng: SeededRng, mean: ArrayLike, cov: ArrayLike, n: int) -> NDArray[np.float64]:
    """Draw ``n`` rows from N(mean, cov)."""
    mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
    chol = cholesky_lower(cov)
    if chol.shape[0] != mean.shape[0]:
        raise DimensionMismatchError(
            f"mean has length {mean.shape[0]} but covariance is {chol.shape[0]}x{chol.shape[0]}"
        )
    z = rng.standard_normal((n, mean.shape[0]))
    return mean + z @ chol.T
