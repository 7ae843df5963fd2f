"""Sampling estimate of the binarised probabilities, with standard errors."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from common.config_manager import get_settings
from common.errors import DomainError
from simulator.core.bell import run_sweep
from simulator.core.sources import Distribution
from simulator.models.distributions import JointIntegerDistribution, JointQuadratureDensity
from simulator.models.schemas import NoiseModel

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Integer tallies of ++, +A and +B outcomes over n_samples draws."""

    n_samples: int
    count_pp: int
    count_a: int
    count_b: int
    seed: int

    @staticmethod
    def _stderr(p: float, n: int) -> float:
        return math.sqrt(max(p * (1.0 - p), 0.0) / n)

    @property
    def p_pp(self) -> float:
        return self.count_pp / self.n_samples

    @property
    def p_a(self) -> float:
        return self.count_a / self.n_samples

    @property
    def p_b(self) -> float:
        return self.count_b / self.n_samples

    @property
    def stderr_pp(self) -> float:
        return self._stderr(self.p_pp, self.n_samples)

    @property
    def stderr_a(self) -> float:
        return self._stderr(self.p_a, self.n_samples)

    @property
    def stderr_b(self) -> float:
        return self._stderr(self.p_b, self.n_samples)


def _outcome_table(dist: Distribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(dist, JointIntegerDistribution):
        return dist.i_values.astype(float), dist.j_values.astype(float), dist.probs
    if isinstance(dist, JointQuadratureDensity):
        return dist.x, dist.y, dist.density * dist.step * dist.step
    raise TypeError(f"unsupported distribution type {type(dist).__name__}")


def _tally_batch(
    args: tuple[np.random.SeedSequence, int],
    xs: np.ndarray,
    ys: np.ndarray,
    cdf: np.ndarray,
    sigma: float,
) -> tuple[int, int, int]:
    seq, size = args
    rng = np.random.default_rng(seq)
    cells = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
    cells = np.minimum(cells, cdf.size - 1)
    rows, cols = np.divmod(cells, ys.size)
    a = xs[rows]
    b = ys[cols]
    if sigma > 0.0:
        a = a + sigma * rng.standard_normal(size)
        b = b + sigma * rng.standard_normal(size)
    plus_a = a >= 0.0
    plus_b = b >= 0.0
    return int(np.count_nonzero(plus_a & plus_b)), int(plus_a.sum()), int(plus_b.sum())


def mc_sample(
    dist: Distribution,
    noise: NoiseModel,
    n_samples: int,
    seed: int = 0,
    batch: int | None = None,
    jobs: int = 1,
) -> MonteCarloEstimate:
    """Draw (i, j) from ``dist``, add independent readout noise per side and tally signs.

    Each batch draws from its own stream spawned from ``seed``, so the tallies
    depend only on (seed, n_samples, batch) and not on ``jobs``.
    """
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}, got {n_samples}")
    batch = batch or get_settings().mc_batch

    xs, ys, table = _outcome_table(dist)
    cdf = np.cumsum(np.clip(table, 0.0, None).ravel())

    sizes = [batch] * (n_samples // batch)
    if n_samples % batch:
        sizes.append(n_samples % batch)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    tallies = run_sweep(
        lambda args: _tally_batch(args, xs, ys, cdf, noise.sigma),
        list(zip(streams, sizes)),
        jobs,
    )
    count_pp, count_a, count_b = (int(sum(col)) for col in zip(*tallies))
    logger.debug(
        "Monte Carlo: %d samples in %d batches, P++=%.6f",
        n_samples, len(sizes), count_pp / n_samples,
    )
    return MonteCarloEstimate(
        n_samples=n_samples, count_pp=count_pp, count_a=count_a, count_b=count_b, seed=seed
    )
