"""
Special-function primitives shared by every distribution builder.

Conventions
-----------
Quadrature: X = a e^{-i theta} + a^dagger e^{i theta}, so the vacuum variance of X
is 1 and psi_0(x) = (2 pi)^{-1/4} exp(-x^2 / 4).

Noise: zero-mean Gaussian; ``gaussian_tail(i, sigma)`` is P(noise >= -i).

Every factorial-bearing formula is evaluated in log space and exponentiated last.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import eval_genlaguerre, gammaln, i0, i0e, ndtr

from common.errors import DomainError

logger = logging.getLogger(__name__)

BESSEL_OVERFLOW_GUARD = 700.0
MAX_HERMITE_ORDER = 200
_PSI0_NORM = (2.0 * math.pi) ** -0.25


# ── Log factorials ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LogFactorialTable:
    """ln(n!) for n = 0..n_max."""

    values: NDArray[np.float64]

    @classmethod
    def build(cls, n_max: int) -> LogFactorialTable:
        if n_max < 0:
            raise DomainError(f"n_max must be nonnegative, got {n_max}")
        values = gammaln(np.arange(n_max + 1, dtype=float) + 1.0)
        values[0] = 0.0
        values.setflags(write=False)
        return cls(values=values)

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def __getitem__(self, n):
        return self.values[n]

    def log_binomial(self, n: ArrayLike, k: ArrayLike) -> NDArray[np.float64]:
        n = np.asarray(n)
        k = np.asarray(k)
        return self.values[n] - self.values[k] - self.values[n - k]


# ── Bessel ───────────────────────────────────────────────────────────────────


def _check_bessel_argument(x: float) -> None:
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"bessel_i0 requires x >= 0, got {x}")
    if x > BESSEL_OVERFLOW_GUARD:
        raise DomainError(f"bessel_i0 argument {x} beyond overflow guard {BESSEL_OVERFLOW_GUARD}")


def bessel_i0(x: float) -> float:
    """Modified Bessel function I_0(x) for 0 <= x <= 700."""
    _check_bessel_argument(x)
    return float(i0(x))


def log_bessel_i0(x: float) -> float:
    """ln I_0(x), via the exponentially scaled i0e so large x never overflows."""
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"log_bessel_i0 requires x >= 0, got {x}")
    return float(np.log(i0e(x)) + x)


# ── Hermite functions ────────────────────────────────────────────────────────


def hermite_functions(n_max: int, x: ArrayLike) -> NDArray[np.float64]:
    """psi_0..psi_{n_max} at the points ``x``; shape (n_max + 1, len(x)).

    Upward recurrence on the orthonormal functions themselves:
    psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n + 1).
    """
    if n_max < 0 or n_max > MAX_HERMITE_ORDER:
        raise DomainError(f"hermite order must be in [0, {MAX_HERMITE_ORDER}], got {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.empty((n_max + 1, x.size))
    psi[0] = _PSI0_NORM * np.exp(-0.25 * x * x)
    if n_max >= 1:
        psi[1] = x * psi[0]
    for n in range(1, n_max):
        psi[n + 1] = (x * psi[n] - math.sqrt(n) * psi[n - 1]) / math.sqrt(n + 1)
    return psi


def hermite_psi(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """psi_n(x) = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt 2) e^{-x^2/4}."""
    values = hermite_functions(n, x)[n]
    return float(values[0]) if np.ndim(x) == 0 else values


# ── Displacement operator ────────────────────────────────────────────────────


def displacement_matrix(rows: ArrayLike, cols: ArrayLike, beta: float) -> NDArray[np.float64]:
    """<m|D(beta)|n> for real beta, m over ``rows`` and n over ``cols``.

    m >= n:  sqrt(n!/m!) beta^{m-n} e^{-beta^2/2} L_n^{(m-n)}(beta^2)
    m <  n:  sqrt(m!/n!) (-beta)^{n-m} e^{-beta^2/2} L_m^{(n-m)}(beta^2)
    """
    m = np.asarray(rows, dtype=int)[:, None]
    n = np.asarray(cols, dtype=int)[None, :]
    if np.any(m < 0) or np.any(n < 0):
        raise DomainError("Fock indices must be nonnegative")
    if not math.isfinite(beta):
        raise DomainError(f"displacement must be finite, got {beta}")

    if beta == 0.0:
        return (m == n).astype(float)

    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    gap = hi - lo
    x = beta * beta

    log_prefactor = (
        0.5 * (gammaln(lo + 1.0) - gammaln(hi + 1.0)) + gap * math.log(abs(beta)) - 0.5 * x
    )
    # sign of beta^{m-n} (m >= n) or (-beta)^{n-m} (m < n)
    base_sign = np.where(m >= n, math.copysign(1.0, beta), -math.copysign(1.0, beta))
    sign = np.where(gap % 2 == 0, 1.0, base_sign)

    laguerre = eval_genlaguerre(lo, gap, x)
    return sign * np.exp(log_prefactor) * laguerre


def displaced_fock_overlap(m: int, n: int, beta: float) -> float:
    """<m|D(beta)|n> for real beta, with <m|D(beta)|0> = e^{-beta^2/2} beta^m / sqrt(m!)."""
    return float(displacement_matrix([m], [n], beta)[0, 0])


# ── Gaussian readout noise ───────────────────────────────────────────────────


def gaussian_tail(i: ArrayLike, sigma: float) -> NDArray[np.float64] | float:
    """P(noise >= -i) for zero-mean Gaussian noise of standard deviation sigma.

    sigma = 0 is the sharp classification: 1 when i >= 0, else 0.
    """
    if sigma < 0.0 or not math.isfinite(sigma):
        raise DomainError(f"sigma must be finite and >= 0, got {sigma}")
    values = np.asarray(i, dtype=float)
    if sigma == 0.0:
        out = (values >= 0.0).astype(float)
    else:
        out = ndtr(values / sigma)
    return float(out) if out.ndim == 0 else out
