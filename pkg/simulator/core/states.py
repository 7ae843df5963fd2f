"""
State families in Schmidt form.

Pair-coherent signal/idler with coherent local oscillators:
    |psi> = I_0(2 r0^2)^{-1/2} sum_n (r0^2)^n / n! |n>_{a-}|n>_{b-} |alpha>_{a+}|beta>_{b+}

Higher-spin pair state:
    |phi> = (a'_+^dag b'_+^dag + a'_-^dag b'_-^dag)^N |0> / (N! sqrt(N+1))

States are never materialised as dense four-mode tensors.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from common.errors import DomainError
from simulator.core.numkernel import LogFactorialTable, log_bessel_i0
from simulator.models.distributions import SchmidtState, SpinPairState

logger = logging.getLogger(__name__)

MAX_R0 = 3.0
MAX_TAIL_TOL = 1e-6
MAX_SPIN_N = 200


def _pair_coherent_tail(r0_sq: float, n: int, log_norm: float) -> float:
    """Bound on sum_{k>n} c_k^2.

    Beyond k > r0^2 the ratio c_{k+1}^2 / c_k^2 = (r0^2/(k+1))^2 decreases, so the tail
    is dominated by a geometric series with ratio q = (r0^2/(n+2))^2.
    """
    q = (r0_sq / (n + 2)) ** 2
    if q >= 1.0:
        return math.inf
    log_next = 2.0 * ((n + 1) * math.log(r0_sq) - math.lgamma(n + 2)) - log_norm
    return math.exp(log_next) / (1.0 - q)


def pair_coherent_coeffs(r0: float, tail_tol: float = 1e-14) -> tuple[np.ndarray, float]:
    """Schmidt coefficients c_n and the analytic bound on the discarded tail.

    n_max is the smallest n >= floor(r0^2) whose tail bound is below tail_tol.
    """
    if not math.isfinite(r0) or r0 < 0.0 or r0 > MAX_R0:
        raise DomainError(f"r0 must be in [0, {MAX_R0}], got {r0}")
    if not (0.0 < tail_tol <= MAX_TAIL_TOL):
        raise DomainError(f"tail_tol must be in (0, {MAX_TAIL_TOL}], got {tail_tol}")

    if r0 == 0.0:
        return np.array([1.0]), 0.0

    r0_sq = r0 * r0
    # sum_n (r0^2)^{2n} / (n!)^2 = I_0(2 r0^2)
    log_norm = log_bessel_i0(2.0 * r0_sq)

    n_max = max(0, math.floor(r0_sq))
    tail = _pair_coherent_tail(r0_sq, n_max, log_norm)
    while tail >= tail_tol:
        n_max += 1
        tail = _pair_coherent_tail(r0_sq, n_max, log_norm)

    table = LogFactorialTable.build(n_max)
    n = np.arange(n_max + 1)
    log_c = n * math.log(r0_sq) - table.values - 0.5 * log_norm
    c = np.exp(log_c)
    logger.debug("Pair-coherent r0=%.4g: n_max=%d, tail bound %.3g", r0, n_max, tail)
    return c, tail


def pair_coherent_state(
    r0: float,
    alpha: float,
    beta: float | None = None,
    tail_tol: float = 1e-14,
) -> SchmidtState:
    """Pair-coherent signal/idler with real coherent local oscillators alpha, beta."""
    beta = alpha if beta is None else beta
    if alpha < 0.0 or beta < 0.0 or not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError(f"local-oscillator amplitudes must be real and >= 0, got {alpha}, {beta}")
    c, tail = pair_coherent_coeffs(r0, tail_tol)
    c.setflags(write=False)
    return SchmidtState(
        c=c,
        alpha=float(alpha),
        beta=float(beta),
        r0=float(r0),
        n_max=c.size - 1,
        tail_bound=tail,
    )


def spin_schmidt(N: int) -> SpinPairState:
    """Binomial expansion of the higher-spin pair state.

    (x + y)^N = sum_k C(N, k) x^k y^{N-k} with x = a'_+^dag b'_+^dag, y = a'_-^dag b'_-^dag;
    x^k y^{N-k} |0> = k! (N-k)! |k, N-k>_A |k, N-k>_B, so each amplitude is
    C(N, k) k! (N-k)! / (N! sqrt(N+1)) = 1 / sqrt(N+1).
    """
    if not isinstance(N, (int, np.integer)) or N < 1 or N > MAX_SPIN_N:
        raise DomainError(f"N must be an integer in [1, {MAX_SPIN_N}], got {N}")
    N = int(N)
    table = LogFactorialTable.build(N)
    k = np.arange(N + 1)
    log_amp = (
        table.log_binomial(N, k)
        + table.values[k]
        + table.values[N - k]
        - table.values[N]
        - 0.5 * math.log(N + 1)
    )
    amplitudes = np.exp(log_amp)
    amplitudes.setflags(write=False)
    basis = tuple((int(kk), N - int(kk)) for kk in k)
    return SpinPairState(N=N, amplitudes=amplitudes, basis=basis)
