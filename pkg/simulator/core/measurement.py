"""
Joint outcome distributions for the two measurement schemes.

Scheme (a), pair-coherent source: at A the analyser mixes
    c'_+- = (a_+ +- a_- e^{-i theta}) / sqrt 2
and reads out n_theta = c'_+^dag c'_+ - c'_-^dag c'_-, likewise at B with phi.
Inverting the mixing, a_+^dag = (c'_+^dag + c'_-^dag)/sqrt 2 and
a_-^dag = e^{-i theta}(c'_+^dag - c'_-^dag)/sqrt 2, so for Schmidt index n

    <p+, p-| alpha>|n> = e^{-i n theta} R_n(p+, p-)
    R_n(p+, p-) = 2^{-n/2} sum_k (-1)^{n-k} sqrt(C(n, k)) d(p+, k) d(p-, n-k)

with d(m, k) = <m|D(alpha/sqrt 2)|k>. The angle only enters as a phase, so the
per-side Gram tensors G[i, n, m] = sum_{p+ - p- = i} R_n R_m are built once and

    P(i, j) = Re sum_{n,m} c_n c_m e^{-i(n-m)(theta+phi)} G^A[i, n, m] G^B[j, n, m].

Scheme (b), higher-spin source: c_+ = a'_+ cos(theta/2) + a'_- sin(theta/2),
c_- = a'_+ sin(theta/2) - a'_- cos(theta/2), evaluated through the SU(2)
representation on the N-photon subspace.

Large-alpha limit: n_theta -> alpha X_theta with X_theta = a_- e^{-i theta} + h.c.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.special import ndtr

from common.errors import DomainError, WindowOverflowError
from simulator.core.numkernel import LogFactorialTable, displacement_matrix, hermite_functions
from simulator.core.states import MAX_SPIN_N
from simulator.models.distributions import (
    JointIntegerDistribution,
    JointQuadratureDensity,
    SchmidtState,
    SpinPairState,
)
from simulator.models.schemas import GridSpec, LossChannel

logger = logging.getLogger(__name__)

DEFAULT_MAX_ALPHA = 12.0
DEFAULT_WINDOW_SIGMAS = 8.0
MASS_DEFICIT_WARN = 1e-6


# ── Finite-alpha photon counting ─────────────────────────────────────────────


@dataclass(frozen=True)
class CountWindow:
    """Inclusive photon-count range kept for each detector on one side."""

    lo: int
    hi: int

    @property
    def counts(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @classmethod
    def around(cls, amplitude: float, n_max: int, window_sigmas: float) -> CountWindow:
        """Mean alpha^2/2 per detector +- window_sigmas standard deviations.

        The upper edge is pushed out by n_max for the photons the signal adds.
        """
        mean = 0.5 * amplitude * amplitude
        std = max(math.sqrt(mean), 1.0)
        lo = max(0, math.floor(mean - window_sigmas * std))
        hi = math.ceil(mean + window_sigmas * std) + n_max
        return cls(lo=lo, hi=hi)


def _side_amplitudes(n_states: int, amplitude: float, window: CountWindow) -> np.ndarray:
    """R_n(p+, p-) for n < n_states, shape (n_states, P, P)."""
    gamma = amplitude / math.sqrt(2.0)
    d = displacement_matrix(window.counts, np.arange(n_states), gamma)
    table = LogFactorialTable.build(max(n_states - 1, 0))

    size = window.size
    R = np.empty((n_states, size, size))
    for n in range(n_states):
        k = np.arange(n + 1)
        weights = np.exp(0.5 * table.log_binomial(n, k) - 0.5 * n * math.log(2.0))
        weights *= np.where((n - k) % 2 == 0, 1.0, -1.0)
        R[n] = (d[:, k] * weights) @ d[:, n - k].T
    return R


def side_gram_tensor(
    n_states: int,
    amplitude: float,
    window: CountWindow,
) -> tuple[np.ndarray, np.ndarray]:
    """Outcome values i = p+ - p- and G[i, n, m] = sum_{p+ - p- = i} R_n R_m."""
    R = _side_amplitudes(n_states, amplitude, window)
    size = window.size
    counts = window.counts
    diff = (counts[:, None] - counts[None, :]).ravel()
    i_values = np.arange(-(size - 1), size)
    aggregator = sparse.csr_matrix(
        (np.ones(diff.size), (np.arange(diff.size), diff + (size - 1))),
        shape=(diff.size, i_values.size),
    )

    flat = R.reshape(n_states, -1)
    gram = np.empty((i_values.size, n_states, n_states))
    for n in range(n_states):
        block = flat[: n + 1] * flat[n]
        summed = np.asarray((aggregator.T @ block.T))
        gram[:, n, : n + 1] = summed
        gram[:, : n + 1, n] = summed
    return i_values, gram


class ExactJointEngine:
    """Finite-alpha joint distribution for a SchmidtState at any angle pair.

    Gram tensors are angle independent and built once per engine.
    """

    def __init__(
        self,
        state: SchmidtState,
        window_sigmas: float = DEFAULT_WINDOW_SIGMAS,
        max_alpha: float = DEFAULT_MAX_ALPHA,
    ):
        if state.alpha > max_alpha or state.beta > max_alpha:
            raise WindowOverflowError(
                f"local-oscillator amplitude ({state.alpha}, {state.beta}) exceeds table "
                f"bound {max_alpha}; use the quadrature engine"
            )
        self.state = state
        n_states = state.c.size
        self.window_a = CountWindow.around(state.alpha, state.n_max, window_sigmas)
        self.window_b = CountWindow.around(state.beta, state.n_max, window_sigmas)

        self.i_values, self._gram_a = side_gram_tensor(n_states, state.alpha, self.window_a)
        if state.beta == state.alpha:
            self.j_values, self._gram_b = self.i_values, self._gram_a
        else:
            self.j_values, self._gram_b = side_gram_tensor(n_states, state.beta, self.window_b)

        self._flat_a = self._gram_a.reshape(self.i_values.size, -1)
        self._flat_b = self._gram_b.reshape(self.j_values.size, -1)
        logger.debug(
            "Exact engine alpha=%.3g beta=%.3g: %d Schmidt terms, windows %s / %s",
            state.alpha, state.beta, n_states, self.window_a, self.window_b,
        )

    def distribution(self, theta: float, phi: float) -> JointIntegerDistribution:
        c = self.state.c
        n = np.arange(c.size)
        w = c * np.exp(-1j * n * (theta + phi))
        weights = np.outer(w, np.conj(w)).ravel()
        probs = np.real(self._flat_a @ (weights[:, None] * self._flat_b.T))
        np.maximum(probs, 0.0, out=probs)

        captured = float(probs.sum())
        deficit = max(0.0, 1.0 - captured)
        if deficit > MASS_DEFICIT_WARN:
            logger.warning(
                "Exact distribution captured %.10f of the mass (deficit %.2e) at alpha=%.3g",
                captured, deficit, self.state.alpha,
            )
        return JointIntegerDistribution(
            i_values=self.i_values,
            j_values=self.j_values,
            probs=probs,
            mass_deficit=deficit,
            meta={"theta": theta, "phi": phi, "alpha": self.state.alpha, "beta": self.state.beta},
        )


def exact_joint_distribution(
    state: SchmidtState,
    theta: float,
    phi: float,
    window_sigmas: float = DEFAULT_WINDOW_SIGMAS,
    max_alpha: float = DEFAULT_MAX_ALPHA,
) -> JointIntegerDistribution:
    """P0_ij(theta, phi) for photon-number differences i at A and j at B."""
    return ExactJointEngine(state, window_sigmas, max_alpha).distribution(theta, phi)


# ── Quadrature (large-alpha) limit ───────────────────────────────────────────


def quadrature_joint_density(
    state: SchmidtState,
    theta: float,
    phi: float,
    grid: GridSpec | None = None,
) -> JointQuadratureDensity:
    """|sum_n c_n e^{-i n (theta+phi)} psi_n(x) psi_n(y)|^2 on the grid."""
    grid = grid or GridSpec()
    axis = grid.axis()
    psi = hermite_functions(state.c.size - 1, axis)
    n = np.arange(state.c.size)
    w = state.c * np.exp(-1j * n * (theta + phi))
    amplitude = (psi.T * w) @ psi
    density = np.abs(amplitude) ** 2
    return JointQuadratureDensity(
        x=axis,
        y=axis,
        step=grid.step,
        density=density,
        meta={"theta": theta, "phi": phi},
    )


def _loss_kernel(axis: np.ndarray, step: float, eta: float, noise_std: float) -> np.ndarray:
    """K[u, k]: probability that eta * x_k + noise lands in output cell u."""
    edges = np.concatenate([axis - 0.5 * step, [axis[-1] + 0.5 * step]])
    shifted = (edges[:, None] - eta * axis[None, :]) / noise_std
    cdf = ndtr(shifted)
    return cdf[1:] - cdf[:-1]


def apply_loss_quadrature(
    density: JointQuadratureDensity,
    channel: LossChannel,
) -> JointQuadratureDensity:
    """X_L = eta X + N(0, 1 - eta) on each side, as a per-axis scale-and-convolve."""
    if channel.is_lossless:
        return density
    noise_std = channel.vacuum_noise_std
    kx = _loss_kernel(density.x, density.step, channel.eta, noise_std)
    ky = kx if density.y is density.x else _loss_kernel(
        density.y, density.step, channel.eta, noise_std
    )
    lossy = kx @ density.density @ ky.T
    return JointQuadratureDensity(
        x=density.x,
        y=density.y,
        step=density.step,
        density=lossy,
        meta={**density.meta, "eta": channel.eta},
    )


# ── Higher-spin source ───────────────────────────────────────────────────────


@lru_cache(maxsize=64)
def _spin_generator_eigensystem(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigensystem of i K with K = c_-^dag c_+ - c_+^dag c_- on |p, N-p>."""
    p = np.arange(1, N + 1)
    upper = np.sqrt(p * (N - p + 1.0))  # K[p-1, p]
    K = np.diag(upper, k=1) - np.diag(upper, k=-1)
    eigenvalues, vectors = np.linalg.eigh(1j * K)
    return eigenvalues, vectors


def spin_rotation_matrix(N: int, theta: float) -> np.ndarray:
    """R[p, k] = <p, N-p|_c |k, N-k>_{a'} for the polariser setting theta.

    a'_+^dag = cos c_+^dag + sin c_-^dag is the rotation U(theta/2) = exp((theta/2) K);
    a'_-^dag = -( -sin c_+^dag + cos c_-^dag ) adds the sign (-1)^{N-k}.
    """
    eigenvalues, vectors = _spin_generator_eigensystem(N)
    phases = np.exp(-1j * eigenvalues * (0.5 * theta))
    U = np.real((vectors * phases) @ vectors.conj().T)
    k = np.arange(N + 1)
    return U * np.where((N - k) % 2 == 0, 1.0, -1.0)[None, :]


def spin_joint_distribution(
    state: SpinPairState,
    theta: float,
    phi: float,
) -> JointIntegerDistribution:
    """P0(i, j) over i = 2 m_A, j = 2 m_B for the higher-spin pair state."""
    _check_spin_number(state.N)
    return spin_joint_from_rotations(
        state,
        spin_rotation_matrix(state.N, theta),
        spin_rotation_matrix(state.N, phi),
        theta,
        phi,
    )


def _check_spin_number(N: int) -> None:
    if N < 1 or N > MAX_SPIN_N:
        raise DomainError(f"N must be in [1, {MAX_SPIN_N}], got {N}")


def spin_joint_from_rotations(
    state: SpinPairState,
    rot_a: np.ndarray,
    rot_b: np.ndarray,
    theta: float,
    phi: float,
) -> JointIntegerDistribution:
    """Joint spin distribution from precomputed rotation matrices for theta and phi."""
    N = state.N
    _check_spin_number(N)
    if rot_a.shape != (N + 1, N + 1) or rot_b.shape != (N + 1, N + 1):
        raise DomainError(f"rotation matrices must be {N + 1}x{N + 1}")
    amplitude = (rot_a * state.amplitudes) @ rot_b.T
    probs = amplitude * amplitude
    outcomes = 2 * np.arange(N + 1) - N
    deficit = max(0.0, 1.0 - float(probs.sum()))
    return JointIntegerDistribution(
        i_values=outcomes,
        j_values=outcomes,
        probs=probs,
        mass_deficit=deficit,
        meta={"theta": theta, "phi": phi, "N": N},
    )
