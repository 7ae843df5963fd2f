"""
Brute-force four-mode Fock tensor for small local-oscillator amplitudes.

The pair-coherent state is written out literally as T[p, q, r, s] over modes
(a+, a-, b+, b-), each side is pushed through an explicit 50:50 analyser unitary
and count-difference probabilities are read off by enumeration. Slow on purpose:
it shares no code path with the Schmidt-form engine beyond the Bessel normaliser.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.linalg import expm, logm
from scipy.special import gammaln

from common.errors import CutoffMassError, DomainError
from simulator.core.states import pair_coherent_coeffs
from simulator.models.distributions import JointIntegerDistribution

logger = logging.getLogger(__name__)

MAX_DENSE_ALPHA = 3.0
MAX_DENSE_CUTOFF = 40
CUTOFF_MASS_TOL = 1e-8


def _coherent_amplitudes(alpha: float, cutoff: int) -> np.ndarray:
    p = np.arange(cutoff)
    if alpha == 0.0:
        return (p == 0).astype(float)
    return np.exp(-0.5 * alpha * alpha + p * math.log(alpha) - 0.5 * gammaln(p + 1.0))


def analyser_mode_matrix(angle: float) -> np.ndarray:
    """M with c'_+- = M @ (a_+, a_-): rows are output ports, columns input modes."""
    phase = np.exp(-1j * angle)
    return np.array([[1.0, phase], [1.0, -phase]]) / math.sqrt(2.0)


def _generator_block(L: np.ndarray, n: int) -> np.ndarray:
    """sum_kl L[k, l] a_k^dag a_l on the two-mode block |k, n-k>, k = 0..n."""
    k = np.arange(n + 1)
    G = np.diag(L[0, 0] * k + L[1, 1] * (n - k)).astype(complex)
    for kk in range(n):
        # a_0^dag a_1 |kk, n-kk> = sqrt((kk+1)(n-kk)) |kk+1, n-kk-1>
        G[kk + 1, kk] += L[0, 1] * math.sqrt((kk + 1) * (n - kk))
        # a_1^dag a_0 |kk+1, n-kk-1> = sqrt((kk+1)(n-kk)) |kk, n-kk>
        G[kk, kk + 1] += L[1, 0] * math.sqrt((kk + 1) * (n - kk))
    return G


def analyser_unitary_blocks(angle: float, cutoff: int) -> list[np.ndarray]:
    """Photon-number-conserving blocks of W with W a_i^dag W^dag = sum_j M[j, i] a_j^dag."""
    L = logm(analyser_mode_matrix(angle))
    return [expm(_generator_block(L, n)) for n in range(cutoff)]


def _apply_side(tensor: np.ndarray, blocks: list[np.ndarray], first_axis: int) -> np.ndarray:
    """Apply the block unitary to the mode pair (first_axis, first_axis + 1)."""
    moved = np.moveaxis(tensor, (first_axis, first_axis + 1), (0, 1))
    out = np.zeros_like(moved)
    for n, block in enumerate(blocks):
        k = np.arange(n + 1)
        sub = moved[k, n - k]
        out[k, n - k] = np.tensordot(block, sub, axes=(1, 0))
    return np.moveaxis(out, (0, 1), (first_axis, first_axis + 1))


def dense_state_and_measure(
    r0: float,
    alpha: float,
    theta: float,
    phi: float,
    cutoff: int = MAX_DENSE_CUTOFF,
    beta: float | None = None,
) -> JointIntegerDistribution:
    """Joint (i, j) photon-count-difference table from the dense four-mode tensor."""
    beta = alpha if beta is None else beta
    if alpha > MAX_DENSE_ALPHA or beta > MAX_DENSE_ALPHA:
        raise DomainError(f"dense oracle supports amplitudes <= {MAX_DENSE_ALPHA}")
    if not (1 <= cutoff <= MAX_DENSE_CUTOFF):
        raise DomainError(f"cutoff must be in [1, {MAX_DENSE_CUTOFF}], got {cutoff}")

    c, _ = pair_coherent_coeffs(r0)
    pair = np.zeros(cutoff)
    pair[: min(c.size, cutoff)] = c[:cutoff]

    tensor = np.einsum(
        "p,q,r,qs->pqrs",
        _coherent_amplitudes(alpha, cutoff),
        pair,
        _coherent_amplitudes(beta, cutoff),
        np.eye(cutoff),
    ).astype(complex)

    # Only blocks with p + q < cutoff transform exactly; everything else is tail.
    totals = np.arange(cutoff)[:, None] + np.arange(cutoff)[None, :]
    inside = totals < cutoff
    tensor *= inside[:, :, None, None] * inside[None, None, :, :]
    tail = max(0.0, 1.0 - float(np.sum(np.abs(tensor) ** 2)))
    if tail > CUTOFF_MASS_TOL:
        raise CutoffMassError(f"dense tensor tail {tail:.3e} exceeds {CUTOFF_MASS_TOL:.0e}")

    tensor = _apply_side(tensor, analyser_unitary_blocks(theta, cutoff), 0)
    tensor = _apply_side(tensor, analyser_unitary_blocks(phi, cutoff), 2)
    probs4 = np.abs(tensor) ** 2

    counts = np.arange(cutoff)
    diff = (counts[:, None] - counts[None, :]).ravel()
    values = np.arange(-(cutoff - 1), cutoff)
    side = probs4.reshape(cutoff * cutoff, cutoff * cutoff)
    onehot = np.zeros((diff.size, values.size))
    onehot[np.arange(diff.size), diff + cutoff - 1] = 1.0
    joint = onehot.T @ side @ onehot

    logger.debug("Dense oracle r0=%.3g alpha=%.3g cutoff=%d: tail %.2e", r0, alpha, cutoff, tail)
    return JointIntegerDistribution(
        i_values=values,
        j_values=values,
        probs=joint,
        mass_deficit=tail,
        meta={"theta": theta, "phi": phi, "alpha": alpha, "beta": beta, "cutoff": cutoff},
    )
