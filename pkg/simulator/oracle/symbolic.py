"""
Exact polynomial expansion of the higher-spin pair state behind rotated analysers.

The state (a'_+^dag b'_+^dag + a'_-^dag b'_-^dag)^N |0> / (N! sqrt(N+1)) is expanded
after substituting the measured modes on each side:

    a'_+^dag -> C x_+ + S x_-,    a'_-^dag -> S x_+ - C x_-

with C = cos(theta/2), S = sin(theta/2) and x = c^dag. A monomial
x_+^p x_-^(N-p) y_+^q y_-^(N-q) acting on vacuum has norm sqrt(p! (N-p)! q! (N-q)!).
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
import sympy as sp

from common.errors import DomainError
from simulator.models.distributions import JointIntegerDistribution

logger = logging.getLogger(__name__)

MAX_SYMBOLIC_N = 4

_xp, _xm, _yp, _ym = sp.symbols("x_p x_m y_p y_m")
_ca, _sa, _cb, _sb = sp.symbols("C_a S_a C_b S_b", real=True)


@lru_cache(maxsize=None)
def _expanded_polynomial(N: int) -> sp.Poly:
    a_plus = _ca * _xp + _sa * _xm
    a_minus = _sa * _xp - _ca * _xm
    b_plus = _cb * _yp + _sb * _ym
    b_minus = _sb * _yp - _cb * _ym
    return sp.Poly(sp.expand((a_plus * b_plus + a_minus * b_minus) ** N), _xp, _xm, _yp, _ym)


def symbolic_spin_expand(N: int, theta: float, phi: float) -> JointIntegerDistribution:
    """P(i, j) over i = 2p - N, j = 2q - N from the expanded polynomial."""
    if not isinstance(N, (int, np.integer)) or N < 1 or N > MAX_SYMBOLIC_N:
        raise DomainError(f"N must be an integer in [1, {MAX_SYMBOLIC_N}], got {N}")
    N = int(N)

    values = {
        _ca: sp.cos(sp.Float(theta, 30) / 2),
        _sa: sp.sin(sp.Float(theta, 30) / 2),
        _cb: sp.cos(sp.Float(phi, 30) / 2),
        _sb: sp.sin(sp.Float(phi, 30) / 2),
    }
    scale = sp.factorial(N) * sp.sqrt(N + 1)

    amplitude = np.zeros((N + 1, N + 1))
    for (p, _, q, _), coeff in _expanded_polynomial(N).terms():
        norm = sp.sqrt(
            sp.factorial(p) * sp.factorial(N - p) * sp.factorial(q) * sp.factorial(N - q)
        )
        amplitude[p, q] = float(sp.N(coeff.subs(values) * norm / scale, 30))

    probs = amplitude * amplitude
    outcomes = 2 * np.arange(N + 1) - N
    logger.debug("Symbolic spin expansion N=%d: total mass %.15f", N, probs.sum())
    return JointIntegerDistribution(
        i_values=outcomes,
        j_values=outcomes,
        probs=probs,
        mass_deficit=max(0.0, 1.0 - float(probs.sum())),
        meta={"theta": theta, "phi": phi, "N": N, "oracle": "symbolic"},
    )


def symbolic_spin_norm(N: int) -> sp.Rational:
    """Squared norm of the expanded state in exact rational arithmetic (angles at zero)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    total = sp.Integer(0)
    # With identity analysers the state is sum_k C(N,k) (a_+ b_+)^k (a_- b_-)^(N-k).
    for k in range(N + 1):
        coeff = sp.binomial(N, k)
        total += coeff**2 * (sp.factorial(k) * sp.factorial(N - k)) ** 2
    return sp.Rational(total, sp.factorial(N) ** 2 * (N + 1))
