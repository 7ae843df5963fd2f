"""
Noisy binarisation, the Clauser-Horne ratio, the noise cutoff and angle search.

A readout i (photon-number difference or quadrature) is reported as + when
i + noise >= 0 with zero-mean Gaussian noise, so each outcome carries the weight
Phi(i / sigma). The CH ratio

    S = [P++(theta, phi) - P++(theta, phi') + P++(theta', phi) + P++(theta', phi')]
        / [P+A(theta') + P+B(phi)]

exceeds 1 only for correlations no local model reproduces.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from common.config_manager import get_settings
from common.debug_log import trace_span
from common.errors import (
    DegenerateDenominatorError,
    MassDeficitError,
    MonotonicityError,
    NumericalGuardError,
    UnsupportedConfigurationError,
)
from simulator.core.numkernel import gaussian_tail
from simulator.core.sources import Distribution, ExactSource, Source, SpinSource
from simulator.core.states import pair_coherent_state, spin_schmidt
from simulator.models.distributions import JointIntegerDistribution, JointQuadratureDensity
from simulator.models.schemas import ChEvaluation, ChSettings, CutoffResult, NoiseModel

logger = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-12
MAX_DEFICIT = 1e-6
# Scan range grows by doubling at most this many times when S > 1 at its far end.
_MAX_SCAN_EXTENSIONS = 4

T = TypeVar("T")
R = TypeVar("R")


def run_sweep(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Evaluate ``fn`` over ``items``; results keep sweep order for any ``jobs``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ── Binarisation ─────────────────────────────────────────────────────────────


def _clip_probability(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


def binarized_probs(
    dist: Distribution,
    noise: NoiseModel,
    max_deficit: float = MAX_DEFICIT,
) -> tuple[float, float, float]:
    """(P++, P+ at A, P+ at B) after Gaussian readout noise and sign classification."""
    if dist.mass_deficit > max_deficit:
        raise MassDeficitError(
            f"distribution mass deficit {dist.mass_deficit:.3e} exceeds {max_deficit:.1e}"
        )

    if isinstance(dist, JointIntegerDistribution):
        wa = np.atleast_1d(gaussian_tail(dist.i_values, noise.sigma))
        wb = np.atleast_1d(gaussian_tail(dist.j_values, noise.sigma))
        table = dist.probs
    elif isinstance(dist, JointQuadratureDensity):
        wa = gaussian_tail(dist.x, noise.sigma) * dist.step
        wb = gaussian_tail(dist.y, noise.sigma) * dist.step
        table = dist.density
    else:
        raise TypeError(f"unsupported distribution type {type(dist).__name__}")

    p_pp = wa @ table @ wb
    p_a = wa @ table.sum(axis=1)
    p_b = table.sum(axis=0) @ wb
    if isinstance(dist, JointQuadratureDensity):
        # Marginal sums above carry one factor of step from the weights only.
        p_a *= dist.step
        p_b *= dist.step
    return _clip_probability(p_pp), _clip_probability(p_a), _clip_probability(p_b)


# ── CH ratio ─────────────────────────────────────────────────────────────────


def _check_loss(source: Source, noise: NoiseModel) -> None:
    if not math.isclose(source.eta, noise.eta, rel_tol=0.0, abs_tol=1e-12):
        raise UnsupportedConfigurationError(
            f"noise model eta={noise.eta} does not match the source's loss channel eta={source.eta}"
        )


def ch_ratio(source: Source, settings: ChSettings, noise: NoiseModel) -> ChEvaluation:
    """Assemble the four joint and two marginal + probabilities and their ratio."""
    _check_loss(source, noise)
    p_pp: dict[str, float] = {}
    p_a = p_b = 0.0
    for key, (theta, phi) in settings.pairs().items():
        joint, marginal_a, marginal_b = binarized_probs(source.joint(theta, phi), noise)
        p_pp[key] = joint
        if key == "thetaprime_phi":
            p_a = marginal_a
        if key == "theta_phi":
            p_b = marginal_b

    denominator = p_a + p_b
    if denominator <= DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"CH denominator {denominator:.3e} at settings {settings.as_tuple()}"
        )
    numerator = (
        p_pp["theta_phi"] - p_pp["theta_phiprime"] + p_pp["thetaprime_phi"]
        + p_pp["thetaprime_phiprime"]
    )
    return ChEvaluation(p_pp=p_pp, p_a=p_a, p_b=p_b, s=numerator / denominator)


def s_versus_sigma(
    source: Source,
    settings: ChSettings,
    sigmas: Sequence[float],
    noise: NoiseModel | None = None,
    jobs: int = 1,
) -> list[ChEvaluation]:
    """CH evaluations along a list of readout-noise levels, in input order."""
    base = noise or NoiseModel(eta=source.eta)
    return run_sweep(lambda s: ch_ratio(source, settings, base.with_sigma(s)), sigmas, jobs)


def s_versus_alpha(
    r0: float,
    alphas: Sequence[float],
    settings: ChSettings,
    noise: NoiseModel | None = None,
    tail_tol: float = 1e-14,
    jobs: int = 1,
) -> list[ChEvaluation]:
    """Finite-alpha photon-counting CH evaluations with alpha = beta."""
    noise = noise or NoiseModel()

    def evaluate(alpha: float) -> ChEvaluation:
        source = ExactSource(pair_coherent_state(r0, alpha, tail_tol=tail_tol), eta=noise.eta)
        return ch_ratio(source, settings, noise)

    return run_sweep(evaluate, alphas, jobs)


# ── Noise cutoff ─────────────────────────────────────────────────────────────


def _first_increase(values: np.ndarray, tol: float) -> int | None:
    rises = np.nonzero(np.diff(values) > tol)[0]
    return None if rises.size == 0 else int(rises[0])


def sigma_cutoff(
    source: Source,
    settings: ChSettings,
    tol: float | None = None,
    eta: float | None = None,
    strict: bool = True,
) -> CutoffResult:
    """sup{sigma : S(sigma) > 1}, bracketed by an upward scan and refined by bisection.

    The scan step is noise_scale / scan_steps_per_scale. On integer lattices the
    zero outcome counts fully as + only at sigma = 0, so monotonicity is checked on
    sigma > 0 there and on the whole scan for continuous outcomes.
    """
    cfg = get_settings()
    tol = cfg.cutoff_tol if tol is None else tol
    if not (0.0 < tol <= 1e-3):
        raise UnsupportedConfigurationError(f"cutoff tolerance must be in (0, 1e-3], got {tol}")
    base = NoiseModel(sigma=0.0, eta=source.eta if eta is None else eta)

    def s_of(sigma: float) -> float:
        return ch_ratio(source, settings, base.with_sigma(sigma)).s

    with trace_span("sigma_cutoff", mode=source.mode.value):
        s_zero = s_of(0.0)
        if s_zero <= 1.0:
            logger.info("No violation at sigma=0 (S=%.6f); cutoff is 0", s_zero)
            return CutoffResult(sigma_c=0.0, s_at_zero=s_zero, violated=False)

        step = source.noise_scale / cfg.scan_steps_per_scale
        n_points = int(math.ceil(cfg.scan_max_scales * cfg.scan_steps_per_scale))
        sigmas = step * np.arange(1, n_points + 1)
        values = np.array([s_of(s) for s in sigmas])
        for _ in range(_MAX_SCAN_EXTENSIONS):
            if values[-1] <= 1.0:
                break
            extra = sigmas[-1] + step * np.arange(1, sigmas.size + 1)
            sigmas = np.concatenate([sigmas, extra])
            values = np.concatenate([values, [s_of(s) for s in extra]])
        else:
            if values[-1] > 1.0:
                raise NumericalGuardError(
                    f"S still above 1 at sigma={sigmas[-1]:.4g}; no cutoff within scan range"
                )

        if source.continuous_outcomes:
            checked_sigmas = np.concatenate([[0.0], sigmas])
            checked_values = np.concatenate([[s_zero], values])
        else:
            checked_sigmas, checked_values = sigmas, values
        rise = _first_increase(checked_values, cfg.monotone_tol)
        monotone = rise is None
        if not monotone:
            message = (
                f"S(sigma) increases between sigma={checked_sigmas[rise]:.4g} "
                f"and {checked_sigmas[rise + 1]:.4g}"
            )
            if strict:
                raise MonotonicityError(message)
            logger.warning(message)

        all_sigmas = np.concatenate([[0.0], sigmas])
        all_values = np.concatenate([[s_zero], values])
        above = np.nonzero(all_values > 1.0)[0]
        last = int(above[-1])
        lo, hi = float(all_sigmas[last]), float(all_sigmas[last + 1])
        if last == 0 and not source.continuous_outcomes:
            # S jumps at sigma = 0 on lattices; bisect from just above zero.
            lo = min(tol, hi) * 1e-3
            if s_of(lo) <= 1.0:
                logger.info("Violation exists only at sigma=0 (S(0)=%.6f)", s_zero)
                return CutoffResult(
                    sigma_c=0.0,
                    s_at_zero=s_zero,
                    bracket=(0.0, lo),
                    scan_points=int(sigmas.size),
                    monotone=monotone,
                    violated=True,
                )

        sigma_c = bisect(lambda s: s_of(s) - 1.0, lo, hi, xtol=tol)
        logger.info(
            "Noise cutoff sigma_c=%.6g (bracket %.4g-%.4g, S(0)=%.6f, %d scan points)",
            sigma_c, lo, hi, s_zero, sigmas.size,
        )
    return CutoffResult(
        sigma_c=float(sigma_c),
        s_at_zero=s_zero,
        bracket=(lo, hi),
        scan_points=int(sigmas.size),
        monotone=monotone,
        violated=True,
    )


def photon_cutoff_from_quadrature(sigma0: float, alpha: float, eta: float = 1.0) -> float:
    """Photon-number cutoff implied by a quadrature cutoff: n = eta * alpha * X_L."""
    return eta * alpha * sigma0


# ── Angle optimisation for the higher-spin state ─────────────────────────────


def optimize_psi(
    N: int,
    noise: NoiseModel | None = None,
    source: SpinSource | None = None,
) -> tuple[float, ChEvaluation]:
    """Maximise S over psi with (theta, phi, theta', phi') = (0, psi, 2 psi, 3 psi)."""
    cfg = get_settings()
    noise = noise or NoiseModel()
    source = source or SpinSource(spin_schmidt(N))

    def s_of(psi: float) -> float:
        return ch_ratio(source, ChSettings.from_psi(psi), noise).s

    with trace_span("optimize_psi", N=N, sigma=noise.sigma):
        grid = 0.5 * math.pi * np.arange(1, cfg.psi_scan_points + 1) / cfg.psi_scan_points
        values = np.array([s_of(p) for p in grid])
        best = int(np.argmax(values))
        lo = grid[max(best - 1, 0)]
        hi = grid[min(best + 1, grid.size - 1)]

        if 0 < best < grid.size - 1:
            try:
                result = minimize_scalar(
                    lambda p: -s_of(p),
                    bracket=(lo, grid[best], hi),
                    method="golden",
                    tol=cfg.psi_tol,
                )
            except ValueError:
                result = minimize_scalar(
                    lambda p: -s_of(p),
                    bounds=(lo, hi),
                    method="bounded",
                    options={"xatol": cfg.psi_tol},
                )
        else:
            logger.warning("psi optimum for N=%d sits on the scan edge (psi=%.4g)", N, grid[best])
            result = minimize_scalar(
                lambda p: -s_of(p),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": cfg.psi_tol},
            )

        psi = float(result.x)
        if -float(result.fun) < values[best]:
            psi = float(grid[best])
        evaluation = ch_ratio(source, ChSettings.from_psi(psi), noise)
        logger.debug("N=%d sigma=%.4g: psi_opt=%.6f S=%.6f", N, noise.sigma, psi, evaluation.s)
    return psi, evaluation
