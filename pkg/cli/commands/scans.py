"""Parameter sweeps behind the S-versus-alpha, S-versus-sigma and spin-state tables."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from cli.commands.evaluate import build_source, run_provenance
from cli.schemas import CommandOutput, RunConfig
from common.config_manager import get_settings
from common.debug_log import trace_span
from common.errors import ConfigError, MonotonicityError
from simulator.core.bell import (
    optimize_psi,
    photon_cutoff_from_quadrature,
    run_sweep,
    s_versus_sigma,
    sigma_cutoff,
)
from simulator.core.sources import SpinSource
from simulator.core.states import spin_schmidt
from simulator.models.schemas import ChSettings, MeasurementMode, NoiseModel

logger = logging.getLogger(__name__)

NOISE_SCAN_POINTS = 25
NOISE_SCAN_SPAN = 0.6


def cmd_alpha_scan(config: RunConfig) -> CommandOutput:
    """S at sigma = 0 and the noise cutoff for each local-oscillator amplitude."""
    mode = config.resolved_mode
    settings = config.ch_settings()
    max_alpha = get_settings().max_alpha

    with trace_span("cmd_alpha_scan", alphas=len(config.alphas)):
        quadrature = build_source(config, MeasurementMode.QUADRATURE)
        quad_cut = sigma_cutoff(quadrature, settings, tol=config.tol)
        logger.info(
            "Quadrature reference: S=%.6f sigma0=%.6f", quad_cut.s_at_zero, quad_cut.sigma_c
        )

        def row(alpha: float) -> tuple[Any, ...]:
            scaled = photon_cutoff_from_quadrature(quad_cut.sigma_c, alpha, config.eta)
            if mode is not MeasurementMode.EXACT or alpha > max_alpha:
                if mode is MeasurementMode.EXACT:
                    logger.info("alpha=%g beyond the exact table; quadrature columns only", alpha)
                return (alpha, "", "", "", quad_cut.s_at_zero, scaled)
            exact = build_source(config, MeasurementMode.EXACT, alpha=alpha)
            cut = sigma_cutoff(exact, settings, tol=config.tol)
            ratio = cut.sigma_c / alpha if alpha > 0 else ""
            logger.info("alpha=%g: S=%.6f sigma_c=%.5f", alpha, cut.s_at_zero, cut.sigma_c)
            return (alpha, cut.s_at_zero, cut.sigma_c, ratio, quad_cut.s_at_zero, scaled)

        rows = run_sweep(row, config.alphas, config.jobs)

    return CommandOutput(
        columns=[
            "alpha",
            "S_at_sigma0",
            "sigma_c",
            "sigma_c_over_alpha",
            "S_quadrature",
            "sigma_c_quadrature_scaled",
        ],
        rows=rows,
        provenance=run_provenance(config, sigma0=quad_cut.sigma_c, angles=_angles(settings)),
    )


def cmd_noise_scan(config: RunConfig) -> CommandOutput:
    """S against readout noise at one amplitude, from both engines."""
    mode = config.resolved_mode
    settings = config.ch_settings()
    alpha = config.alphas[0]
    if alpha <= 0.0:
        raise ConfigError("noise-scan needs alpha > 0 to relate photon and quadrature noise")
    sigmas = (
        list(config.sigma)
        if config.sigma is not None
        else list(np.linspace(0.0, NOISE_SCAN_SPAN * alpha, NOISE_SCAN_POINTS))
    )
    # n = eta alpha X_L: sigma photons is sigma / (eta alpha) in quadrature units.
    scale = config.eta * alpha

    with trace_span("cmd_noise_scan", alpha=alpha, points=len(sigmas)):
        quadrature = build_source(config, MeasurementMode.QUADRATURE, alpha=alpha)
        quad = s_versus_sigma(
            quadrature,
            settings,
            [s / scale for s in sigmas],
            NoiseModel(eta=config.eta),
            jobs=config.jobs,
        )
        if mode is MeasurementMode.EXACT:
            exact_source = build_source(config, MeasurementMode.EXACT, alpha=alpha)
            exact = [e.s for e in s_versus_sigma(exact_source, settings, sigmas, jobs=config.jobs)]
        else:
            exact = None

    rows = []
    for k, sigma in enumerate(sigmas):
        s_quad = quad[k].s
        if exact is None:
            rows.append((sigma, "", s_quad, ""))
        else:
            rows.append((sigma, exact[k], s_quad, exact[k] - s_quad))

    _check_nonincreasing(sigmas, [q.s for q in quad], "quadrature", include_zero=True)
    if exact is not None:
        _check_nonincreasing(sigmas, exact, "exact", include_zero=False)
    return CommandOutput(
        columns=["sigma", "S_exact", "S_quadrature", "difference"],
        rows=rows,
        provenance=run_provenance(config, alpha=alpha, angles=_angles(settings)),
    )


def cmd_spin_scan(config: RunConfig) -> CommandOutput:
    """psi-optimised S and the noise cutoff of the higher-spin state for each N."""

    def row(N: int) -> tuple[Any, ...]:
        source = SpinSource(spin_schmidt(N))
        psi, evaluation = optimize_psi(N, NoiseModel(), source=source)
        cut = sigma_cutoff(source, ChSettings.from_psi(psi), tol=config.tol)
        logger.info("N=%d: psi=%.6f S=%.6f sigma_c=%.5f", N, psi, evaluation.s, cut.sigma_c)
        return (N, psi, evaluation.s, cut.sigma_c)

    with trace_span("cmd_spin_scan", points=len(config.spin_numbers)):
        rows = run_sweep(row, config.spin_numbers, config.jobs)

    return CommandOutput(
        columns=["N", "psi_opt", "S", "sigma_c"],
        rows=rows,
        provenance=run_provenance(config, psi_scan_points=get_settings().psi_scan_points),
    )


def _angles(settings: ChSettings) -> str:
    return ",".join(f"{a:.12g}" for a in settings.as_tuple())


def _check_nonincreasing(
    sigmas: list[float], values: list[float], label: str, include_zero: bool
) -> None:
    tol = get_settings().monotone_tol
    order = np.argsort(sigmas, kind="stable")
    for a, b in zip(order, order[1:]):
        # Lattice outcomes jump at sigma = 0; see sigma_cutoff.
        if (include_zero or sigmas[a] > 0.0) and values[b] - values[a] > tol:
            raise MonotonicityError(
                f"{label} S(sigma) rises from {values[a]:.8f} to {values[b]:.8f} "
                f"between sigma={sigmas[a]:.4g} and {sigmas[b]:.4g}"
            )
