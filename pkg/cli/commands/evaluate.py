"""Single-point evaluation and distribution export."""

from __future__ import annotations

import logging
from typing import Any, Optional

import simulator
from cli.schemas import CommandOutput, RunConfig
from common.config_manager import get_settings
from common.debug_log import trace_span
from simulator.core.bell import binarized_probs, ch_ratio, optimize_psi
from simulator.core.sources import ExactSource, QuadratureSource, Source, SpinSource
from simulator.core.states import pair_coherent_state, spin_schmidt
from simulator.models.distributions import JointIntegerDistribution
from simulator.models.schemas import ChSettings, GridSpec, LossChannel, MeasurementMode
from simulator.oracle.monte_carlo import mc_sample

logger = logging.getLogger(__name__)


def build_source(
    config: RunConfig,
    mode: Optional[MeasurementMode] = None,
    alpha: Optional[float] = None,
    N: Optional[int] = None,
) -> Source:
    """Source for one sweep point; unspecified arguments come from the config."""
    settings = get_settings()
    mode = mode or config.resolved_mode
    if mode is MeasurementMode.SPIN:
        N = N if N is not None else config.spin_numbers[0]
        return SpinSource(spin_schmidt(N))

    alpha = alpha if alpha is not None else config.alphas[0]
    state = pair_coherent_state(config.r0, alpha, tail_tol=config.tail_tol)
    if mode is MeasurementMode.EXACT:
        return ExactSource(
            state,
            eta=config.eta,
            window_sigmas=settings.window_sigmas,
            max_alpha=settings.max_alpha,
        )
    return QuadratureSource(
        state,
        grid=GridSpec(bound=settings.grid_bound, step=settings.grid_step),
        loss=LossChannel(eta=config.eta),
    )


def run_provenance(config: RunConfig, **extra: Any) -> dict[str, Any]:
    """Header comment fields: how and with which truncations the table was made."""
    settings = get_settings()
    provenance: dict[str, Any] = {
        "macrobell": simulator.__version__,
        "command": config.command,
        "mode": config.resolved_mode.value,
        "tail_tol": config.tail_tol,
        "cutoff_tol": config.tol,
        "eta": config.eta,
    }
    if config.resolved_mode is not MeasurementMode.SPIN:
        provenance["r0"] = config.r0
    if config.resolved_mode is MeasurementMode.EXACT:
        provenance["window_sigmas"] = settings.window_sigmas
    sweeps_quadrature = config.command in ("alpha-scan", "noise-scan")
    if config.resolved_mode is MeasurementMode.QUADRATURE or sweeps_quadrature:
        provenance["grid"] = f"{settings.grid_bound:g}/{settings.grid_step:g}"
    provenance.update(extra)
    return provenance


def _settings_for(config: RunConfig, source: Source) -> tuple[ChSettings, Optional[float]]:
    """Angles from --angles, else the psi optimum (spin) or the homodyne defaults."""
    if isinstance(source, SpinSource) and (config.psi_scan or config.angles is None):
        psi, _ = optimize_psi(source.state.N, config.noise, source=source)
        return ChSettings.from_psi(psi), psi
    return config.ch_settings(), None


def cmd_eval(config: RunConfig) -> CommandOutput:
    """Every probability behind S at one (source, angles, noise) point."""
    source = build_source(config)
    noise = config.noise
    with trace_span("cmd_eval", mode=source.mode.value):
        settings, psi = _settings_for(config, source)
        evaluation = ch_ratio(source, settings, noise)

    rows: list[tuple] = []
    if psi is not None:
        rows.append(("psi_opt", psi))
    for name, value in zip(("theta", "phi", "theta_prime", "phi_prime"), settings.as_tuple()):
        rows.append((name, value))
    rows.append(("sigma", noise.sigma))
    for key, value in evaluation.p_pp.items():
        rows.append((f"p_pp_{key}", value))
    rows += [
        ("p_a_thetaprime", evaluation.p_a),
        ("p_b_phi", evaluation.p_b),
        ("numerator", evaluation.numerator),
        ("denominator", evaluation.denominator),
        ("S", evaluation.s),
    ]

    if config.mc_samples:
        theta, phi = settings.pairs()["theta_phi"]
        estimate = mc_sample(
            source.joint(theta, phi), noise, config.mc_samples, seed=config.seed, jobs=config.jobs
        )
        exact_pp, _, _ = binarized_probs(source.joint(theta, phi), noise)
        deviation = abs(estimate.p_pp - exact_pp)
        in_stderr = deviation / estimate.stderr_pp if estimate.stderr_pp else 0.0
        rows += [
            ("mc_p_pp_theta_phi", estimate.p_pp),
            ("mc_stderr_p_pp_theta_phi", estimate.stderr_pp),
            ("mc_deviation_in_stderr", in_stderr),
        ]

    logger.info("S=%.6f at sigma=%.4g (%s)", evaluation.s, noise.sigma, source.mode.value)
    return CommandOutput(
        columns=["quantity", "value"],
        rows=rows,
        provenance=run_provenance(config, seed=config.seed, **source.describe()),
    )


def cmd_dist(config: RunConfig) -> CommandOutput:
    """Noise-free joint distribution at (theta, phi) as i,j,p or x,y,p rows."""
    source = build_source(config)
    settings, _ = _settings_for(config, source)
    theta, phi = settings.pairs()["theta_phi"]
    dist = source.joint(theta, phi)

    integer = isinstance(dist, JointIntegerDistribution)
    columns = ["i", "j", "p"] if integer else ["x", "y", "p"]
    rows = list(dist.to_rows())
    logger.info("Exporting %d distribution cells (mass deficit %.2e)", len(rows), dist.mass_deficit)
    return CommandOutput(
        columns=columns,
        rows=rows,
        provenance=run_provenance(
            config,
            theta=theta,
            phi=phi,
            mass_deficit=dist.mass_deficit,
            **source.describe(),
        ),
    )
