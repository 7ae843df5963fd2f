from dotenv import load_dotenv

# Load .env BEFORE settings are built
load_dotenv()

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import yaml
from pydantic import ValidationError

import simulator
from cli.commands.evaluate import cmd_dist, cmd_eval
from cli.commands.scans import cmd_alpha_scan, cmd_noise_scan, cmd_spin_scan
from cli.schemas import CommandOutput, RunConfig
from common.config_manager import get_settings
from common.csv_writer import write_csv
from common.debug_log import configure_logging
from common.errors import EXIT_CONFIG, EXIT_OK, ConfigError, MacroBellError, exit_code_for

logger = logging.getLogger(__name__)

COMMANDS: dict[str, Callable[[RunConfig], CommandOutput]] = {
    "alpha-scan": cmd_alpha_scan,
    "noise-scan": cmd_noise_scan,
    "spin-scan": cmd_spin_scan,
    "eval": cmd_eval,
    "dist": cmd_dist,
}

DESCRIPTIONS = {
    "alpha-scan": "S at sigma=0 and noise cutoff versus alpha. "
    "CSV: alpha,S_at_sigma0,sigma_c,sigma_c_over_alpha,S_quadrature,sigma_c_quadrature_scaled",
    "noise-scan": "S versus readout noise at one alpha. CSV: sigma,S_exact,S_quadrature,difference",
    "spin-scan": "Higher-spin state: psi-optimised S and cutoff versus N. CSV: N,psi_opt,S,sigma_c",
    "eval": "Every probability behind S at one point. CSV: quantity,value",
    "dist": "Noise-free joint distribution at (theta, phi). CSV: i,j,p or x,y,p",
}

# Flags whose value, when given, overrides the --config file.
_OVERRIDABLE = (
    "mode", "r0", "alpha", "sigma", "n", "angles", "psi_scan", "eta",
    "tail_tol", "tol", "jobs", "seed", "mc_samples", "out",
)


def _parse_values(text: str, cast: Callable[[str], Any]) -> list:
    """Comma list ``a,b,c`` or inclusive range ``start:stop:step``."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(round((stop - start) / step)) + 1
            return [cast(start + k * step) for k in range(max(count, 0))]
        return [cast(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r}: {exc}") from exc


def _float_list(text: str) -> list[float]:
    return _parse_values(text, float)


def _int_list(text: str) -> list[int]:
    return _parse_values(text, lambda v: int(float(v)))


def _angles(text: str) -> tuple[float, float, float, float]:
    values = _float_list(text)
    if len(values) != 4:
        raise argparse.ArgumentTypeError("--angles takes four comma-separated radians")
    return tuple(values)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML file with RunConfig fields")
    common.add_argument("--mode", choices=["exact", "quadrature", "spin"])
    common.add_argument("--r0", type=float, help="pair-coherent pump parameter (default 1.1)")
    common.add_argument("--alpha", type=_float_list, help="amplitudes: a,b,c or start:stop:step")
    common.add_argument("--sigma", type=_float_list, help="noise levels: a,b,c or start:stop:step")
    common.add_argument("--n", type=_int_list, help="spin-state photon numbers")
    common.add_argument("--angles", type=_angles, help="theta,phi,theta',phi' in radians")
    common.add_argument("--psi-scan", action="store_true", default=None,
                        help="optimise psi for the spin state")
    common.add_argument("--eta", type=float, help="detector efficiency in (0, 1]")
    common.add_argument("--tail-tol", type=float, help="Fock truncation tail bound")
    common.add_argument("--tol", type=float, help="noise-cutoff bisection tolerance")
    common.add_argument("--jobs", type=int, help="parallel sweep workers")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--mc-samples", type=int, help="Monte Carlo cross-check samples (eval)")
    common.add_argument("--out", type=Path, help="CSV path (default stdout)")

    parser = argparse.ArgumentParser(
        prog="macrobell",
        description="Clauser-Horne ratios for macroscopic photon-number measurements.",
    )
    parser.add_argument("--version", action="version", version=simulator.__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, description in DESCRIPTIONS.items():
        sub.add_parser(name, parents=[common], help=description, description=description)
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional YAML file with explicit flags (flags win)."""
    values: dict[str, Any] = {}
    if args.config is not None:
        try:
            loaded = yaml.safe_load(args.config.read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {args.config} must be a mapping of RunConfig fields")
        values.update({key.replace("-", "_"): val for key, val in loaded.items()})

    for name in _OVERRIDABLE:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    if values.get("jobs") is None:
        values["jobs"] = get_settings().jobs
    if values.get("tol") is None:
        values["tol"] = get_settings().cutoff_tol
    if values.get("tail_tol") is None:
        values["tail_tol"] = get_settings().tail_tol
    values["command"] = args.command
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(get_settings())

    try:
        config = load_run_config(args)
        logger.info("Running %s (%s mode)", config.command, config.resolved_mode.value)
        output = COMMANDS[config.command](config)
        text = write_csv(config.out, output.columns, output.rows, output.provenance)
    except ValidationError as exc:
        logger.error("Invalid configuration: %s", exc)
        return EXIT_CONFIG
    except MacroBellError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)

    if config.out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
