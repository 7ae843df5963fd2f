from __future__ import annotations

import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from simulator.models.schemas import ChSettings, MeasurementMode, NoiseModel

Command = Literal["alpha-scan", "noise-scan", "spin-scan", "eval", "dist"]

SPIN_SCAN_DEFAULT_N = [1, 2, 5, 10, 20, 40]
ALPHA_SCAN_DEFAULT_ALPHA = [2.0, 4.0, 6.0, 8.0, 10.0]
NOISE_SCAN_DEFAULT_ALPHA = 10.0


class RunConfig(BaseModel):
    """One CLI invocation, merged from --config YAML and explicit flags."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    mode: Optional[MeasurementMode] = None
    r0: float = Field(default=1.1, ge=0.0, le=3.0)
    alpha: Optional[list[float]] = Field(default=None, description="Local-oscillator amplitudes")
    sigma: Optional[list[float]] = Field(default=None, description="Readout noise levels")
    n: Optional[list[int]] = Field(default=None, description="Photon numbers of the spin state")
    angles: Optional[tuple[float, float, float, float]] = None
    psi_scan: bool = False
    eta: float = Field(default=1.0, gt=0.0, le=1.0)
    tail_tol: float = Field(default=1e-14, gt=0.0, le=1e-6)
    tol: float = Field(default=1e-4, gt=0.0, le=1e-3)
    jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    mc_samples: int = Field(default=0, ge=0)
    out: Optional[Path] = None

    @field_validator("alpha", "sigma", "n")
    @classmethod
    def _nonempty(cls, value: Optional[list]) -> Optional[list]:
        if value is not None and len(value) == 0:
            raise ValueError("range must not be empty")
        return value

    @field_validator("alpha")
    @classmethod
    def _alpha_values(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and any(not math.isfinite(a) or a < 0.0 for a in value):
            raise ValueError("alpha values must be finite and >= 0")
        return value

    @field_validator("sigma")
    @classmethod
    def _sigma_values(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and any(not math.isfinite(s) or s < 0.0 for s in value):
            raise ValueError("sigma values must be finite and >= 0")
        return value

    @field_validator("n")
    @classmethod
    def _n_values(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is not None and any(k < 1 or k > 200 for k in value):
            raise ValueError("N values must be in [1, 200]")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> RunConfig:
        mode = self.resolved_mode
        if mode is MeasurementMode.SPIN:
            if self.alpha is not None:
                raise ValueError("spin mode takes --n, not --alpha")
            if self.command in ("alpha-scan", "noise-scan"):
                raise ValueError(f"{self.command} needs the pair-coherent source; use spin-scan")
            if self.command in ("eval", "dist") and self.n is not None and len(self.n) != 1:
                raise ValueError(f"{self.command} takes a single --n")
        else:
            if self.n is not None:
                raise ValueError(f"--n only applies to spin mode, not {mode.value}")
            if self.command == "spin-scan":
                raise ValueError("spin-scan requires spin mode")
            if self.psi_scan:
                raise ValueError("--psi-scan only applies to spin mode")
            single = self.command in ("eval", "dist", "noise-scan")
            if single and self.alpha is not None and len(self.alpha) != 1:
                raise ValueError(f"{self.command} takes a single --alpha")
        if mode is MeasurementMode.EXACT and self.eta != 1.0:
            raise ValueError("detector loss is only modelled in quadrature mode")
        return self

    @property
    def resolved_mode(self) -> MeasurementMode:
        if self.mode is not None:
            return self.mode
        if self.command == "spin-scan" or self.n is not None:
            return MeasurementMode.SPIN
        return MeasurementMode.EXACT

    @property
    def alphas(self) -> list[float]:
        if self.alpha is not None:
            return list(self.alpha)
        if self.command == "alpha-scan":
            return list(ALPHA_SCAN_DEFAULT_ALPHA)
        return [NOISE_SCAN_DEFAULT_ALPHA]

    @property
    def spin_numbers(self) -> list[int]:
        return list(self.n) if self.n is not None else list(SPIN_SCAN_DEFAULT_N)

    @property
    def noise(self) -> NoiseModel:
        sigma = self.sigma[0] if self.sigma else 0.0
        return NoiseModel(sigma=sigma, eta=self.eta)

    def ch_settings(self) -> ChSettings:
        if self.angles is not None:
            theta, phi, theta_prime, phi_prime = self.angles
            return ChSettings(theta=theta, phi=phi, theta_prime=theta_prime, phi_prime=phi_prime)
        return ChSettings.homodyne_default()


class CommandOutput(BaseModel):
    """Columns, rows and provenance of one CSV table."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    columns: list[str]
    rows: list[tuple]
    provenance: dict[str, object]
