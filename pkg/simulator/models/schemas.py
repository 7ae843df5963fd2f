from __future__ import annotations

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Probabilities may overshoot [0, 1] by rounding in long sums.
PROBABILITY_SLACK = 1e-9


class MeasurementMode(str, Enum):
    EXACT = "exact"
    QUADRATURE = "quadrature"
    SPIN = "spin"


class NoiseModel(BaseModel):
    """Gaussian readout noise plus detector efficiency."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=0.0, ge=0.0, description="Readout noise standard deviation")
    eta: float = Field(default=1.0, gt=0.0, le=1.0, description="Detector efficiency")

    def with_sigma(self, sigma: float) -> NoiseModel:
        return NoiseModel(sigma=sigma, eta=self.eta)


class LossChannel(BaseModel):
    """Beam-splitter loss model in front of each detector."""

    model_config = ConfigDict(frozen=True)

    eta: float = Field(default=1.0, gt=0.0, le=1.0)

    @property
    def is_lossless(self) -> bool:
        return self.eta == 1.0

    @property
    def vacuum_noise_std(self) -> float:
        # (sqrt(1-eta)/sqrt(2)) (X_vac+ + X_vac-) with unit-variance vacuum quadratures
        return math.sqrt(1.0 - self.eta)


class GridSpec(BaseModel):
    """Uniform cell-centred quadrature grid on [-bound, bound]."""

    model_config = ConfigDict(frozen=True)

    bound: float = Field(default=8.0, ge=8.0)
    step: float = Field(default=1.0 / 32.0, gt=0.0, le=1.0 / 32.0)

    @property
    def n_cells(self) -> int:
        return int(round(2.0 * self.bound / self.step))

    def edges(self) -> np.ndarray:
        return -self.bound + self.step * np.arange(self.n_cells + 1)

    def axis(self) -> np.ndarray:
        return -self.bound + self.step * (np.arange(self.n_cells) + 0.5)


class ChSettings(BaseModel):
    """The four analyser angles (radians, stored unreduced)."""

    model_config = ConfigDict(frozen=True)

    theta: float
    phi: float
    theta_prime: float
    phi_prime: float

    @field_validator("theta", "phi", "theta_prime", "phi_prime")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("angles must be finite")
        return value

    @classmethod
    def homodyne_default(cls) -> ChSettings:
        """theta=0, phi=-pi/4, theta'=pi/2, phi'=-3pi/4."""
        return cls(theta=0.0, phi=-math.pi / 4, theta_prime=math.pi / 2, phi_prime=-3 * math.pi / 4)

    @classmethod
    def from_psi(cls, psi: float, offset: float = 0.0) -> ChSettings:
        """phi - theta = theta' - phi = phi' - theta' = psi."""
        return cls(
            theta=offset,
            phi=offset + psi,
            theta_prime=offset + 2 * psi,
            phi_prime=offset + 3 * psi,
        )

    def pairs(self) -> dict[str, tuple[float, float]]:
        return {
            "theta_phi": (self.theta, self.phi),
            "theta_phiprime": (self.theta, self.phi_prime),
            "thetaprime_phi": (self.theta_prime, self.phi),
            "thetaprime_phiprime": (self.theta_prime, self.phi_prime),
        }

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta, self.phi, self.theta_prime, self.phi_prime)


class ChEvaluation(BaseModel):
    """Joint and marginal + probabilities and the CH ratio built from them."""

    model_config = ConfigDict(frozen=True)

    p_pp: dict[str, float]
    p_a: float = Field(description="P_+^A(theta')")
    p_b: float = Field(description="P_+^B(phi)")
    s: float

    @model_validator(mode="after")
    def _check(self) -> ChEvaluation:
        expected = {"theta_phi", "theta_phiprime", "thetaprime_phi", "thetaprime_phiprime"}
        if set(self.p_pp) != expected:
            raise ValueError(f"p_pp must be keyed by {sorted(expected)}")
        for value in (*self.p_pp.values(), self.p_a, self.p_b):
            if not (-PROBABILITY_SLACK <= value <= 1.0 + PROBABILITY_SLACK):
                raise ValueError(f"probability {value} outside [0, 1]")
        return self

    @property
    def numerator(self) -> float:
        p = self.p_pp
        return p["theta_phi"] - p["theta_phiprime"] + p["thetaprime_phi"] + p["thetaprime_phiprime"]

    @property
    def denominator(self) -> float:
        return self.p_a + self.p_b

    @property
    def violates(self) -> bool:
        return self.s > 1.0


class CutoffResult(BaseModel):
    """Outcome of the noise-cutoff search."""

    sigma_c: float = Field(ge=0.0)
    s_at_zero: float
    bracket: Optional[tuple[float, float]] = None
    scan_points: int = 0
    monotone: bool = True
    violated: bool = Field(description="Whether S(0) > 1 at all")
