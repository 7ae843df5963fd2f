"""Measurement-mode sources: a state paired with the engine that measures it."""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Any, Union

import numpy as np

from common.errors import UnsupportedConfigurationError
from simulator.core.measurement import (
    DEFAULT_MAX_ALPHA,
    DEFAULT_WINDOW_SIGMAS,
    ExactJointEngine,
    apply_loss_quadrature,
    quadrature_joint_density,
    spin_joint_from_rotations,
    spin_rotation_matrix,
)
from simulator.models.distributions import (
    JointIntegerDistribution,
    JointQuadratureDensity,
    SchmidtState,
    SpinPairState,
)
from simulator.models.schemas import GridSpec, LossChannel, MeasurementMode

logger = logging.getLogger(__name__)

Distribution = Union[JointIntegerDistribution, JointQuadratureDensity]

_CACHE_SIZE = 16


class Source(ABC):
    """Produces joint outcome distributions for analyser angles (theta, phi)."""

    mode: MeasurementMode
    # Continuous outcomes make S(sigma) continuous at sigma = 0.
    continuous_outcomes: bool = False

    @abstractmethod
    def joint(self, theta: float, phi: float) -> Distribution:
        ...

    @property
    @abstractmethod
    def noise_scale(self) -> float:
        """Typical outcome spread; sets the step of noise scans."""

    @property
    def eta(self) -> float:
        return 1.0

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        ...


class ExactSource(Source):
    """Finite-alpha photon counting of the pair-coherent state."""

    mode = MeasurementMode.EXACT

    def __init__(
        self,
        state: SchmidtState,
        eta: float = 1.0,
        window_sigmas: float = DEFAULT_WINDOW_SIGMAS,
        max_alpha: float = DEFAULT_MAX_ALPHA,
    ):
        if eta != 1.0:
            raise UnsupportedConfigurationError(
                "detector loss is only modelled in the quadrature limit; use --mode quadrature"
            )
        self.state = state
        self.engine = ExactJointEngine(state, window_sigmas=window_sigmas, max_alpha=max_alpha)
        self._cached = lru_cache(maxsize=_CACHE_SIZE)(self._compute)

    def _compute(self, theta: float, phi: float) -> JointIntegerDistribution:
        return self.engine.distribution(theta, phi)

    def joint(self, theta: float, phi: float) -> JointIntegerDistribution:
        return self._cached(float(theta), float(phi))

    @property
    def noise_scale(self) -> float:
        return max(self.state.alpha, 1.0)

    def describe(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "r0": self.state.r0,
            "alpha": self.state.alpha,
            "beta": self.state.beta,
            "n_max": self.state.n_max,
            "tail_bound": self.state.tail_bound,
            "window_a": f"{self.engine.window_a.lo}-{self.engine.window_a.hi}",
        }


class QuadratureSource(Source):
    """Large-alpha limit: joint quadrature density, optionally after detector loss."""

    mode = MeasurementMode.QUADRATURE
    continuous_outcomes = True

    def __init__(
        self,
        state: SchmidtState,
        grid: GridSpec | None = None,
        loss: LossChannel | None = None,
    ):
        self.state = state
        self.grid = grid or GridSpec()
        self.loss = loss or LossChannel()
        self._cached = lru_cache(maxsize=_CACHE_SIZE)(self._compute)

    def _compute(self, theta: float, phi: float) -> JointQuadratureDensity:
        density = quadrature_joint_density(self.state, theta, phi, self.grid)
        return apply_loss_quadrature(density, self.loss)

    def joint(self, theta: float, phi: float) -> JointQuadratureDensity:
        return self._cached(float(theta), float(phi))

    @property
    def noise_scale(self) -> float:
        return 1.0

    @property
    def eta(self) -> float:
        return self.loss.eta

    def describe(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "r0": self.state.r0,
            "n_max": self.state.n_max,
            "tail_bound": self.state.tail_bound,
            "grid_bound": self.grid.bound,
            "grid_step": self.grid.step,
            "eta": self.loss.eta,
        }


class SpinSource(Source):
    """Higher-spin pair state measured with rotated polarisers."""

    mode = MeasurementMode.SPIN

    def __init__(self, state: SpinPairState):
        self.state = state
        self._rotation = lru_cache(maxsize=_CACHE_SIZE)(self._rotation_uncached)

    def _rotation_uncached(self, angle: float) -> np.ndarray:
        return spin_rotation_matrix(self.state.N, angle)

    def joint(self, theta: float, phi: float) -> JointIntegerDistribution:
        return spin_joint_from_rotations(
            self.state, self._rotation(theta), self._rotation(phi), theta, phi
        )

    @property
    def noise_scale(self) -> float:
        return max(math.sqrt(self.state.N), 1.0)

    def describe(self) -> dict[str, Any]:
        return {"mode": self.mode.value, "N": self.state.N}
