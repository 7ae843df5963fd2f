"""Array-backed containers for states and outcome distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class SchmidtState:
    """sum_n c_n |n>_{a-}|n>_{b-} |alpha>_{a+} |beta>_{b+}."""

    c: np.ndarray
    alpha: float
    beta: float
    r0: float
    n_max: int
    tail_bound: float = 0.0

    @property
    def norm_squared(self) -> float:
        return float(np.sum(self.c**2))

    @property
    def pair_number_probs(self) -> np.ndarray:
        return self.c**2

    @property
    def marginal_photon_probs(self) -> np.ndarray:
        """Photon-number distribution of the signal (or idler) mode alone."""
        return self.c**2

    @property
    def mean_pair_number(self) -> float:
        n = np.arange(self.c.size)
        return float(np.sum(n * self.c**2))

    def number_difference_eigenvalue(self) -> int:
        """Signal minus idler photon number; every Schmidt term is |n>|n>."""
        return 0


@dataclass(frozen=True)
class SpinPairState:
    """(N+1)^{-1/2} sum_k |k, N-k>_A |k, N-k>_B."""

    N: int
    amplitudes: np.ndarray
    basis: tuple[tuple[int, int], ...]

    @property
    def schmidt_rank(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class JointIntegerDistribution:
    """Probabilities over photon-number-difference outcomes (i at A, j at B)."""

    i_values: np.ndarray
    j_values: np.ndarray
    probs: np.ndarray
    mass_deficit: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def window(self) -> tuple[int, int, int, int]:
        return (
            int(self.i_values[0]),
            int(self.i_values[-1]),
            int(self.j_values[0]),
            int(self.j_values[-1]),
        )

    @property
    def total_mass(self) -> float:
        return float(self.probs.sum())

    def marginal(self, axis: int) -> np.ndarray:
        """axis=0 gives P(i) at A, axis=1 gives P(j) at B."""
        return self.probs.sum(axis=1 - axis)

    def probability(self, i: int, j: int) -> float:
        ii = np.searchsorted(self.i_values, i)
        jj = np.searchsorted(self.j_values, j)
        if ii >= self.i_values.size or self.i_values[ii] != i:
            return 0.0
        if jj >= self.j_values.size or self.j_values[jj] != j:
            return 0.0
        return float(self.probs[ii, jj])

    def entries(self, threshold: float = 0.0) -> Iterator[tuple[int, int, float]]:
        """Sparse view: (i, j, p) for every cell with p > threshold."""
        rows, cols = np.nonzero(self.probs > threshold)
        for r, c in zip(rows, cols):
            yield int(self.i_values[r]), int(self.j_values[c]), float(self.probs[r, c])

    def to_rows(self) -> Iterator[tuple[int, int, float]]:
        return self.entries()

    @classmethod
    def point_mass(cls, i: int, j: int) -> JointIntegerDistribution:
        return cls(
            i_values=np.array([i]),
            j_values=np.array([j]),
            probs=np.ones((1, 1)),
        )


@dataclass(frozen=True)
class JointQuadratureDensity:
    """Density over quadrature outcomes (x, y) on a uniform cell-centred grid."""

    x: np.ndarray
    y: np.ndarray
    step: float
    density: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def riemann_mass(self) -> float:
        return float(self.density.sum() * self.step * self.step)

    @property
    def mass_deficit(self) -> float:
        return max(0.0, 1.0 - self.riemann_mass)

    def marginal(self, axis: int) -> np.ndarray:
        """Marginal density along x (axis=0) or y (axis=1)."""
        return self.density.sum(axis=1 - axis) * self.step

    def axis_mean(self, axis: int) -> float:
        coords = self.x if axis == 0 else self.y
        return float(np.sum(coords * self.marginal(axis)) * self.step)

    def axis_variance(self, axis: int) -> float:
        coords = self.x if axis == 0 else self.y
        mean = self.axis_mean(axis)
        return float(np.sum((coords - mean) ** 2 * self.marginal(axis)) * self.step)

    def to_rows(self) -> Iterator[tuple[float, float, float]]:
        for a, xv in enumerate(self.x):
            for b, yv in enumerate(self.y):
                yield float(xv), float(yv), float(self.density[a, b])
