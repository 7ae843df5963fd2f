import math

import numpy as np
import pytest

from simulator.core.sources import QuadratureSource, Source, SpinSource
from simulator.core.states import pair_coherent_state, spin_schmidt
from simulator.models.distributions import JointIntegerDistribution
from simulator.models.schemas import ChSettings, MeasurementMode

OPERATING_R0 = 1.1


class TableSource(Source):
    """Returns one fixed integer table for every angle pair."""

    mode = MeasurementMode.EXACT

    def __init__(self, values, probs):
        self.dist = JointIntegerDistribution(
            i_values=np.asarray(values), j_values=np.asarray(values), probs=np.asarray(probs)
        )

    def joint(self, theta, phi):
        return self.dist

    @property
    def noise_scale(self):
        return 1.0

    def describe(self):
        return {"mode": "table"}


@pytest.fixture(scope="session")
def homodyne_settings():
    return ChSettings.homodyne_default()


@pytest.fixture(scope="session")
def operating_state():
    return pair_coherent_state(OPERATING_R0, 0.0)


@pytest.fixture(scope="session")
def quadrature_source(operating_state):
    return QuadratureSource(operating_state)


@pytest.fixture(scope="session")
def singlet_source():
    return SpinSource(spin_schmidt(1))


@pytest.fixture
def washed_out_source():
    """Independent, unbiased +-1 outcomes: S = 1/2 at any noise."""
    return TableSource([-1, 1], np.full((2, 2), 0.25))


@pytest.fixture
def dead_source():
    """Every outcome negative: all + probabilities vanish."""
    return TableSource([-5], np.ones((1, 1)))


def singlet_cutoff() -> float:
    """sigma at which 1/2 + (sqrt 2 / 2) erf-weight^2 drops to 1 for the psi = pi/4 singlet."""
    from scipy.special import ndtri

    return 1.0 / float(ndtri(0.5 * (1.0 + 2.0**-0.25)))


SQRT2 = math.sqrt(2.0)
