"""End-to-end checks at the r0 = 1.1 operating point with the homodyne angles."""

import math

import numpy as np
import pytest

from simulator.core.bell import binarized_probs, ch_ratio, optimize_psi, sigma_cutoff
from simulator.core.measurement import exact_joint_distribution, quadrature_joint_density
from simulator.core.sources import ExactSource, QuadratureSource, SpinSource
from simulator.core.states import pair_coherent_state, spin_schmidt
from simulator.models.schemas import ChSettings, LossChannel, NoiseModel
from simulator.oracle import mc_sample

SPIN_NUMBERS = [1, 2, 5, 10, 20, 40]
QUADRATURE_SIGMA0 = 0.2728


@pytest.fixture(scope="module")
def quadrature_cutoff(quadrature_source, homodyne_settings):
    return sigma_cutoff(quadrature_source, homodyne_settings)


def test_asymptotic_violation(quadrature_source, homodyne_settings):
    evaluation = ch_ratio(quadrature_source, homodyne_settings, NoiseModel())
    assert evaluation.s == pytest.approx(1.0157, abs=2e-3)


def test_quadrature_noise_cutoff(quadrature_cutoff):
    assert quadrature_cutoff.violated
    assert quadrature_cutoff.monotone
    assert quadrature_cutoff.sigma_c == pytest.approx(QUADRATURE_SIGMA0, abs=0.003)


def test_quadrature_cutoff_brackets_unit_ratio(quadrature_source, homodyne_settings):
    def s_of(sigma):
        return ch_ratio(quadrature_source, homodyne_settings, NoiseModel(sigma=sigma)).s

    assert s_of(0.26) > s_of(0.27) > 1.0 > s_of(0.28)


def test_survives_small_detector_loss(operating_state, homodyne_settings):
    source = QuadratureSource(operating_state, loss=LossChannel(eta=0.98))
    assert ch_ratio(source, homodyne_settings, NoiseModel(eta=0.98)).s > 1.0


@pytest.mark.slow
def test_cutoff_grows_linearly_with_amplitude(homodyne_settings, quadrature_cutoff):
    alphas = np.array([4.0, 6.0, 8.0, 10.0])
    cutoffs = [
        sigma_cutoff(ExactSource(pair_coherent_state(1.1, a)), homodyne_settings) for a in alphas
    ]
    assert all(c.violated and c.monotone for c in cutoffs)
    sigma_c = np.array([c.sigma_c for c in cutoffs])
    proportional = float(alphas @ sigma_c / (alphas @ alphas))
    assert proportional == pytest.approx(0.26, abs=0.02)
    ratios = sigma_c / alphas
    assert np.all(np.diff(ratios) > 0.0)
    assert ratios[-1] == pytest.approx(0.26, abs=0.02)
    assert ratios[-1] < quadrature_cutoff.sigma_c + 0.01


@pytest.mark.slow
def test_spin_cutoff_stays_microscopic():
    cutoffs = []
    for N in SPIN_NUMBERS:
        source = SpinSource(spin_schmidt(N))
        psi, evaluation = optimize_psi(N, NoiseModel(), source=source)
        assert evaluation.s > 1.0
        cut = sigma_cutoff(source, ChSettings.from_psi(psi))
        assert cut.violated and cut.monotone
        cutoffs.append(cut.sigma_c)
    assert max(cutoffs) < 5.0
    beyond_five = cutoffs[SPIN_NUMBERS.index(5):]
    assert np.all(np.diff(beyond_five) <= 0.0)


def test_even_spin_violation_needs_sharp_zero_outcome():
    source = SpinSource(spin_schmidt(2))
    psi, evaluation = optimize_psi(2, NoiseModel(), source=source)
    settings = ChSettings.from_psi(psi)
    assert evaluation.s > 1.0
    assert ch_ratio(source, settings, NoiseModel(sigma=0.01)).s < 1.0
    cut = sigma_cutoff(source, settings)
    assert cut.violated
    assert cut.sigma_c == 0.0


@pytest.mark.slow
def test_photon_counting_matches_sampling(homodyne_settings):
    theta, phi = homodyne_settings.pairs()["theta_phi"]
    dist = exact_joint_distribution(pair_coherent_state(1.1, 10.0), theta, phi)
    noise = NoiseModel(sigma=1.0)
    p_pp, _, _ = binarized_probs(dist, noise)
    estimate = mc_sample(dist, noise, 10_000_000, seed=17)
    assert abs(estimate.p_pp - p_pp) < 4 * estimate.stderr_pp


class TestInvariants:
    def test_normalisation(self, operating_state):
        assert quadrature_joint_density(operating_state, 0.0, -math.pi / 4).mass_deficit < 1e-6
        dist = exact_joint_distribution(pair_coherent_state(1.1, 10.0), 0.0, -math.pi / 4)
        assert dist.mass_deficit < 1e-6

    def test_no_signalling_under_remote_angle_change(self, operating_state):
        first = quadrature_joint_density(operating_state, 0.0, -math.pi / 4)
        second = quadrature_joint_density(operating_state, 0.0, -3 * math.pi / 4)
        assert np.max(np.abs(first.marginal(0) - second.marginal(0))) < 1e-9

    def test_quadrature_scan_is_monotone(self, quadrature_source, homodyne_settings):
        values = [
            ch_ratio(quadrature_source, homodyne_settings, NoiseModel(sigma=s)).s
            for s in np.linspace(0.0, 2.0, 33)
        ]
        assert np.all(np.diff(values) <= 1e-9)

    def test_infinite_noise_limits(self, quadrature_source, homodyne_settings):
        evaluation = ch_ratio(quadrature_source, homodyne_settings, NoiseModel(sigma=1e8))
        assert all(p == pytest.approx(0.25, abs=1e-6) for p in evaluation.p_pp.values())
        assert evaluation.s == pytest.approx(0.5, abs=1e-5)

    def test_photon_counting_approaches_quadrature(self, operating_state, homodyne_settings):
        theta, phi = homodyne_settings.pairs()["theta_phi"]
        quad, _, _ = binarized_probs(
            quadrature_joint_density(operating_state, theta, phi), NoiseModel(sigma=0.1)
        )
        dist = exact_joint_distribution(pair_coherent_state(1.1, 10.0), theta, phi)
        exact, _, _ = binarized_probs(dist, NoiseModel(sigma=1.0))
        assert abs(exact - quad) < 0.01
