import math

import numpy as np
import pytest
from scipy.special import ndtr

from common.errors import (
    DegenerateDenominatorError,
    MassDeficitError,
    UnsupportedConfigurationError,
)
from simulator.core.bell import (
    binarized_probs,
    ch_ratio,
    optimize_psi,
    photon_cutoff_from_quadrature,
    run_sweep,
    s_versus_sigma,
    sigma_cutoff,
)
from simulator.core.measurement import spin_joint_distribution
from simulator.core.sources import ExactSource, QuadratureSource, SpinSource
from simulator.core.states import pair_coherent_state, spin_schmidt
from simulator.models.distributions import JointIntegerDistribution
from simulator.models.schemas import ChEvaluation, ChSettings, LossChannel, NoiseModel
from tests.conftest import singlet_cutoff

SINGLET_MAX_S = 0.5 * (1.0 + math.sqrt(2.0))


class TestBinarizedProbs:
    def test_point_mass(self):
        dist = JointIntegerDistribution.point_mass(3, -1)
        p_pp, p_a, p_b = binarized_probs(dist, NoiseModel(sigma=2.0))
        assert p_pp == pytest.approx(ndtr(1.5) * ndtr(-0.5), abs=1e-15)
        assert p_a == pytest.approx(ndtr(1.5))
        assert p_b == pytest.approx(ndtr(-0.5))

    def test_point_mass_at_origin_is_plus(self):
        assert binarized_probs(JointIntegerDistribution.point_mass(0, 0), NoiseModel()) == (
            1.0,
            1.0,
            1.0,
        )

    def test_perfect_correlation(self):
        dist = spin_joint_distribution(spin_schmidt(1), 0.7, 0.7)
        p_pp, p_a, p_b = binarized_probs(dist, NoiseModel(sigma=0.0))
        assert p_pp == pytest.approx(0.5, abs=1e-12)
        assert p_a == pytest.approx(0.5, abs=1e-12)
        assert p_b == pytest.approx(0.5, abs=1e-12)

    def test_large_noise_washes_out(self, quadrature_source):
        p_pp, p_a, p_b = binarized_probs(
            quadrature_source.joint(0.0, -math.pi / 4), NoiseModel(sigma=1e9)
        )
        assert p_pp == pytest.approx(0.25, abs=1e-6)
        assert p_a == pytest.approx(0.5, abs=1e-6)
        assert p_b == pytest.approx(0.5, abs=1e-6)

    def test_rejects_leaky_distribution(self):
        dist = JointIntegerDistribution(
            i_values=np.array([0]),
            j_values=np.array([0]),
            probs=np.array([[0.9]]),
            mass_deficit=0.1,
        )
        with pytest.raises(MassDeficitError):
            binarized_probs(dist, NoiseModel())


class TestChRatio:
    def test_singlet_analytic(self, singlet_source):
        evaluation = ch_ratio(singlet_source, ChSettings.from_psi(math.pi / 4), NoiseModel())
        assert evaluation.s == pytest.approx(SINGLET_MAX_S, abs=1e-10)
        assert evaluation.violates

    def test_stored_ratio_is_consistent(self, quadrature_source, homodyne_settings):
        evaluation = ch_ratio(quadrature_source, homodyne_settings, NoiseModel())
        assert evaluation.s == pytest.approx(evaluation.numerator / evaluation.denominator)
        assert set(evaluation.p_pp) == set(homodyne_settings.pairs())

    def test_large_noise_limit(self, quadrature_source, homodyne_settings):
        evaluation = ch_ratio(quadrature_source, homodyne_settings, NoiseModel(sigma=1e6))
        assert evaluation.s == pytest.approx(0.5, abs=1e-5)

    def test_invariant_under_opposite_shifts(self, quadrature_source, homodyne_settings):
        base = ch_ratio(quadrature_source, homodyne_settings, NoiseModel(sigma=0.1)).s
        rng = np.random.default_rng(7)
        for delta in rng.uniform(-math.pi, math.pi, size=3):
            theta, phi, theta_p, phi_p = homodyne_settings.as_tuple()
            shifted = ChSettings(
                theta=theta + delta,
                phi=phi - delta,
                theta_prime=theta_p + delta,
                phi_prime=phi_p - delta,
            )
            assert ch_ratio(quadrature_source, shifted, NoiseModel(sigma=0.1)).s == pytest.approx(
                base, abs=1e-9
            )

    def test_degenerate_denominator(self, dead_source, homodyne_settings):
        with pytest.raises(DegenerateDenominatorError):
            ch_ratio(dead_source, homodyne_settings, NoiseModel())

    def test_loss_mismatch(self, quadrature_source, homodyne_settings):
        with pytest.raises(UnsupportedConfigurationError):
            ch_ratio(quadrature_source, homodyne_settings, NoiseModel(eta=0.9))

    def test_deterministic(self, homodyne_settings):
        source = ExactSource(pair_coherent_state(1.1, 3.0))
        first = ch_ratio(source, homodyne_settings, NoiseModel(sigma=0.5))
        second = ch_ratio(ExactSource(pair_coherent_state(1.1, 3.0)), homodyne_settings,
                          NoiseModel(sigma=0.5))
        assert first == second

    def test_evaluation_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            ChEvaluation(
                p_pp={"theta_phi": 1.5, "theta_phiprime": 0, "thetaprime_phi": 0,
                      "thetaprime_phiprime": 0},
                p_a=0.5,
                p_b=0.5,
                s=1.5,
            )


class TestSigmaSweep:
    def test_quadrature_curve_is_nonincreasing(self, quadrature_source, homodyne_settings):
        sigmas = np.linspace(0.0, 1.0, 11)
        values = [e.s for e in s_versus_sigma(quadrature_source, homodyne_settings, sigmas)]
        assert np.all(np.diff(values) <= 1e-9)

    def test_parallel_sweep_keeps_order(self, quadrature_source, homodyne_settings):
        sigmas = [0.4, 0.0, 0.2, 0.1]
        serial = s_versus_sigma(quadrature_source, homodyne_settings, sigmas)
        parallel = s_versus_sigma(quadrature_source, homodyne_settings, sigmas, jobs=3)
        assert [e.s for e in serial] == [e.s for e in parallel]

    def test_run_sweep_order(self):
        assert run_sweep(lambda x: x * x, range(20), jobs=4) == [x * x for x in range(20)]


class TestSigmaCutoff:
    def test_no_violation_sentinel(self, washed_out_source, homodyne_settings):
        result = sigma_cutoff(washed_out_source, homodyne_settings)
        assert result.sigma_c == 0.0
        assert not result.violated
        assert result.s_at_zero == pytest.approx(0.5)

    def test_vacuum_signal_has_no_cutoff(self, homodyne_settings):
        result = sigma_cutoff(ExactSource(pair_coherent_state(0.0, 2.0)), homodyne_settings)
        assert result.sigma_c == 0.0
        assert result.s_at_zero <= 1.0

    def test_singlet_closed_form(self, singlet_source):
        result = sigma_cutoff(singlet_source, ChSettings.from_psi(math.pi / 4), tol=1e-5)
        assert result.violated and result.monotone
        assert result.sigma_c == pytest.approx(singlet_cutoff(), abs=1e-4)
        lo, hi = result.bracket
        assert lo <= result.sigma_c <= hi

    def test_tolerance_bound(self, singlet_source):
        with pytest.raises(UnsupportedConfigurationError):
            sigma_cutoff(singlet_source, ChSettings.from_psi(math.pi / 4), tol=1e-2)

    def test_loss_shrinks_cutoff(self, operating_state, homodyne_settings):
        lossless = sigma_cutoff(QuadratureSource(operating_state), homodyne_settings)
        lossy = sigma_cutoff(
            QuadratureSource(operating_state, loss=LossChannel(eta=0.98)), homodyne_settings
        )
        assert lossy.s_at_zero < lossless.s_at_zero
        assert lossy.sigma_c < lossless.sigma_c

    def test_photon_conversion(self):
        assert photon_cutoff_from_quadrature(0.26, 10.0) == pytest.approx(2.6)
        assert photon_cutoff_from_quadrature(0.26, 10.0, eta=0.5) == pytest.approx(1.3)


class TestOptimizePsi:
    def test_singlet_optimum(self):
        psi, evaluation = optimize_psi(1, NoiseModel())
        assert psi == pytest.approx(math.pi / 4, abs=1e-4)
        assert evaluation.s == pytest.approx(SINGLET_MAX_S, abs=1e-8)

    def test_matches_dense_grid(self, singlet_source):
        _, evaluation = optimize_psi(1, NoiseModel())
        grid = np.linspace(1e-4, math.pi / 2, 4001)
        best = max(ch_ratio(singlet_source, ChSettings.from_psi(p), NoiseModel()).s for p in grid)
        assert evaluation.s >= best - 1e-4

    def test_large_noise_is_flat(self):
        _, evaluation = optimize_psi(2, NoiseModel(sigma=1e6))
        assert evaluation.s == pytest.approx(0.5, abs=1e-5)

    def test_global_offset_invariance(self):
        source = SpinSource(spin_schmidt(5))
        plain = ch_ratio(source, ChSettings.from_psi(0.4), NoiseModel(sigma=0.5)).s
        offset = ch_ratio(source, ChSettings.from_psi(0.4, offset=0.9), NoiseModel(sigma=0.5)).s
        assert offset == pytest.approx(plain, abs=1e-9)
