import math

import numpy as np
import pytest

from common.errors import DomainError
from simulator.core.states import pair_coherent_coeffs, pair_coherent_state, spin_schmidt
from simulator.oracle.symbolic import symbolic_spin_expand, symbolic_spin_norm


class TestPairCoherent:
    def test_vacuum_pair(self):
        c, tail = pair_coherent_coeffs(0.0)
        np.testing.assert_array_equal(c, [1.0])
        assert tail == 0.0

    def test_coefficient_ratios(self):
        c, _ = pair_coherent_coeffs(1.1)
        assert c[1] / c[0] == pytest.approx(1.21, rel=1e-12)
        assert c[2] / c[0] == pytest.approx(1.21**2 / 2, rel=1e-12)

    def test_normalised(self):
        c, tail = pair_coherent_coeffs(1.1)
        assert np.sum(c**2) == pytest.approx(1.0, abs=1e-12)
        assert tail < 1e-14
        assert c.size - 1 <= 20

    def test_truncation_follows_tolerance(self):
        loose, loose_tail = pair_coherent_coeffs(1.1, tail_tol=1e-6)
        tight, tight_tail = pair_coherent_coeffs(1.1, tail_tol=1e-14)
        assert loose.size < tight.size
        assert loose_tail < 1e-6
        assert tight_tail < 1e-14

    def test_decreasing_beyond_peak(self):
        r0 = 2.0
        c, _ = pair_coherent_coeffs(r0)
        peak = math.floor(r0**2)
        assert np.all(c >= 0.0)
        assert np.all(np.diff(c[peak:]) < 0.0)

    def test_large_pump_is_stable(self):
        c, _ = pair_coherent_coeffs(3.0)
        assert np.all(np.isfinite(c))
        assert np.sum(c**2) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("r0", [-0.1, 3.5, float("inf")])
    def test_pump_domain(self, r0):
        with pytest.raises(DomainError):
            pair_coherent_coeffs(r0)

    def test_tail_tol_domain(self):
        with pytest.raises(DomainError):
            pair_coherent_coeffs(1.1, tail_tol=1e-3)

    def test_state_fields(self):
        state = pair_coherent_state(1.1, 4.0)
        assert state.alpha == state.beta == 4.0
        assert state.n_max == state.c.size - 1
        assert state.norm_squared == pytest.approx(1.0, abs=1e-12)
        assert state.number_difference_eigenvalue() == 0
        assert state.mean_pair_number > 0.0

    def test_negative_amplitude(self):
        with pytest.raises(DomainError):
            pair_coherent_state(1.1, -1.0)


class TestSpinSchmidt:
    def test_single_pair(self):
        state = spin_schmidt(1)
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2)] * 2, rtol=1e-14)
        assert set(state.basis) == {(1, 0), (0, 1)}

    def test_two_pairs(self):
        np.testing.assert_allclose(spin_schmidt(2).amplitudes, [1 / math.sqrt(3)] * 3, rtol=1e-14)

    def test_uniform_at_bound(self):
        state = spin_schmidt(200)
        assert state.schmidt_rank == 201
        np.testing.assert_allclose(state.amplitudes, 1 / math.sqrt(201), rtol=1e-10)

    def test_matches_symbolic_expansion(self):
        state = spin_schmidt(4)
        symbolic = symbolic_spin_expand(4, 0.0, 0.0)
        np.testing.assert_allclose(np.diag(symbolic.probs), state.amplitudes**2, atol=1e-14)

    @pytest.mark.parametrize("N", range(1, 11))
    def test_rational_norm(self, N):
        assert symbolic_spin_norm(N) == 1

    @pytest.mark.parametrize("N", [0, 201, 2.5])
    def test_domain(self, N):
        with pytest.raises(DomainError):
            spin_schmidt(N)
