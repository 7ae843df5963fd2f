import math

import numpy as np
import pytest
from scipy.linalg import expm

from common.errors import DomainError
from simulator.core.numkernel import (
    LogFactorialTable,
    bessel_i0,
    displaced_fock_overlap,
    displacement_matrix,
    gaussian_tail,
    hermite_functions,
    hermite_psi,
    log_bessel_i0,
)


def _i0_series(x: float, terms: int = 60) -> float:
    return sum((0.25 * x * x) ** k / math.factorial(k) ** 2 for k in range(terms))


class TestLogFactorialTable:
    def test_values(self):
        table = LogFactorialTable.build(30)
        assert table[0] == 0.0
        np.testing.assert_allclose(np.diff(table.values), np.log(np.arange(1, 31)), rtol=1e-12)
        assert np.all(np.diff(table.values) >= 0.0)

    def test_log_binomial(self):
        table = LogFactorialTable.build(20)
        assert math.exp(table.log_binomial(20, 7)) == pytest.approx(math.comb(20, 7), rel=1e-12)

    def test_negative_size(self):
        with pytest.raises(DomainError):
            LogFactorialTable.build(-1)


class TestBessel:
    def test_zero(self):
        assert bessel_i0(0.0) == 1.0

    @pytest.mark.parametrize("x", [1.0, 2.0 * 1.1**2, 7.5])
    def test_series(self, x):
        assert bessel_i0(x) == pytest.approx(_i0_series(x), rel=1e-12)

    def test_log_form_agrees(self):
        assert log_bessel_i0(2.42) == pytest.approx(math.log(bessel_i0(2.42)), rel=1e-13)

    def test_log_form_beyond_overflow(self):
        assert math.isfinite(log_bessel_i0(5000.0))

    @pytest.mark.parametrize("x", [-1.0, 701.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            bessel_i0(x)


class TestHermite:
    def test_origin(self):
        assert hermite_psi(0, 0.0) == pytest.approx((2 * math.pi) ** -0.25, abs=1e-12)
        assert hermite_psi(0, 0.0) == pytest.approx(0.63161878, abs=1e-8)
        assert hermite_psi(1, 0.0) == 0.0

    def test_orthonormal(self):
        step = 0.01
        x = np.arange(-15.0, 15.0 + step / 2, step)
        psi = hermite_functions(20, x)
        gram = psi @ psi.T * step
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-8)

    def test_vacuum_variance_is_one(self):
        step = 0.005
        x = np.arange(-12.0, 12.0, step)
        density = hermite_psi(0, x) ** 2
        assert np.sum(x * x * density) * step == pytest.approx(1.0, abs=1e-10)

    def test_recurrence_residual(self):
        x = np.linspace(-12.0, 12.0, 241)
        psi = hermite_functions(101, x)
        for n in range(1, 101):
            residual = x * psi[n] - math.sqrt(n + 1) * psi[n + 1] - math.sqrt(n) * psi[n - 1]
            assert np.max(np.abs(residual)) < 1e-10

    def test_order_bound(self):
        with pytest.raises(DomainError):
            hermite_functions(201, [0.0])


class TestDisplacement:
    def test_vacuum_overlap(self):
        assert displaced_fock_overlap(0, 0, 1.7) == pytest.approx(math.exp(-0.5 * 1.7**2))

    def test_coherent_amplitude(self):
        assert displaced_fock_overlap(1, 0, 2.0) == pytest.approx(2.0 * math.exp(-2.0))

    def test_zero_displacement_is_identity(self):
        np.testing.assert_array_equal(displacement_matrix(range(4), range(4), 0.0), np.eye(4))

    def test_matches_matrix_exponential(self):
        dim = 120
        a = np.diag(np.sqrt(np.arange(1, dim)), k=1)
        beta = 5.0
        dense = expm(beta * (a.T - a))
        closed = displacement_matrix(np.arange(61), np.arange(11), beta)
        np.testing.assert_allclose(closed, dense[:61, :11], atol=1e-8)

    @pytest.mark.parametrize("beta", [0.5, 3.0, 8.0])
    def test_columns_are_normalised(self, beta):
        columns = displacement_matrix(np.arange(400), np.arange(11), beta)
        np.testing.assert_allclose(np.sum(columns**2, axis=0), 1.0, atol=1e-10)

    def test_negative_index(self):
        with pytest.raises(DomainError):
            displacement_matrix([-1], [0], 1.0)


class TestGaussianTail:
    def test_symmetric_point(self):
        assert gaussian_tail(0.0, 1.3) == 0.5

    def test_sharp_step(self):
        assert gaussian_tail(3, 0.0) == 1.0
        assert gaussian_tail(0, 0.0) == 1.0
        assert gaussian_tail(-1, 0.0) == 0.0

    def test_lower_tail(self):
        assert gaussian_tail(-1.96 * 2.0, 2.0) == pytest.approx(0.0250, abs=1e-4)

    def test_complement(self):
        i = np.arange(-10, 11)
        np.testing.assert_allclose(gaussian_tail(i, 2.5) + gaussian_tail(-i, 2.5), 1.0, atol=1e-15)

    def test_negative_sigma(self):
        with pytest.raises(DomainError):
            gaussian_tail(0.0, -1.0)
