"""
Periodogram tests - sample autocovariance, Riemann-grid and Fourier periodograms
"""
import math
import pytest
import numpy as np
from longmemory.errors import DomainError, RangeError
from longmemory.periodogram import (fourier_periodogram, integrated_periodogram, periodogram_grid,
                                    sample_autocov, series_values, trapezoid_total)
from longmemory.simulate import SeedSpec, TimeSeries, simulate_fgn
from longmemory.spectral import covariogram
from tests.conftest import TEST_SEED, assert_close

def brute_force_periodogram(y: np.ndarray) -> np.ndarray:
    n = y.size
    j = np.arange(n)
    return np.array([
        abs(np.sum(y * np.exp(-1j * j * np.pi * k / n))) ** 2 / (2.0 * np.pi * n)
        for k in range(1, n + 1)
    ])

@pytest.mark.periodogram
class TestSampleAutocov:
    """Test class for the biased sample autocovariance"""

    def test_hand_computed(self):
        y = np.array([1.0, -1.0, 2.0])
        assert sample_autocov(y, 0) == 2.0
        assert sample_autocov(y, 1) == -1.0
        assert_close(sample_autocov(y, 2), 2.0 / 3.0, rel=1e-15)

    def test_symmetric_in_lag(self, white_noise):
        assert sample_autocov(white_noise, -3) == sample_autocov(white_noise, 3)

    @pytest.mark.parametrize("lag", [3, -3, 10])
    def test_lag_out_of_range(self, lag):
        with pytest.raises(RangeError):
            sample_autocov(np.array([1.0, -1.0, 2.0]), lag)

    def test_accepts_time_series(self, white_noise):
        series = TimeSeries(white_noise)
        assert sample_autocov(series, 2) == sample_autocov(white_noise, 2)

    def test_rejects_short_input(self):
        with pytest.raises(DomainError):
            series_values(np.array([1.0]))

    def test_unbiased_up_to_edge_factor(self):
        """E r_hat(k) = (N - k) / N r(k) for a mean-zero stationary series"""
        N, k, H = 256, 2, 0.7
        values = np.array([sample_autocov(simulate_fgn(H, N, SeedSpec(TEST_SEED, s)), k) for s in range(2000)])
        expected = (N - k) / N * covariogram(H, k)
        standard_error = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - expected) < 3.0 * standard_error

@pytest.mark.periodogram
class TestPeriodogramGrid:
    """Test class for I_N on lambda_k = pi k / N"""

    @pytest.mark.parametrize("N", [37, 64])
    def test_matches_direct_sum(self, N):
        y = np.random.default_rng(N).standard_normal(N)
        grid = periodogram_grid(y, mean_correct=False)
        assert np.allclose(grid.ordinates, brute_force_periodogram(y), rtol=1e-10, atol=1e-13)
        assert np.allclose(grid.frequencies, np.pi * np.arange(1, N + 1) / N)

    def test_mean_correction_matches_direct_sum(self, white_noise):
        y = white_noise[:50] + 3.0
        grid = periodogram_grid(y, mean_correct=True)
        assert np.allclose(grid.ordinates, brute_force_periodogram(y - y.mean()), rtol=1e-10, atol=1e-13)
        assert grid.mean_corrected

    def test_constant_series_vanishes(self):
        grid = periodogram_grid(np.full(100, 5.0))
        assert np.all(grid.ordinates == 0.0)
        assert grid.zero_ordinate == 0.0

    def test_impulse_is_flat(self):
        y = np.zeros(128)
        y[0] = 1.0
        grid = periodogram_grid(y, mean_correct=False)
        assert np.allclose(grid.ordinates, 1.0 / (2.0 * np.pi * 128), rtol=1e-12)

    def test_shift_invariant(self, white_noise):
        base = periodogram_grid(white_noise).ordinates
        shifted = periodogram_grid(white_noise + 5.0).ordinates
        assert np.allclose(shifted, base, rtol=1e-9, atol=1e-10 * base.max())

    def test_power_of_two_scaling_exact(self, white_noise):
        base = periodogram_grid(white_noise).ordinates
        assert np.array_equal(periodogram_grid(2.0 * white_noise).ordinates, 4.0 * base)

    def test_scale_equivariant(self, white_noise):
        base = periodogram_grid(white_noise).ordinates
        assert np.allclose(periodogram_grid(3.0 * white_noise).ordinates, 9.0 * base, rtol=1e-12, atol=1e-14)

    def test_nonnegative(self, fgn_series):
        grid = periodogram_grid(fgn_series)
        assert np.all(grid.ordinates >= 0)
        assert grid.N == len(fgn_series)

    def test_read_only(self, white_noise):
        grid = periodogram_grid(white_noise)
        with pytest.raises(ValueError):
            grid.ordinates[0] = 0.0

    def test_trapezoid_parseval(self):
        """(2pi/N)[sum_{1}^{N-1} I_k + (I_0 + I_N)/2] = r_hat(0)"""
        y = np.random.default_rng(TEST_SEED).standard_normal(1024) + 0.5
        raw = periodogram_grid(y, mean_correct=False)
        assert_close(trapezoid_total(raw), sample_autocov(y, 0), rel=1e-10)
        centered = periodogram_grid(y, mean_correct=True)
        assert_close(trapezoid_total(centered), sample_autocov(y - y.mean(), 0), rel=1e-10)
        assert centered.zero_ordinate < 1e-20

    def test_frame_layout(self, white_noise):
        frame = periodogram_grid(white_noise).to_frame()
        assert list(frame.columns) == ["k", "lambda", "ordinate"]
        assert frame.shape == (512, 3)
        assert frame["k"].iloc[0] == 1

@pytest.mark.periodogram
class TestIntegratedPeriodogram:
    """Test class for J_N(g) = (2pi/N) sum g(lambda_k) I_N(lambda_k)"""

    def test_unit_weight_is_one_sided_parseval(self, white_noise):
        grid = periodogram_grid(white_noise, mean_correct=False)
        expected = sample_autocov(white_noise, 0) + np.pi / grid.N * (grid.ordinates[-1] - grid.zero_ordinate)
        assert_close(integrated_periodogram(grid, lambda lam: 1.0), expected, rel=1e-10)

    def test_zero_weight(self, white_noise):
        assert integrated_periodogram(periodogram_grid(white_noise), lambda lam: np.zeros_like(lam)) == 0.0

    def test_linear_in_weight(self, fgn_series):
        grid = periodogram_grid(fgn_series)
        g1 = lambda lam: np.cos(lam) + 2.0
        g2 = lambda lam: lam ** 2
        combined = integrated_periodogram(grid, lambda lam: g1(lam) + g2(lam))
        separate = integrated_periodogram(grid, g1) + integrated_periodogram(grid, g2)
        assert_close(combined, separate, rel=1e-12)

    def test_singular_weight_rejected(self, white_noise):
        grid = periodogram_grid(white_noise)
        with pytest.raises(DomainError):
            integrated_periodogram(grid, lambda lam: 1.0 / (lam - np.pi))

@pytest.mark.periodogram
class TestFourierPeriodogram:
    """Test class for the periodogram at 2 pi j / N"""

    def test_frequencies_and_ordinates(self, white_noise):
        y = white_noise[:100]
        freqs, ordinates = fourier_periodogram(y, 10)
        assert np.allclose(freqs, 2.0 * np.pi * np.arange(1, 11) / 100)
        centered = y - y.mean()
        t = np.arange(100)
        direct = [abs(np.sum(centered * np.exp(-1j * t * w))) ** 2 / (2.0 * np.pi * 100) for w in freqs]
        assert np.allclose(ordinates, direct, rtol=1e-10)

    def test_even_grid_points_coincide(self, white_noise):
        """2 pi j / N is the grid point pi (2j) / N"""
        freqs, ordinates = fourier_periodogram(white_noise, 20)
        grid = periodogram_grid(white_noise)
        assert np.allclose(ordinates, grid.ordinates[1:40:2], rtol=1e-10)

    @pytest.mark.parametrize("m", [0, 257, 1000])
    def test_trimming_out_of_range(self, white_noise, m):
        with pytest.raises(RangeError):
            fourier_periodogram(white_noise, m)
