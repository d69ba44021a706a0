"""
Sample autocovariance, periodograms and integrated periodograms
"""
from dataclasses import dataclass
from typing import Callable, Tuple, Union
import numpy as np
import pandas as pd
from scipy import fft
from longmemory.errors import DomainError, RangeError
from longmemory.simulate import TimeSeries

SeriesLike = Union[TimeSeries, np.ndarray]

@dataclass(frozen=True)
class PeriodogramGrid:
    """Periodogram ordinates on the Riemann grid lambda_k = pi k / N, k = 1..N"""
    N: int
    frequencies: np.ndarray
    ordinates: np.ndarray
    mean_corrected: bool
    zero_ordinate: float

    def __post_init__(self):
        if self.ordinates.shape != (self.N,) or self.frequencies.shape != (self.N,):
            raise DomainError(f"grid of length {self.N} needs {self.N} frequencies and ordinates")
        if not np.all(np.isfinite(self.ordinates)) or np.any(self.ordinates < 0):
            raise DomainError("periodogram ordinates must be finite and nonnegative")
        self.frequencies.flags.writeable = False
        self.ordinates.flags.writeable = False

    def to_frame(self) -> pd.DataFrame:
        """CSV layout (k, lambda, ordinate)"""
        return pd.DataFrame({
            "k": np.arange(1, self.N + 1),
            "lambda": self.frequencies,
            "ordinate": self.ordinates,
        })

def series_values(series: SeriesLike) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DomainError(f"a series needs at least 2 values, got shape {values.shape}")
    return values

def sample_autocov(series: SeriesLike, k: int) -> float:
    """
    Biased sample autocovariance (1/N) sum_{j} Y_j Y_{j+|k|}, without mean correction

    Raises:
        RangeError: |k| >= N
    """
    y = series_values(series)
    lag = abs(int(k))
    if lag >= y.size:
        raise RangeError(f"lag {k} out of range for a series of length {y.size}")
    return float(np.dot(y[:y.size - lag], y[lag:]) / y.size)

def periodogram_grid(series: SeriesLike, mean_correct: bool = True) -> PeriodogramGrid:
    """
    I_N(pi k / N) = (1 / 2 pi N) |sum_j (Y_j - mean) e^{-i j pi k / N}|^2 for k = 1..N

    Zero-padding to 2N puts bin k exactly on pi k / N.
    """
    y = series_values(series)
    n = y.size
    if mean_correct:
        y = y - y.mean()
    power = np.abs(fft.fft(y, n=2 * n)[:n + 1]) ** 2 / (2.0 * np.pi * n)
    return PeriodogramGrid(
        N=n,
        frequencies=np.pi * np.arange(1, n + 1) / n,
        ordinates=power[1:],
        mean_corrected=mean_correct,
        zero_ordinate=float(power[0]),
    )

def integrated_periodogram(grid: PeriodogramGrid, g: Callable[[np.ndarray], Union[float, np.ndarray]]) -> float:
    """
    One-sided Riemann sum (2 pi / N) sum_{k=1}^{N} g(pi k / N) I_N(pi k / N)

    g is called once on the whole frequency array and may return a scalar.
    """
    weights = np.broadcast_to(np.asarray(g(grid.frequencies), dtype=float), grid.frequencies.shape)
    if not np.all(np.isfinite(weights)):
        raise DomainError("weight function is not finite at every grid frequency")
    return float(2.0 * np.pi / grid.N * np.dot(weights, grid.ordinates))

def trapezoid_total(grid: PeriodogramGrid) -> float:
    """
    (2 pi / N) [sum_{k=1}^{N-1} I_k + (I_0 + I_N) / 2]

    Equals the lag-0 sample autocovariance of the (demeaned, if the grid is
    mean corrected) series.
    """
    interior = float(np.sum(grid.ordinates[:-1]))
    ends = 0.5 * (grid.zero_ordinate + float(grid.ordinates[-1]))
    return 2.0 * np.pi / grid.N * (interior + ends)

def fourier_periodogram(series: SeriesLike, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean-corrected periodogram at the Fourier frequencies 2 pi j / N, j = 1..m

    Raises:
        RangeError: m outside 1..N/2
    """
    y = series_values(series)
    n = y.size
    if not 1 <= m <= n // 2:
        raise RangeError(f"m={m} out of range 1..{n // 2} for a series of length {n}")
    y = y - y.mean()
    transform = fft.fft(y)[1:m + 1]
    return 2.0 * np.pi * np.arange(1, m + 1) / n, np.abs(transform) ** 2 / (2.0 * np.pi * n)
