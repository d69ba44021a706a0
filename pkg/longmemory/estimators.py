"""
Whittle estimator of (H, C) and the local-Whittle comparison estimator
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union
import numpy as np
from config.config import SpectralConfig, config
from longmemory.errors import DegenerateSeriesError, DomainError, RangeError
from longmemory.periodogram import (PeriodogramGrid, SeriesLike, fourier_periodogram,
                                    integrated_periodogram, periodogram_grid, series_values)
from longmemory.spectral import normalized_density, scale_maps
from utils.logger import framework_logger
from utils.optimize import grid_golden_minimize

@dataclass
class WhittleOptions:
    """Search settings shared by both estimators"""
    grid_step: float = field(default_factory=lambda: config.estimation.grid_step)
    eps: float = field(default_factory=lambda: config.estimation.eps)
    tol: float = field(default_factory=lambda: config.estimation.tol)
    lw_exponent: float = field(default_factory=lambda: config.estimation.lw_exponent)
    spectral_config: Optional[SpectralConfig] = None
    keep_profile: bool = True

    def __post_init__(self):
        if not 0 < self.eps < 0.05:
            raise DomainError(f"eps must lie in (0, 0.05), got {self.eps}")
        if not 0 < self.grid_step < 0.25:
            raise DomainError(f"grid_step must lie in (0, 0.25), got {self.grid_step}")
        if not 0 < self.tol < self.grid_step:
            raise DomainError(f"tol must lie in (0, grid_step), got {self.tol}")

@dataclass
class WhittleFit:
    """Whittle estimate of (H, sigma^2, C) with its search diagnostics"""
    H_hat: float
    sigma2_hat: float
    C_hat: float
    objective_at_opt: float
    n_evals: int
    bracket: Tuple[float, float]
    sigma2_integral: float
    grid_profile: Optional[List[Tuple[float, float]]] = None
    warnings: List[str] = field(default_factory=list)
    estimator: str = "whittle"

    def to_record(self) -> Dict[str, Any]:
        return {
            "estimator": self.estimator,
            "H_hat": self.H_hat,
            "sigma2_hat": self.sigma2_hat,
            "sigma2_integral": self.sigma2_integral,
            "C_hat": self.C_hat,
            "objective": self.objective_at_opt,
            "n_evals": self.n_evals,
            "bracket": list(self.bracket),
            "warnings": list(self.warnings),
        }

@dataclass
class LocalWhittleFit:
    """Local-Whittle estimate H = 1/2 + d_hat"""
    H_hat: float
    d_hat: float
    m: int
    objective_at_opt: float
    n_evals: int
    bracket: Tuple[float, float]
    warnings: List[str] = field(default_factory=list)
    estimator: str = "lw"

    def to_record(self) -> Dict[str, Any]:
        return {
            "estimator": self.estimator,
            "H_hat": self.H_hat,
            "d_hat": self.d_hat,
            "m": self.m,
            "objective": self.objective_at_opt,
            "n_evals": self.n_evals,
            "bracket": list(self.bracket),
            "warnings": list(self.warnings),
        }

Fit = Union[WhittleFit, LocalWhittleFit]

def _check_nondegenerate(y: np.ndarray):
    if np.ptp(y) == 0.0:
        raise DegenerateSeriesError("series is constant; its mean-corrected periodogram vanishes")

def _boundary_warnings(value: float, lower: float, upper: float, eps: float, name: str) -> List[str]:
    if value - lower < 2.0 * eps or upper - value < 2.0 * eps:
        return [f"{name}={value:.6f} within {2.0 * eps:g} of the boundary of ({lower:g}, {upper:g})"]
    return []

# ---------------------------------------------------------------------------
# Whittle

def whittle_objective(grid: PeriodogramGrid, H: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """(2 pi / N) sum_{k=1}^{N} I_N(pi k / N) / g_H(pi k / N) on a mean-corrected grid"""
    if not grid.mean_corrected:
        raise DomainError("the Whittle contrast needs a mean-corrected periodogram")
    return integrated_periodogram(grid, lambda lam: 1.0 / normalized_density(H, lam, spectral_config))

def estimate_whittle(series: SeriesLike, options: Optional[WhittleOptions] = None) -> WhittleFit:
    """
    Whittle estimate over [1/2 + eps, 1 - eps]

    Args:
        series: increments, N >= 32
        options: search settings

    Returns:
        WhittleFit with H_hat, sigma2_hat = objective / 2 pi and
        C_hat = scale_maps(H_hat, sigma2_hat)

    Raises:
        DegenerateSeriesError: constant series
    """
    options = options or WhittleOptions()
    y = series_values(series)
    if y.size < 32:
        raise DomainError(f"the Whittle estimator needs N >= 32, got {y.size}")
    _check_nondegenerate(y)

    grid = periodogram_grid(y, mean_correct=True)
    lower, upper = 0.5 + options.eps, 1.0 - options.eps
    result = grid_golden_minimize(lambda h: whittle_objective(grid, h, options.spectral_config),
                                  lower, upper, options.grid_step, options.tol)
    if not result.minimum > 0:
        raise DegenerateSeriesError(f"Whittle objective is {result.minimum} at its minimum")

    H_hat = result.argmin
    g = normalized_density(H_hat, grid.frequencies, options.spectral_config)
    sigma2_hat = float(np.mean(grid.ordinates / g))
    sigma2_integral = result.minimum / (2.0 * np.pi)
    C_hat = scale_maps(H_hat, sigma2_hat, options.spectral_config)

    warnings = _boundary_warnings(H_hat, 0.5, 1.0, options.eps, "H_hat")
    for message in warnings:
        framework_logger.warning(f"Whittle fit: {message}")
    if not result.converged:
        warnings.append("golden-section search hit its iteration cap")
    framework_logger.debug(f"Whittle fit N={grid.N}: H_hat={H_hat:.6f} sigma2={sigma2_hat:.6g} "
                           f"C_hat={C_hat:.6g} evals={result.n_evals}")
    return WhittleFit(
        H_hat=H_hat,
        sigma2_hat=sigma2_hat,
        C_hat=C_hat,
        objective_at_opt=result.minimum,
        n_evals=result.n_evals,
        bracket=result.bracket,
        sigma2_integral=sigma2_integral,
        grid_profile=result.grid_profile if options.keep_profile else None,
        warnings=warnings,
    )

# ---------------------------------------------------------------------------
# Local Whittle

def default_trimming(N: int, exponent: Optional[float] = None) -> int:
    """m = floor(N^0.65)"""
    exponent = config.estimation.lw_exponent if exponent is None else exponent
    return int(math.floor(N ** exponent))

def local_whittle_profile(frequencies: np.ndarray, ordinates: np.ndarray, d: float) -> float:
    """R(d) = log((1/m) sum lambda_j^{2d} I_j) - (2d/m) sum log lambda_j"""
    return float(np.log(np.mean(frequencies ** (2.0 * d) * ordinates)) - 2.0 * d * np.mean(np.log(frequencies)))

def fit_local_whittle(series: SeriesLike, m: Optional[int] = None,
                      options: Optional[WhittleOptions] = None) -> LocalWhittleFit:
    """
    Local-Whittle fit on the m lowest Fourier frequencies, d searched over [eps, 1/2 - eps]

    Raises:
        RangeError: m >= N/2 or m < 4
        DegenerateSeriesError: constant series
    """
    options = options or WhittleOptions()
    y = series_values(series)
    n = y.size
    if n < 64:
        raise DomainError(f"the local-Whittle estimator needs N >= 64, got {n}")
    m = default_trimming(n, options.lw_exponent) if m is None else int(m)
    if m < 4 or m >= n / 2:
        raise RangeError(f"trimming m={m} must satisfy 4 <= m < N/2 = {n / 2:g}")
    _check_nondegenerate(y)

    frequencies, ordinates = fourier_periodogram(y, m)
    if not np.any(ordinates > 0):
        raise DegenerateSeriesError("periodogram vanishes at every Fourier frequency used")
    lower, upper = options.eps, 0.5 - options.eps
    result = grid_golden_minimize(lambda d: local_whittle_profile(frequencies, ordinates, d),
                                  lower, upper, options.grid_step, options.tol)
    d_hat = result.argmin
    warnings = _boundary_warnings(d_hat, 0.0, 0.5, options.eps, "d_hat")
    for message in warnings:
        framework_logger.warning(f"Local-Whittle fit: {message}")
    return LocalWhittleFit(
        H_hat=0.5 + d_hat,
        d_hat=d_hat,
        m=m,
        objective_at_opt=result.minimum,
        n_evals=result.n_evals,
        bracket=result.bracket,
        warnings=warnings,
    )

def estimate_local_whittle(series: SeriesLike, m: Optional[int] = None,
                           options: Optional[WhittleOptions] = None) -> float:
    """H_LW = 1/2 + d_hat"""
    return fit_local_whittle(series, m, options).H_hat

ESTIMATORS = ("whittle", "lw")

def estimate(series: SeriesLike, estimator: str = "whittle", options: Optional[WhittleOptions] = None,
             m: Optional[int] = None) -> Fit:
    """Dispatch on estimator name ('whittle' or 'lw')"""
    if estimator == "whittle":
        return estimate_whittle(series, options)
    if estimator == "lw":
        return fit_local_whittle(series, m, options)
    raise DomainError(f"unknown estimator {estimator!r}; use one of {ESTIMATORS}")
