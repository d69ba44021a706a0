"""
Exact second-order model of the increment process

Covariogram r_{H,C}, spectral density f_{H,C} = sigma^2 g_H, the shape
normalizer a_H and the constants of the non-central limit theorems.
"""
import math
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union
import numpy as np
import pandas as pd
from scipy import special
from config.config import SpectralConfig, config
from longmemory.errors import DomainError, DerivativeInstabilityError
from utils.logger import framework_logger

ArrayLike = Union[float, np.ndarray]

HURST_MARGIN = 1e-3
RICHARDSON_TOLERANCE = 1e-3
_GAUSS_ORDER = 10
_GEOMETRIC_DEPTH = 48
_CHUNK_ROWS = 4096

@dataclass(frozen=True)
class LongMemoryParams:
    """Law of the increment process: self-similarity index H and scale C"""
    H: float
    C: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.H) and 0.5 < self.H < 1.0):
            raise DomainError(f"H must lie strictly inside (1/2, 1), got {self.H}")
        if not (math.isfinite(self.C) and self.C > 0):
            raise DomainError(f"C must be positive, got {self.C}")

@dataclass(frozen=True)
class LimitConstants:
    """Constants of the N^{1-H} limit theorems for H_hat and C_hat"""
    H: float
    gamma_theorem: float
    gamma_proposition: float
    beta: float
    mu: float
    mu_prime: float
    rho_theorem: float
    rho_proposition: float
    contrast_curvature: float
    richardson_disagreement: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

def clamp_hurst(H: float) -> float:
    """Reject H outside (1/2, 1) and pull it into [1/2 + 1e-3, 1 - 1e-3]"""
    if not (math.isfinite(H) and 0.5 < H < 1.0):
        raise DomainError(f"H must lie strictly inside (1/2, 1), got {H}")
    clamped = min(max(H, 0.5 + HURST_MARGIN), 1.0 - HURST_MARGIN)
    if clamped != H:
        framework_logger.debug(f"H={H} clamped to {clamped}")
    return clamped

def _resolve(spectral_config: Optional[SpectralConfig]) -> SpectralConfig:
    return spectral_config if spectral_config is not None else config.spectral

def density_constant(H: float) -> float:
    """kappa(H) = sin(pi H) Gamma(2H + 1) / pi, fixed by int f = r(0)"""
    return math.sin(math.pi * H) * math.gamma(2.0 * H + 1.0) / math.pi

# ---------------------------------------------------------------------------
# Covariogram

def covariogram(H: float, lags: ArrayLike, C: float = 1.0) -> ArrayLike:
    """
    Autocovariance of unit-spaced increments of an H-self-similar process

    Valid for every H in (0, 1); the fGn generator also uses it below 1/2.
    """
    t = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * H
    r = 0.5 * C * C * (np.abs(t + 1.0) ** two_h + np.abs(t - 1.0) ** two_h - 2.0 * t ** two_h)
    return float(r) if np.ndim(r) == 0 else r

def autocovariance(params: LongMemoryParams, lag: ArrayLike) -> ArrayLike:
    """r_{H,C}(lag) = (C^2/2)(|t+1|^{2H} + |t-1|^{2H} - 2|t|^{2H}), t = |lag|"""
    return covariogram(params.H, lag, params.C)

# ---------------------------------------------------------------------------
# Lattice sum and quadrature

def _lattice_sum(H: float, lam: np.ndarray, K: int) -> np.ndarray:
    """
    sum_k |lam + 2k pi|^{-1-2H} for lam in (0, pi]

    Terms |k| <= K are summed exactly; both tails use the midpoint integral
    comparison int_{K+1/2}^inf (2 pi x +- lam)^{-1-2H} dx.
    """
    exponent = -1.0 - 2.0 * H
    shifts = 2.0 * np.pi * np.arange(-K, K + 1, dtype=float)
    out = np.empty_like(lam)
    for start in range(0, lam.size, _CHUNK_ROWS):
        block = lam[start:start + _CHUNK_ROWS]
        out[start:start + _CHUNK_ROWS] = (np.abs(block[:, None] + shifts[None, :]) ** exponent).sum(axis=1)
    edge = 2.0 * np.pi * (K + 0.5)
    tail = ((edge + lam) ** (-2.0 * H) + (edge - lam) ** (-2.0 * H)) / (4.0 * np.pi * H)
    return out + tail

def _log_shape(H: float, lam: np.ndarray, K: int) -> np.ndarray:
    """log of (1 - cos lam) times the lattice sum; 1 - cos written as 2 sin^2 to survive tiny lam"""
    return np.log(2.0 * np.sin(0.5 * lam) ** 2) + np.log(_lattice_sum(H, lam, K))

def _fold(lam: ArrayLike) -> Tuple[np.ndarray, Tuple[int, ...]]:
    arr = np.asarray(lam, dtype=float)
    if np.any(arr == 0.0):
        raise DomainError("spectral densities diverge at lambda = 0 for H > 1/2")
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > np.pi + 1e-12):
        raise DomainError("lambda must lie in [-pi, pi]")
    return np.abs(arr).ravel(), arr.shape

@lru_cache(maxsize=16)
def quadrature_rule(quadrature_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights on (0, pi] for integrands singular at 0

    quadrature_points geometric panels with endpoints pi * r^j,
    r = 2^{-48/Q}, plus a last panel down to 0; Gauss-Legendre on each.
    """
    ratio = 2.0 ** (-_GEOMETRIC_DEPTH / quadrature_points)
    edges = np.append(np.pi * ratio ** np.arange(quadrature_points + 1), 0.0)
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    hi, lo = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights

def integrate_even(values: np.ndarray, weights: np.ndarray) -> float:
    """int_{-pi}^{pi} of an even function sampled at quadrature_rule nodes"""
    return 2.0 * float(np.dot(weights, values))

# ---------------------------------------------------------------------------
# a_H and g_H

@lru_cache(maxsize=4096)
def _log_normalizer_cached(H: float, K: int, Q: int) -> float:
    nodes, weights = quadrature_rule(Q)
    mean_log = integrate_even(_log_shape(H, nodes, K), weights) / (2.0 * np.pi)
    return math.exp(-mean_log)

def log_normalizer_unchecked(H: float, truncation_order: int = 200, quadrature_points: int = 64) -> float:
    """a_H without domain checks; the only entry point that accepts H = 1/2"""
    return _log_normalizer_cached(float(H), int(truncation_order), int(quadrature_points))

def log_normalizer(H: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """
    a_H = exp[-(1/2pi) int_{-pi}^{pi} log((1 - cos t) sum_k |t + 2k pi|^{-1-2H}) dt]

    The 1/(2pi) factor makes int log g_H = 0 hold exactly.
    """
    cfg = _resolve(spectral_config)
    return log_normalizer_unchecked(clamp_hurst(H), cfg.truncation_order, cfg.quadrature_points)

def _shape(H: float, lam: np.ndarray, K: int) -> np.ndarray:
    return 2.0 * np.sin(0.5 * lam) ** 2 * _lattice_sum(H, lam, K)

def normalized_density_unchecked(H: float, lam: ArrayLike, truncation_order: int = 200,
                                 quadrature_points: int = 64) -> ArrayLike:
    """g_H(lam) for any H in [1/2, 1]; lam must be nonzero"""
    folded, shape = _fold(lam)
    a = log_normalizer_unchecked(H, truncation_order, quadrature_points)
    g = (a * _shape(H, folded, truncation_order)).reshape(shape)
    return float(g) if g.ndim == 0 else g

def normalized_density(H: float, lam: ArrayLike, spectral_config: Optional[SpectralConfig] = None) -> ArrayLike:
    """g_H(lam) = a_H (1 - cos lam) sum_k |lam + 2k pi|^{-1-2H}; independent of C"""
    cfg = _resolve(spectral_config)
    return normalized_density_unchecked(clamp_hurst(H), lam, cfg.truncation_order, cfg.quadrature_points)

def _inverse_density_on(H: float, lam: np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    a = log_normalizer_unchecked(H, cfg.truncation_order, cfg.quadrature_points)
    return 1.0 / (a * _shape(H, lam, cfg.truncation_order))

# ---------------------------------------------------------------------------
# Spectral model

class SpectralModel:
    """Immutable spectral model of one (H, C) law, with a_H and sigma^2 cached at construction"""

    def __init__(self, params: LongMemoryParams, spectral_config: Optional[SpectralConfig] = None):
        self._params = LongMemoryParams(clamp_hurst(params.H), params.C)
        self._config = _resolve(spectral_config)
        self._a_h = log_normalizer_unchecked(self._params.H, self._config.truncation_order,
                                             self._config.quadrature_points)
        self._sigma2 = density_constant(self._params.H) * self._params.C ** 2 / self._a_h
        framework_logger.debug(f"SpectralModel H={self._params.H} C={self._params.C}: "
                               f"a_H={self._a_h:.12g} sigma2={self._sigma2:.12g}")

    @property
    def params(self) -> LongMemoryParams:
        return self._params

    @property
    def config(self) -> SpectralConfig:
        return self._config

    @property
    def a_h(self) -> float:
        return self._a_h

    @property
    def sigma2(self) -> float:
        return self._sigma2

    def density(self, lam: ArrayLike) -> ArrayLike:
        """f_{H,C}(lam) = kappa(H) C^2 (1 - cos lam) sum_k |lam + 2k pi|^{-1-2H}"""
        folded, shape = _fold(lam)
        H, C = self._params.H, self._params.C
        f = (density_constant(H) * C * C * _shape(H, folded, self._config.truncation_order)).reshape(shape)
        return float(f) if f.ndim == 0 else f

    def normalized(self, lam: ArrayLike) -> ArrayLike:
        return normalized_density_unchecked(self._params.H, lam, self._config.truncation_order,
                                            self._config.quadrature_points)

    def __repr__(self) -> str:
        return f"SpectralModel(H={self._params.H}, C={self._params.C}, a_H={self._a_h:.6g}, sigma2={self._sigma2:.6g})"

def spectral_density(model: SpectralModel, lam: ArrayLike) -> ArrayLike:
    """f_{H,C}(lam) for lam in [-pi, pi] \\ {0}"""
    return model.density(lam)

def covariance_of_density(model: SpectralModel, lag: int) -> float:
    """int_{-pi}^{pi} f(lam) cos(lag lam) d lam, which should reproduce r_{H,C}(lag)"""
    nodes, weights = quadrature_rule(model.config.quadrature_points)
    return integrate_even(model.density(nodes) * np.cos(lag * nodes), weights)

def fourier_partial_sum(params: LongMemoryParams, lam: float, max_lag: int, average_over: int = 8) -> float:
    """
    (1/2pi) sum_{|k| <= M} r(k) e^{ik lam}, averaged over M = max_lag .. max_lag + average_over - 1

    The remainder of a plain partial sum oscillates with amplitude ~ r(M);
    averaging over a full period of the oscillation cancels its leading term.
    average_over=1 gives the plain partial sum.
    """
    if max_lag < 1 or average_over < 1:
        raise DomainError("max_lag and average_over must be positive")
    lags = np.arange(1, max_lag + average_over, dtype=float)
    terms = 2.0 * autocovariance(params, lags) * np.cos(lags * lam)
    partial = autocovariance(params, 0) + np.cumsum(terms)
    window = partial[max_lag - 1:max_lag - 1 + average_over]
    return float(window.mean() / (2.0 * np.pi))

def whittle_population_contrast(H0: float, h: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """(1/2pi) int g_{H0} / g_h, minimized at h = H0"""
    cfg = _resolve(spectral_config)
    nodes, weights = quadrature_rule(cfg.quadrature_points)
    g0 = 1.0 / _inverse_density_on(clamp_hurst(H0), nodes, cfg)
    return integrate_even(g0 * _inverse_density_on(clamp_hurst(h), nodes, cfg), weights) / (2.0 * np.pi)

# ---------------------------------------------------------------------------
# Scale maps

def scale_factor(H: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """mu(H) = a_H / kappa(H), so that C^2 = mu(H) sigma^2"""
    return log_normalizer(H, spectral_config) / density_constant(clamp_hurst(H))

def scale_maps(H: float, sigma2: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """C = (mu(H) sigma^2)^{1/2}"""
    if not (math.isfinite(sigma2) and sigma2 > 0):
        raise DomainError(f"sigma^2 must be positive, got {sigma2}")
    return math.sqrt(scale_factor(H, spectral_config) * sigma2)

def sigma_of(H: float, C: float, spectral_config: Optional[SpectralConfig] = None) -> float:
    """Inverse of scale_maps: sigma^2 = C^2 / mu(H)"""
    if not (math.isfinite(C) and C > 0):
        raise DomainError(f"C must be positive, got {C}")
    return C * C / scale_factor(H, spectral_config)

# ---------------------------------------------------------------------------
# Limit-theorem constants

def rosenblatt_constant(H: float) -> float:
    """c_Z(H) = (2H(2H - 1))^{1/2} / B(1 - H, H/2), making E Z_1^2 = C^2"""
    if not (math.isfinite(H) and 0.5 < H < 1.0):
        raise DomainError(f"H must lie strictly inside (1/2, 1), got {H}")
    return math.sqrt(2.0 * H * (2.0 * H - 1.0)) / special.beta(1.0 - H, 0.5 * H)

def _richardson(values_h: np.ndarray, values_half: np.ndarray) -> np.ndarray:
    return (4.0 * values_half - values_h) / 3.0

def _second_difference(H: float, step: float, lam: np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    return (_inverse_density_on(H + step, lam, cfg) - 2.0 * _inverse_density_on(H, lam, cfg)
            + _inverse_density_on(H - step, lam, cfg)) / (step * step)

def _mu_unchecked(H: float, cfg: SpectralConfig) -> float:
    return log_normalizer_unchecked(H, cfg.truncation_order, cfg.quadrature_points) / density_constant(H)

def limit_constants(H: float, spectral_config: Optional[SpectralConfig] = None) -> LimitConstants:
    """
    gamma(H) and rho(H) of the N^{1-H} limit laws, by quadrature

    The second H-derivative of 1/g_H is a central difference with one
    Richardson step. Both printed variants of gamma are returned: the
    theorem's (1+H)^2 and the chaos-term proposition's (1-H)^2.

    Raises:
        DerivativeInstabilityError: the Richardson estimate of the curvature
            integral differs from the half-step estimate by more than 1e-3
    """
    cfg = _resolve(spectral_config)
    H = clamp_hurst(H)
    # stencil must stay inside [1/2, 1]
    step = min(cfg.fd_step, 0.5 * (1.0 - H), 0.5 * (H - 0.5))
    nodes, weights = quadrature_rule(cfg.quadrature_points)

    inverse_g = _inverse_density_on(H, nodes, cfg)
    H_mid = 0.5 * (H + 1.0)
    f_mid = density_constant(H_mid) * _shape(H_mid, nodes, cfg.truncation_order)
    f_unit = density_constant(H) * _shape(H, nodes, cfg.truncation_order)
    mid_integral = integrate_even(f_mid * inverse_g, weights)

    coarse = _second_difference(H, step, nodes, cfg)
    fine = _second_difference(H, 0.5 * step, nodes, cfg)
    curvature = integrate_even(f_unit * _richardson(coarse, fine), weights)
    curvature_fine = integrate_even(f_unit * fine, weights)
    disagreement = abs(curvature - curvature_fine) / abs(curvature)
    if not math.isfinite(disagreement) or disagreement > RICHARDSON_TOLERANCE:
        raise DerivativeInstabilityError(
            f"curvature integral unstable at H={H}: relative Richardson disagreement {disagreement:.3e}")

    root = 2.0 * (2.0 * H - 1.0) / H
    gamma_theorem = 16.0 * np.pi * math.sqrt(root / (1.0 + H) ** 2) * mid_integral / curvature
    gamma_proposition = 16.0 * np.pi * math.sqrt(root / (1.0 - H) ** 2) * mid_integral / curvature
    beta = math.sqrt(root / (1.0 - H) ** 2) * mid_integral

    mu = _mu_unchecked(H, cfg)
    d_coarse = (_mu_unchecked(H + step, cfg) - _mu_unchecked(H - step, cfg)) / (2.0 * step)
    d_fine = (_mu_unchecked(H + 0.5 * step, cfg) - _mu_unchecked(H - 0.5 * step, cfg)) / step
    mu_prime = float(_richardson(np.asarray(d_coarse), np.asarray(d_fine)))

    def _rho(gamma: float) -> float:
        return (mu_prime ** 2 * gamma + 4.0 / np.pi * beta * mu ** 2) / (4.0 * mu)

    constants = LimitConstants(
        H=H,
        gamma_theorem=float(gamma_theorem),
        gamma_proposition=float(gamma_proposition),
        beta=float(beta),
        mu=float(mu),
        mu_prime=mu_prime,
        rho_theorem=float(_rho(gamma_theorem)),
        rho_proposition=float(_rho(gamma_proposition)),
        contrast_curvature=float(curvature),
        richardson_disagreement=float(disagreement),
    )
    framework_logger.debug(f"Limit constants at H={H}: {constants}")
    return constants

# ---------------------------------------------------------------------------
# Tables

def spectral_table(H: float, C: float = 1.0, n_points: int = 256,
                   spectral_config: Optional[SpectralConfig] = None) -> pd.DataFrame:
    """(lambda, f, g) on lambda_k = pi k / n_points, k = 1..n_points"""
    if n_points < 1:
        raise DomainError(f"n_points must be positive, got {n_points}")
    model = SpectralModel(LongMemoryParams(H, C), spectral_config)
    lam = np.pi * np.arange(1, n_points + 1) / n_points
    return pd.DataFrame({
        "lambda": lam,
        "f": model.density(lam),
        "g": model.normalized(lam),
    })
