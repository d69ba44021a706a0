"""
Path generators: FARIMA(0,d,0) noise, fractional Gaussian noise and
Rosenblatt-process increments from normalized Hermite-rank-2 block sums
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional
import numpy as np
from scipy import fft, linalg, signal, special
from config.config import config
from longmemory.errors import DomainError, EmbeddingError, TruncationError
from longmemory.spectral import covariogram
from utils.logger import framework_logger

CHOLESKY_LIMIT = 2048
EMBEDDING_TOLERANCE = 1e-10

@dataclass(frozen=True)
class SeedSpec:
    """(master_seed, stream_index) fully determine every generated sample"""
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2 ** 64:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.stream_index < 0:
            raise DomainError(f"stream_index must be nonnegative, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        """Counter-based Philox stream keyed by (master_seed, stream_index); draws are indexed by position"""
        sequence = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(sequence))

    def to_dict(self) -> Dict[str, int]:
        return {"master_seed": self.master_seed, "stream_index": self.stream_index}

@dataclass
class SeriesMeta:
    """Provenance of a generated or loaded series"""
    process: str
    H: Optional[float] = None
    C: Optional[float] = None
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[SeedSpec] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "process": self.process,
            "H": self.H,
            "C": self.C,
            "params": dict(self.params),
            "seed": self.seed.to_dict() if self.seed else None
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SeriesMeta":
        seed = data.get("seed")
        return cls(
            process=data.get("process", "unknown"),
            H=data.get("H"),
            C=data.get("C"),
            params=dict(data.get("params") or {}),
            seed=SeedSpec(**seed) if seed else None
        )

@dataclass
class TimeSeries:
    """Finite sample path of increments"""
    values: np.ndarray
    meta: SeriesMeta = field(default_factory=lambda: SeriesMeta(process="unknown"))

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise DomainError(f"a series needs at least 2 values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("series values must be finite")

    def __len__(self) -> int:
        return self.values.size

    def scaled(self, factor: float, shift: float = 0.0) -> "TimeSeries":
        """factor * Y + shift, keeping provenance"""
        return TimeSeries(factor * self.values + shift, self.meta)

# ---------------------------------------------------------------------------
# FARIMA(0, d, 0)

def _check_memory(d: float):
    if not (math.isfinite(d) and 0.0 < d < 0.5):
        raise DomainError(f"memory parameter d must lie in (0, 1/2), got {d}")

def farima_ma_coefficients(d: float, m: int) -> np.ndarray:
    """psi_0..psi_m of (1 - B)^{-d}: psi_0 = 1, psi_j = psi_{j-1} (j - 1 + d) / j"""
    _check_memory(d)
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    j = np.arange(1, m + 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod((j - 1.0 + d) / j)))

def farima_autocorrelation(d: float, max_lag: int) -> np.ndarray:
    """rho_d(0..max_lag) = Gamma(k+d)Gamma(1-d) / (Gamma(k-d+1)Gamma(d)), by its ratio recursion"""
    _check_memory(d)
    k = np.arange(1, max_lag + 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod((k - 1.0 + d) / (k - d))))

def farima_variance(d: float) -> float:
    """sum_j psi_j^2 = Gamma(1 - 2d) / Gamma(1 - d)^2"""
    _check_memory(d)
    return math.exp(special.gammaln(1.0 - 2.0 * d) - 2.0 * special.gammaln(1.0 - d))

def _variance_deficit(d: float, psi: np.ndarray) -> np.ndarray:
    """Relative deficit sum_{j > m} psi_j^2 / total, for every m in 0..len(psi)-1"""
    total = farima_variance(d)
    return (total - np.cumsum(psi ** 2)) / total

def farima_truncation_length(d: float, deficit: Optional[float] = None, cap: Optional[int] = None) -> int:
    """
    Smallest m with sum_{j > m} psi_j^2 < deficit * total

    Raises:
        TruncationError: no m up to the cap meets the bound
    """
    deficit = config.simulation.variance_deficit if deficit is None else deficit
    cap = config.simulation.max_truncation if cap is None else cap
    shortfall = _variance_deficit(d, farima_ma_coefficients(d, cap))
    hits = np.flatnonzero(shortfall < deficit)
    if hits.size == 0:
        raise TruncationError(
            f"FARIMA(0,{d},0): variance deficit {shortfall[-1]:.3e} at the cap m={cap} exceeds {deficit:g}")
    framework_logger.debug(f"FARIMA truncation for d={d}: m={int(hits[0])}")
    return int(hits[0])

def _circulant_gaussian(acov: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Stationary Gaussian sample of length n = len(acov) - 1 with the given autocovariance

    Circulant embedding of size 2n; falls back to a Cholesky factor for
    n <= CHOLESKY_LIMIT when the embedding has negative eigenvalues.

    Raises:
        EmbeddingError: negative eigenvalues and n too large for Cholesky
    """
    n = acov.size - 1
    row = np.concatenate([acov, acov[-2:0:-1]])
    eigenvalues = fft.fft(row).real
    if eigenvalues.min() < -EMBEDDING_TOLERANCE * eigenvalues.max():
        if n > CHOLESKY_LIMIT:
            raise EmbeddingError(
                f"circulant embedding not nonnegative (min eigenvalue {eigenvalues.min():.3e}) "
                f"and n={n} exceeds the Cholesky limit {CHOLESKY_LIMIT}")
        framework_logger.warning(f"Circulant embedding failed at n={n}; using Cholesky factorization")
        factor = linalg.cholesky(linalg.toeplitz(acov[:n]), lower=True)
        return factor @ rng.standard_normal(n)
    size = row.size
    noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    path = fft.fft(np.sqrt(np.clip(eigenvalues, 0.0, None) / size) * noise)
    return path.real[:n].copy()

def simulate_farima(d: float, N: int, seed: SeedSpec, m: Optional[int] = None, method: str = "ma") -> TimeSeries:
    """
    Unit-variance FARIMA(0, d, 0) noise X_1..X_N

    method="ma": X_t = s^{-1} sum_{j<=m} psi_j eps_{t-j} with s^2 = sum_{j<=m} psi_j^2,
    m defaulting to the smallest admissible truncation.
    method="circulant": exact circulant embedding of rho_d.

    Raises:
        TruncationError: the given m violates the variance-deficit bound
    """
    _check_memory(d)
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    rng = seed.generator()
    if method == "ma":
        if m is None:
            m = farima_truncation_length(d)
        psi = farima_ma_coefficients(d, m)
        shortfall = _variance_deficit(d, psi)[-1]
        if shortfall >= config.simulation.variance_deficit:
            raise TruncationError(
                f"FARIMA(0,{d},0): m={m} leaves variance deficit {shortfall:.3e} "
                f">= {config.simulation.variance_deficit:g}")
        innovations = rng.standard_normal(N + m)
        values = signal.fftconvolve(innovations, psi, mode="valid") / math.sqrt(float(np.sum(psi ** 2)))
        params = {"d": d, "N": N, "m": m, "method": method}
    elif method == "circulant":
        values = _circulant_gaussian(farima_autocorrelation(d, N), rng)
        params = {"d": d, "N": N, "method": method}
    else:
        raise DomainError(f"unknown FARIMA method {method!r}; use 'ma' or 'circulant'")
    return TimeSeries(values, SeriesMeta(process="farima", params=params, seed=seed))

# ---------------------------------------------------------------------------
# Fractional Gaussian noise

def simulate_fgn(H: float, N: int, seed: SeedSpec, C: float = 1.0) -> TimeSeries:
    """Exact fGn with autocovariance r_{H,C}, by circulant embedding (Cholesky fallback for small N)"""
    if not (math.isfinite(H) and 0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0, 1), got {H}")
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    if C <= 0:
        raise DomainError(f"C must be positive, got {C}")
    acov = covariogram(H, np.arange(N + 1), C)
    values = _circulant_gaussian(acov, seed.generator())
    return TimeSeries(values, SeriesMeta(process="fgn", H=H, C=C, params={"N": N}, seed=seed))

# ---------------------------------------------------------------------------
# Rosenblatt increments

def hermite_block_variance(d: float, n_inner: int) -> float:
    """Var sum_{i=1}^{n} (X_i^2 - 1) = 2 sum_{|k|<n} (n - |k|) rho_d(k)^2"""
    rho = farima_autocorrelation(d, n_inner - 1)
    weights = n_inner - np.arange(n_inner, dtype=float)
    return 2.0 * (weights[0] * rho[0] ** 2 + 2.0 * float(np.dot(weights[1:], rho[1:] ** 2)))

def simulate_rosenblatt_increments(H: float, N: int, seed: SeedSpec, n_inner: Optional[int] = None,
                                   C: float = 1.0, farima_method: Optional[str] = None) -> TimeSeries:
    """
    Increments Y_0..Y_{N-1} of a pre-limit Rosenblatt process

    Y_j = C sigma_n^{-1} n^{-H} sum_{i in block j} (X_i^2 - 1) over one
    continuous FARIMA(0, H/2, 0) stream of length N * n, with sigma_n the
    exact block standard deviation, so that Var Y_j = C^2.
    """
    if not (math.isfinite(H) and 0.5 < H < 1.0):
        raise DomainError(f"H must lie strictly inside (1/2, 1), got {H}")
    n_inner = config.simulation.n_inner if n_inner is None else n_inner
    farima_method = config.simulation.farima_method if farima_method is None else farima_method
    if n_inner < 64:
        raise DomainError(f"n_inner must be at least 64, got {n_inner}")
    if C <= 0:
        raise DomainError(f"C must be positive, got {C}")
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")

    d = 0.5 * H
    gaussian = simulate_farima(d, N * n_inner, seed, method=farima_method).values
    blocks = (gaussian ** 2 - 1.0).reshape(N, n_inner).sum(axis=1)
    # n^{-H} cancels against sigma_n = n^{-H} sqrt(block variance)
    values = C * blocks / math.sqrt(hermite_block_variance(d, n_inner))
    params = {"N": N, "n_inner": n_inner, "d": d, "farima_method": farima_method}
    return TimeSeries(values, SeriesMeta(process="rosenblatt", H=H, C=C, params=params, seed=seed))

def simulate_process(process: str, H: float, N: int, seed: SeedSpec, C: float = 1.0,
                     n_inner: Optional[int] = None) -> TimeSeries:
    """Dispatch on process kind ('rosenblatt' or 'fgn')"""
    if process == "rosenblatt":
        return simulate_rosenblatt_increments(H, N, seed, n_inner=n_inner, C=C)
    if process == "fgn":
        return simulate_fgn(H, N, seed, C=C)
    raise DomainError(f"unknown process {process!r}; use 'rosenblatt' or 'fgn'")
