"""
Monte Carlo harness: replicated fits, mean/std summary tables, kernel
density estimates of H_hat and rate diagnostics
"""
import math
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, Field
from scipy import integrate, signal, stats
from config.config import McConfig, SpectralConfig, TOOLKIT_VERSION, config
from longmemory.errors import DegenerateSeriesError, DomainError, LongMemoryError
from longmemory.estimators import WhittleOptions, estimate
from longmemory.periodogram import sample_autocov
from longmemory.simulate import SeedSpec, simulate_process
from longmemory.spectral import limit_constants
from utils.logger import framework_logger

class CellStats(BaseModel):
    """Aggregate of one (process, H, N, estimator) cell"""
    process: str
    H: float
    N: int
    estimator: str
    replications: int
    n_ok: int
    mean: Optional[float] = None
    std: Optional[float] = None
    bias: Optional[float] = None
    rmse: Optional[float] = None
    skewness: Optional[float] = None
    boundary_warnings: int = 0
    partial: bool = False
    estimates: List[Optional[float]] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)

class McReport(BaseModel):
    """Every cell of one Monte Carlo run plus the provenance needed to repeat it"""
    mc_config: McConfig
    spectral: Dict[str, Any]
    cells: List[CellStats]
    wall_time: float = 0.0
    version: str = TOOLKIT_VERSION

    def payload(self) -> Dict[str, Any]:
        """Everything but the wall time; identical for identical configs"""
        return self.model_dump(exclude={"wall_time"})

    def cell(self, H: float, N: int, estimator: str) -> CellStats:
        for item in self.cells:
            if math.isclose(item.H, H) and item.N == N and item.estimator == estimator:
                return item
        raise KeyError(f"no cell (H={H}, N={N}, estimator={estimator})")

@dataclass
class KdeEstimate:
    """Gaussian kernel density on a uniform grid"""
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(integrate.trapezoid(self.density, self.grid))

    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.grid, "density": self.density})

# ---------------------------------------------------------------------------
# Replications

def _failure(exc: Exception) -> Dict[str, Any]:
    return {"H_hat": None, "error": f"{type(exc).__name__}: {exc}", "boundary": False}

def _replicate(process: str, H: float, N: int, n_inner: int, C: float, estimators: Sequence[str],
               master_seed: int, replication: int, options: WhittleOptions) -> Dict[str, Dict[str, Any]]:
    """One series, every requested estimator fitted to it"""
    seed = SeedSpec(master_seed, replication)
    try:
        series = simulate_process(process, H, N, seed, C=C, n_inner=n_inner)
    except LongMemoryError as exc:
        return {name: _failure(exc) for name in estimators}

    records = {}
    for name in estimators:
        try:
            fit = estimate(series, name, options)
            records[name] = {
                "H_hat": fit.H_hat,
                "error": None,
                "boundary": any("boundary" in message for message in fit.warnings),
            }
        except LongMemoryError as exc:
            records[name] = _failure(exc)
    return records

def _cell_stats(process: str, H: float, N: int, estimator: str,
                records: List[Dict[str, Any]]) -> CellStats:
    estimates = [record["H_hat"] for record in records]
    errors = [f"replication {i}: {record['error']}" for i, record in enumerate(records) if record["error"]]
    ok = np.array([value for value in estimates if value is not None], dtype=float)
    cell = CellStats(
        process=process,
        H=H,
        N=N,
        estimator=estimator,
        replications=len(records),
        n_ok=int(ok.size),
        boundary_warnings=sum(1 for record in records if record["boundary"]),
        partial=bool(errors),
        estimates=estimates,
        errors=errors,
    )
    if ok.size >= 2:
        cell.mean = float(np.mean(ok))
        cell.std = float(np.std(ok, ddof=1))
        cell.bias = cell.mean - H
        cell.rmse = float(np.sqrt(np.mean((ok - H) ** 2)))
        cell.skewness = float(stats.skew(ok)) if np.ptp(ok) > 0 else 0.0
    if errors:
        framework_logger.warning(f"Cell ({process}, H={H}, N={N}, {estimator}) is partial: "
                                 f"{len(errors)} of {len(records)} replications failed")
    return cell

def run_monte_carlo(mc_config: McConfig, workers: Optional[int] = None,
                    spectral_config: Optional[SpectralConfig] = None,
                    options: Optional[WhittleOptions] = None) -> McReport:
    """
    Simulate and fit every (H, N) cell of mc_config

    Replication r of every cell uses stream SeedSpec(master_seed, r), and
    results are reduced in replication order, so the report does not
    depend on the worker count.

    Args:
        mc_config: the run
        workers: joblib worker count (defaults to config.monte_carlo.workers)
        spectral_config: spectral knobs for the Whittle contrast
        options: estimator search settings

    Returns:
        McReport with one CellStats per (H, N, estimator)
    """
    workers = config.monte_carlo.workers if workers is None else workers
    spectral_config = spectral_config or config.spectral
    if options is None:
        options = WhittleOptions(spectral_config=spectral_config, keep_profile=False)
    started = time.perf_counter()
    framework_logger.info(f"Monte Carlo run: process={mc_config.process} H={mc_config.H_list} "
                          f"N={mc_config.N_list} reps={mc_config.replications} workers={workers}")

    cells = []
    try:
        for H in mc_config.H_list:
            for N in mc_config.N_list:
                framework_logger.info(f"Cell ({mc_config.process}, H={H}, N={N})")
                results = Parallel(n_jobs=workers)(
                    delayed(_replicate)(mc_config.process, H, N, mc_config.n_inner, mc_config.C,
                                        mc_config.estimators, mc_config.master_seed, replication, options)
                    for replication in range(mc_config.replications)
                )
                for name in mc_config.estimators:
                    cells.append(_cell_stats(mc_config.process, H, N, name, [result[name] for result in results]))
    except Exception as e:
        framework_logger.error(f"Monte Carlo run aborted: {str(e)}")
        raise

    report = McReport(
        mc_config=mc_config,
        spectral=spectral_config.model_dump(),
        cells=cells,
        wall_time=time.perf_counter() - started,
    )
    framework_logger.info(f"Monte Carlo run finished in {report.wall_time:.1f}s ({len(cells)} cells)")
    return report

# ---------------------------------------------------------------------------
# Tables

def summarize_report(report: McReport) -> pd.DataFrame:
    """One column per H; rows (process, N, estimator, statistic) with statistic in {mean, std}"""
    rows = []
    for cell in report.cells:
        for statistic in ("mean", "std"):
            rows.append({
                "process": cell.process,
                "N": cell.N,
                "estimator": cell.estimator,
                "statistic": statistic,
                "H": cell.H,
                "value": getattr(cell, statistic),
            })
    frame = pd.DataFrame(rows)
    table = frame.pivot(index=["process", "N", "estimator", "statistic"], columns="H", values="value")
    table.columns.name = "H"
    return table

def render_table_text(table: pd.DataFrame, digits: int = 3) -> str:
    """Aligned plain-text rendering of a summary table"""
    return table.to_string(float_format=lambda value: f"{value:.{digits}f}", na_rep="-")

def _rate_exponent(process: str, H: float) -> float:
    return 1.0 - H if process == "rosenblatt" else 0.5

def _gamma_diagnostic(H: float, spectral_config: Optional[SpectralConfig]) -> Tuple[float, float]:
    try:
        constants = limit_constants(H, spectral_config)
        return abs(constants.gamma_theorem), abs(constants.gamma_proposition)
    except LongMemoryError as exc:
        framework_logger.warning(f"Limit constants unavailable at H={H}: {exc}")
        return math.nan, math.nan

def rate_check(report: McReport, spectral_config: Optional[SpectralConfig] = None) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Scaled dispersions and successive-N standard-deviation ratios

    std(H_hat) N^{1-H} for Rosenblatt cells and std(H_hat) N^{1/2} for fGn
    cells; the ratio table compares std(N2)/std(N1) with (N1/N2)^{exponent}.
    |gamma(H)| in both printed variants is attached as a diagnostic for
    Rosenblatt cells.

    Returns:
        (scaled, ratios) data frames
    """
    gammas: Dict[float, Tuple[float, float]] = {}
    scaled_rows = []
    for cell in report.cells:
        if cell.std is None:
            continue
        exponent = _rate_exponent(cell.process, cell.H)
        row = {
            "process": cell.process,
            "H": cell.H,
            "N": cell.N,
            "estimator": cell.estimator,
            "std": cell.std,
            "exponent": exponent,
            "scaled_std": cell.std * cell.N ** exponent,
        }
        if cell.process == "rosenblatt":
            if cell.H not in gammas:
                gammas[cell.H] = _gamma_diagnostic(cell.H, spectral_config)
            row["gamma_theorem_abs"], row["gamma_proposition_abs"] = gammas[cell.H]
        scaled_rows.append(row)
    scaled = pd.DataFrame(scaled_rows)

    ratio_rows = []
    if not scaled.empty:
        for (process, H, estimator), group in scaled.groupby(["process", "H", "estimator"], sort=True):
            group = group.sort_values("N")
            sizes, spreads = group["N"].tolist(), group["std"].tolist()
            exponent = _rate_exponent(process, H)
            for (n1, s1), (n2, s2) in zip(zip(sizes, spreads), zip(sizes[1:], spreads[1:])):
                empirical = s2 / s1
                theoretical = (n1 / n2) ** exponent
                ratio_rows.append({
                    "process": process,
                    "H": H,
                    "estimator": estimator,
                    "N1": n1,
                    "N2": n2,
                    "std_ratio": empirical,
                    "theoretical_ratio": theoretical,
                    "factor": empirical / theoretical,
                })
    ratios = pd.DataFrame(ratio_rows, columns=["process", "H", "estimator", "N1", "N2",
                                               "std_ratio", "theoretical_ratio", "factor"])
    if ratios.empty:
        framework_logger.warning("Rate check needs at least two N values per (process, H, estimator)")
    return scaled, ratios

def gaussian_comparison(rosenblatt: McReport, gaussian: McReport) -> pd.DataFrame:
    """std of H_hat for Rosenblatt against fGn cells at matched (H, N, estimator)"""
    rows = []
    for cell in rosenblatt.cells:
        try:
            other = gaussian.cell(cell.H, cell.N, cell.estimator)
        except KeyError:
            continue
        if cell.std is None or other.std is None:
            continue
        rows.append({
            "H": cell.H,
            "N": cell.N,
            "estimator": cell.estimator,
            "std_rosenblatt": cell.std,
            "std_fgn": other.std,
            "ratio": cell.std / other.std,
        })
    return pd.DataFrame(rows, columns=["H", "N", "estimator", "std_rosenblatt", "std_fgn", "ratio"])

# ---------------------------------------------------------------------------
# Kernel density

def silverman_bandwidth(samples: np.ndarray) -> float:
    """0.9 min(s, IQR / 1.34) n^{-1/5}; s alone when the IQR vanishes"""
    x = np.asarray(samples, dtype=float)
    spread = float(np.std(x, ddof=1))
    iqr = float(stats.iqr(x))
    if iqr > 0:
        spread = min(spread, iqr / 1.34)
    return 0.9 * spread * x.size ** (-0.2)

def kde_silverman(samples: Sequence[float], grid_size: Optional[int] = None) -> KdeEstimate:
    """
    Gaussian kernel density with Silverman bandwidth, by binned FFT convolution

    The grid spans [min - 5h, max + 5h]; the kernel is truncated at 4h and
    normalized on the grid, so the discrete mass is one. When h is below the
    grid resolution the margin is widened to three grid steps, which keeps
    every sample off the half-weighted end points of the trapezoid rule.

    Raises:
        DomainError: fewer than 8 samples or a grid under 16 points
        DegenerateSeriesError: all samples equal
    """
    grid_size = config.monte_carlo.kde_grid_size if grid_size is None else grid_size
    x = np.asarray([value for value in samples if value is not None], dtype=float)
    if x.size < 8:
        raise DomainError(f"KDE needs at least 8 samples, got {x.size}")
    if grid_size < 16:
        raise DomainError(f"grid_size must be at least 16, got {grid_size}")
    if np.ptp(x) == 0:
        raise DegenerateSeriesError("all samples are equal; the bandwidth would be zero")

    h = silverman_bandwidth(x)
    span = float(np.ptp(x))
    margin = 5.0 * h
    if margin < 3.0 * (span + 2.0 * margin) / (grid_size - 1):
        margin = 3.0 * span / (grid_size - 7)
    grid = np.linspace(x.min() - margin, x.max() + margin, grid_size)
    dx = grid[1] - grid[0]
    edges = np.append(grid - 0.5 * dx, grid[-1] + 0.5 * dx)
    counts, _ = np.histogram(x, bins=edges)

    half_width = min(int(math.ceil(4.0 * h / dx)), grid_size - 1)
    offsets = dx * np.arange(-half_width, half_width + 1)
    kernel = np.exp(-0.5 * (offsets / h) ** 2)
    kernel /= kernel.sum() * dx
    density = signal.fftconvolve(counts.astype(float), kernel, mode="same") / x.size
    return KdeEstimate(grid=grid, density=np.clip(density, 0.0, None), bandwidth=h)

# ---------------------------------------------------------------------------
# Inner-resolution study

def _study_replicate(H: float, N: int, n_inner: int, C: float, master_seed: int, replication: int,
                     options: WhittleOptions) -> Tuple[Optional[float], float]:
    series = simulate_process("rosenblatt", H, N, SeedSpec(master_seed, replication), C=C, n_inner=n_inner)
    centered = series.values - series.values.mean()
    lag1 = sample_autocov(centered, 1) / sample_autocov(centered, 0)
    try:
        return estimate(series, "whittle", options).H_hat, lag1
    except LongMemoryError as exc:
        framework_logger.warning(f"n_inner={n_inner} replication {replication}: {exc}")
        return None, lag1

def n_inner_study(H: float, N: int, n_inner_list: Sequence[int], replications: int = 50,
                  master_seed: Optional[int] = None, C: float = 1.0,
                  workers: Optional[int] = None) -> pd.DataFrame:
    """
    Sensitivity of the Rosenblatt generator to its inner resolution

    For each n_inner: mean and std of the Whittle H_hat and the mean lag-1
    sample autocorrelation of Y, next to the target r(1)/r(0) = 2^{2H-1} - 1.
    """
    master_seed = config.simulation.master_seed if master_seed is None else master_seed
    workers = config.monte_carlo.workers if workers is None else workers
    options = WhittleOptions(keep_profile=False)
    rows = []
    for n_inner in n_inner_list:
        framework_logger.info(f"Inner-resolution study: H={H} N={N} n_inner={n_inner}")
        results = Parallel(n_jobs=workers)(
            delayed(_study_replicate)(H, N, n_inner, C, master_seed, replication, options)
            for replication in range(replications)
        )
        fits = np.array([h for h, _ in results if h is not None], dtype=float)
        lags = np.array([lag for _, lag in results], dtype=float)
        rows.append({
            "n_inner": n_inner,
            "mean_H_hat": float(fits.mean()) if fits.size else math.nan,
            "std_H_hat": float(fits.std(ddof=1)) if fits.size > 1 else math.nan,
            "mean_lag1_autocorrelation": float(lags.mean()),
            "target_lag1_autocorrelation": 2.0 ** (2.0 * H - 1.0) - 1.0,
        })
    return pd.DataFrame(rows)
