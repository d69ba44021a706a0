"""
Pytest configuration and fixtures for the Whittle estimation toolkit
"""
import math
import pytest
import numpy as np
from typing import Any, Dict, List, Optional, Sequence
from config.config import McConfig, SpectralConfig, config
from longmemory.experiments import CellStats, McReport
from longmemory.simulate import SeedSpec, simulate_fgn, simulate_rosenblatt_increments
from utils.logger import framework_logger

TEST_SEED = 20240607

@pytest.fixture(scope="session")
def spectral_config():
    """Default spectral knobs (K=200, Q=64, fd_step=1e-3)"""
    return SpectralConfig()

@pytest.fixture(scope="session")
def fgn_series():
    """Exact fGn, H=0.7, N=4096"""
    framework_logger.info("Simulating session fGn series")
    return simulate_fgn(0.7, 4096, SeedSpec(TEST_SEED, 0))

@pytest.fixture(scope="session")
def rosenblatt_series():
    """Rosenblatt increments, H=0.7, N=10^4, n_inner=256"""
    framework_logger.info("Simulating session Rosenblatt series")
    return simulate_rosenblatt_increments(0.7, 10_000, SeedSpec(TEST_SEED, 0), n_inner=256)

@pytest.fixture(scope="function")
def white_noise():
    """Gaussian white noise of length 512"""
    return np.random.default_rng(TEST_SEED).standard_normal(512)

@pytest.fixture(scope="session")
def mc_workers(request):
    """Worker count for Monte Carlo tests (--mc-workers or WHITTLE_MC_WORKERS)"""
    workers = request.config.getoption("--mc-workers", default=None)
    return int(workers) if workers else config.monte_carlo.workers

def pytest_addoption(parser):
    """Add custom command line options"""
    parser.addoption(
        "--mc-workers",
        action="store",
        default=None,
        help="Worker processes for the slow Monte Carlo acceptance tests (e.g., --mc-workers=8)"
    )

# Helper functions for tests
def make_cell(process: str, H: float, N: int, estimator: str, estimates: Sequence[float]) -> CellStats:
    """CellStats with the statistics the harness would compute from estimates"""
    values = np.asarray(estimates, dtype=float)
    return CellStats(
        process=process,
        H=H,
        N=N,
        estimator=estimator,
        replications=values.size,
        n_ok=values.size,
        mean=float(values.mean()),
        std=float(values.std(ddof=1)),
        bias=float(values.mean() - H),
        rmse=float(np.sqrt(np.mean((values - H) ** 2))),
        skewness=0.0,
        estimates=[float(v) for v in values],
    )

def make_report(cells: List[CellStats], process: Optional[str] = None) -> McReport:
    """McReport around hand-built cells"""
    process = process or cells[0].process
    mc_config = McConfig(
        process=process,
        H_list=sorted({cell.H for cell in cells}),
        N_list=sorted({cell.N for cell in cells}),
        replications=max(max(cell.replications for cell in cells), 2),
        estimators=sorted({cell.estimator for cell in cells}),
    )
    return McReport(mc_config=mc_config, spectral=SpectralConfig().model_dump(), cells=cells)

# Custom assertion helpers
def assert_close(actual: float, expected: float, rel: float = 0.0, abs_tol: float = 0.0, what: str = "value"):
    """Assert |actual - expected| <= max(rel * |expected|, abs_tol)"""
    bound = max(rel * abs(expected), abs_tol)
    if not abs(actual - expected) <= bound:
        pytest.fail(f"{what}: got {actual!r}, expected {expected!r} within {bound:g}")

def assert_within(value: float, lower: float, upper: float, what: str = "value"):
    """Assert lower <= value <= upper"""
    if not lower <= value <= upper:
        pytest.fail(f"{what}={value!r} outside [{lower}, {upper}]")

def assert_cell_complete(cell: CellStats, replications: int):
    """Assert a Monte Carlo cell has every replication and consistent statistics"""
    if cell.partial or cell.n_ok != replications or len(cell.estimates) != replications:
        pytest.fail(f"cell (H={cell.H}, N={cell.N}, {cell.estimator}) incomplete: "
                    f"{cell.n_ok}/{replications} ok, errors={cell.errors[:3]}")
    n = cell.n_ok
    expected = cell.bias ** 2 + cell.std ** 2 * (n - 1) / n
    if not math.isclose(cell.rmse ** 2, expected, rel_tol=1e-9, abs_tol=1e-15):
        pytest.fail(f"RMSE^2={cell.rmse ** 2!r} differs from bias^2 + std^2 (n-1)/n = {expected!r}")

def record_summary(cell: CellStats) -> Dict[str, Any]:
    """Compact dict used in failure messages"""
    return {"H": cell.H, "N": cell.N, "estimator": cell.estimator, "mean": cell.mean, "std": cell.std}
