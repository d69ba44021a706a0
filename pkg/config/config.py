"""
Configuration management for the Whittle estimation toolkit
"""
import os
from pathlib import Path
from typing import Dict, Any, List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator
from dotenv import load_dotenv, dotenv_values

# Load environment variables
load_dotenv()

PRESET_DIR = Path(__file__).parent / "presets"
TOOLKIT_VERSION = "1.0.0"

class SpectralConfig(BaseModel):
    """Numerical knobs of the spectral model (lattice truncation, quadrature, finite differences)"""
    model_config = ConfigDict(frozen=True)

    truncation_order: int = Field(default=200, ge=10)
    quadrature_points: int = Field(default=64, ge=64)
    fd_step: float = Field(default=1e-3, gt=0.0, lt=0.01)

class SimulationConfig(BaseModel):
    """Path simulator defaults"""
    n_inner: int = Field(default=256, ge=64)
    variance_deficit: float = 1e-3
    max_truncation: int = 2 ** 20
    master_seed: int = 20240101
    farima_method: str = "circulant"

class EstimationConfig(BaseModel):
    """Estimator search defaults"""
    grid_step: float = 0.01
    eps: float = 1e-3
    tol: float = 1e-5
    lw_exponent: float = 0.65

class MonteCarloConfig(BaseModel):
    """Monte Carlo harness defaults"""
    replications: int = 100
    workers: int = 1
    kde_grid_size: int = 512

class PathConfig(BaseModel):
    """Output path configuration model"""
    output_dir: str = "reports"
    log_file: Optional[str] = None

class McConfig(BaseModel):
    """One Monte Carlo run: every (process, H, N, estimator) cell it spans"""
    process: str = "rosenblatt"
    H_list: List[float] = [0.55, 0.65, 0.75, 0.85, 0.95]
    N_list: List[int] = [1000, 5000]
    replications: int = 100
    n_inner: int = 256
    C: float = 1.0
    estimators: List[str] = ["whittle", "lw"]
    master_seed: int = 20240101

    @field_validator("process")
    @classmethod
    def _check_process(cls, value: str) -> str:
        if value not in ("rosenblatt", "fgn"):
            raise ValueError(f"process must be 'rosenblatt' or 'fgn', got {value!r}")
        return value

    @field_validator("H_list")
    @classmethod
    def _check_hurst(cls, value: List[float]) -> List[float]:
        if not value or any(not 0.5 < h < 1.0 for h in value):
            raise ValueError(f"every H must lie in (1/2, 1), got {value}")
        return value

    @field_validator("N_list")
    @classmethod
    def _check_lengths(cls, value: List[int]) -> List[int]:
        if not value or any(n < 64 for n in value):
            raise ValueError(f"every N must be >= 64, got {value}")
        return value

    @field_validator("replications")
    @classmethod
    def _check_replications(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"replications must be >= 2, got {value}")
        return value

    @field_validator("estimators")
    @classmethod
    def _check_estimators(cls, value: List[str]) -> List[str]:
        unknown = set(value) - {"whittle", "lw"}
        if not value or unknown:
            raise ValueError(f"estimators must be a non-empty subset of {{whittle, lw}}, got {value}")
        return value

    @field_validator("C")
    @classmethod
    def _check_scale(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"C must be positive, got {value}")
        return value

    @field_validator("master_seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if not 0 <= value < 2 ** 64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {value}")
        return value

    @classmethod
    def from_file(cls, path: str) -> "McConfig":
        """
        Load a run from a flat key-value file

        Recognized keys: process, h_list, n_list, reps, n_inner, c,
        estimators, seed. Lists are comma separated.
        """
        values = dotenv_values(path)
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: Dict[str, Optional[str]]) -> "McConfig":
        """Build a run from the flat string mapping of a run file"""
        known = {"process", "h_list", "n_list", "reps", "n_inner", "c", "estimators", "seed", "workers"}
        values = {key.strip().lower(): val for key, val in values.items()}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown run-file keys: {sorted(unknown)}")

        def _split(raw: Optional[str]) -> List[str]:
            return [item.strip() for item in (raw or "").split(",") if item.strip()]

        fields: Dict[str, Any] = {}
        if values.get("process"):
            fields["process"] = values["process"].strip()
        if values.get("h_list"):
            fields["H_list"] = [float(item) for item in _split(values["h_list"])]
        if values.get("n_list"):
            fields["N_list"] = [int(item) for item in _split(values["n_list"])]
        if values.get("reps"):
            fields["replications"] = int(values["reps"])
        if values.get("n_inner"):
            fields["n_inner"] = int(values["n_inner"])
        if values.get("c"):
            fields["C"] = float(values["c"])
        if values.get("estimators"):
            fields["estimators"] = _split(values["estimators"])
        if values.get("seed"):
            fields["master_seed"] = int(values["seed"])
        return cls(**fields)

    @classmethod
    def preset(cls, name: str) -> "McConfig":
        """Load one of the shipped presets (table1, figure1, fbm)"""
        path = PRESET_DIR / f"{name}.cfg"
        if not path.exists():
            raise ValueError(f"unknown preset {name!r}; available: {sorted(p.stem for p in PRESET_DIR.glob('*.cfg'))}")
        return cls.from_file(str(path))

def run_file_workers(path: str) -> Optional[int]:
    """Worker count requested by a run file, if any (kept out of McConfig so reports do not depend on it)"""
    raw = dotenv_values(path).get("workers")
    return int(raw) if raw else None

class Config:
    """Main configuration class"""

    def __init__(self):
        self.spectral = SpectralConfig()
        self.simulation = SimulationConfig()
        self.estimation = EstimationConfig()
        self.monte_carlo = MonteCarloConfig()
        self.paths = PathConfig()
        self.log_level = "INFO"

        # Override with environment variables if available
        self._load_env_overrides()

    def _load_env_overrides(self):
        """Load configuration overrides from environment variables"""
        if os.getenv("WHITTLE_MC_WORKERS"):
            self.monte_carlo.workers = int(os.getenv("WHITTLE_MC_WORKERS"))
        if os.getenv("WHITTLE_MASTER_SEED"):
            self.simulation.master_seed = int(os.getenv("WHITTLE_MASTER_SEED"))

        # Path overrides
        if os.getenv("WHITTLE_OUTPUT_DIR"):
            self.paths.output_dir = os.getenv("WHITTLE_OUTPUT_DIR")
        if os.getenv("WHITTLE_LOG_FILE"):
            self.paths.log_file = os.getenv("WHITTLE_LOG_FILE")
        if os.getenv("WHITTLE_LOG_LEVEL"):
            self.log_level = os.getenv("WHITTLE_LOG_LEVEL").upper()

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return {
            "spectral": self.spectral.model_dump(),
            "simulation": self.simulation.model_dump(),
            "estimation": self.estimation.model_dump(),
            "monte_carlo": self.monte_carlo.model_dump(),
            "paths": self.paths.model_dump(),
            "log_level": self.log_level
        }

# Global configuration instance
config = Config()
