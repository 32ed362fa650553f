"""
config.py
=========
Toolkit configuration: truncation policy, grids, tolerances.
Defaults -> config/toolkit_config.json -> environment (.env via python-dotenv).
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import List

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)

_REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Fundamental-domain-adjacent sample points, as "a+bi" literals
DEFAULT_TAU_GRID = [
    "1.2i", "0.3+1.2i", "-0.25+0.9i", "0.35+1.05i", "-0.4+0.8i",
    "0.1+1.5i", "0.45+0.95i", "-0.15+1.1i", "0.2+0.85i", "-0.3+1.3i",
    "1.7i", "0.05+0.75i", "-0.45+1.6i", "0.25+2.0i", "-0.1+0.7i",
    "0.4+1.4i", "-0.35+1.0i", "0.15+1.25i", "-0.2+2.5i", "0.3+0.8i",
]

# Spans 0.05 <= Im tau <= 10 and |Re tau| <= 1, down to the convergence guard
DEFAULT_THETA_GRID = [
    "0.05i", "10i", "1+0.05i", "-0.3+0.07i", "0.6+0.1i",
    "-1+0.15i", "0.25+0.25i", "-0.8+0.4i", "0.9+0.6i", "1.0i",
    "-0.55+0.85i", "0.15+1.3i", "-0.2+1.9i", "0.7+2.6i", "-1+3.5i",
    "0.4+4.5i", "-0.65+5.5i", "0.85+6.5i", "-0.1+8i", "1+9.2i",
]

# Off the imaginary axis, where the Chudnovsky 2F1 argument leaves the real cut
DEFAULT_CHUD_GRID = [
    "0.35+1.05i", "-0.4+0.8i", "0.2+0.9i", "-0.25+1.2i", "0.45+1.3i", "0.15+0.75i",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """Series truncation and guard parameters"""
    term_tol: float = 1e-17
    max_terms: int = 64
    min_im_tau: float = 0.05
    hyper_max_terms: int = 600

    def __post_init__(self):
        if not self.term_tol > 0:
            raise ValueError(f"term_tol must be positive, got {self.term_tol}")
        if self.max_terms < 4 or self.hyper_max_terms < 4:
            raise ValueError("term budgets must be at least 4")
        if not self.min_im_tau > 0:
            raise ValueError(f"min_im_tau must be positive, got {self.min_im_tau}")

    def doubled(self) -> "TruncationPolicy":
        """Same policy with twice the term budgets"""
        return TruncationPolicy(self.term_tol, 2 * self.max_terms,
                                self.min_im_tau, 2 * self.hyper_max_terms)


@dataclass
class ToolkitConfig:
    """Toolkit Configuration"""
    version: str = "0.2.0"
    term_tol: float = 1e-17
    max_terms: int = 64
    hyper_max_terms: int = 600
    min_im_tau: float = 0.05
    default_tol: float = 1e-7
    workers: int = 1
    run_log_file: str = "memory/run_log.json"
    tau_grid: List[str] = field(default_factory=lambda: list(DEFAULT_TAU_GRID))
    theta_grid: List[str] = field(default_factory=lambda: list(DEFAULT_THETA_GRID))
    chud_grid: List[str] = field(default_factory=lambda: list(DEFAULT_CHUD_GRID))
    calibration_points: int = 3
    config_path: str = os.path.join(_REPO_ROOT, "config", "toolkit_config.json")

    def __post_init__(self):
        if os.path.exists(self.config_path):
            self._load_from_file()
        self._load_from_env()

    def _load_from_file(self):
        """Load configuration from file"""
        try:
            with open(self.config_path, 'r') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"⚠ Config load error: {e}, using defaults")
            return
        for key in ("version", "term_tol", "max_terms", "hyper_max_terms", "min_im_tau",
                    "default_tol", "workers", "run_log_file", "tau_grid", "theta_grid", "chud_grid",
                    "calibration_points"):
            if key in data:
                setattr(self, key, data[key])

    def _load_from_env(self):
        """Environment overrides (PVI_*)"""
        overrides = {
            "PVI_TERM_TOL": ("term_tol", float),
            "PVI_MAX_TERMS": ("max_terms", int),
            "PVI_MIN_IM_TAU": ("min_im_tau", float),
            "PVI_WORKERS": ("workers", int),
            "PVI_RUN_LOG": ("run_log_file", str),
        }
        for env_name, (attr, cast) in overrides.items():
            raw = os.environ.get(env_name)
            if raw is None:
                continue
            try:
                setattr(self, attr, cast(raw))
            except ValueError:
                logger.warning(f"⚠ Ignoring invalid {env_name}={raw!r}")

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(term_tol=float(self.term_tol), max_terms=int(self.max_terms),
                                min_im_tau=float(self.min_im_tau),
                                hyper_max_terms=int(self.hyper_max_terms))

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "term_tol": self.term_tol,
            "max_terms": self.max_terms,
            "hyper_max_terms": self.hyper_max_terms,
            "min_im_tau": self.min_im_tau,
            "default_tol": self.default_tol,
            "workers": self.workers,
            "run_log_file": self.run_log_file,
            "tau_grid": self.tau_grid,
            "theta_grid": self.theta_grid,
            "chud_grid": self.chud_grid,
            "calibration_points": self.calibration_points,
        }
