"""Configuration and settings management."""

import os
import logging
from pathlib import Path
from typing import Dict, Optional, Union

from dotenv import load_dotenv

HARD_MAX_SITES = 14
DEFAULT_MAX_SITES = 12


class ConfigurationError(Exception):
    """Raised when a configuration value is missing or invalid."""
    pass


class Settings:
    """Run-time settings for the library and the command line."""

    def __init__(self):
        """Initialize settings and load from environment."""
        load_dotenv()

        # Worker pool: USCTOPO_THREADS -> logical CPU count
        self.threads = self._read_int("USCTOPO_THREADS", os.cpu_count() or 1)
        if self.threads < 1:
            raise ConfigurationError(
                f"USCTOPO_THREADS must be a positive integer, got {self.threads}."
            )

        self.max_sites = self._read_int("USCTOPO_MAX_SITES", DEFAULT_MAX_SITES)
        if not 1 <= self.max_sites <= HARD_MAX_SITES:
            raise ConfigurationError(
                f"USCTOPO_MAX_SITES must lie in 1..{HARD_MAX_SITES}, got {self.max_sites}. "
                "Dense diagonalization beyond 2^14 states is not supported."
            )

        output_dir_env = os.getenv("USCTOPO_OUTPUT_DIR")
        if output_dir_env:
            self.output_dir = Path(output_dir_env).expanduser()
        else:
            self.output_dir = Path.cwd()

        self.energy_cut = self._read_float("USCTOPO_ENERGY_CUT", 2.0)
        if self.energy_cut <= 0:
            raise ConfigurationError(
                f"USCTOPO_ENERGY_CUT must be positive (units of omega0), got {self.energy_cut}."
            )

        self.log_level = os.getenv("USCTOPO_LOG_LEVEL", "INFO").upper()
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ConfigurationError(f"USCTOPO_LOG_LEVEL is not a logging level: {self.log_level}")

        self.plot_cmap = os.getenv("USCTOPO_PLOT_CMAP", "jet_r")

        self.orthonormality_tol = 1e-10
        self.oracle_tol = 1e-12
        self.classification_tol = 1e-9
        self.degeneracy_tol = 1e-9

    @property
    def tolerances(self) -> Dict[str, float]:
        """Numerical tolerances recorded alongside every exported result."""
        return {
            "orthonormality": self.orthonormality_tol,
            "oracle": self.oracle_tol,
            "classification": self.classification_tol,
            "degeneracy": self.degeneracy_tol,
        }

    def resolve_output(self, path: Optional[Union[str, Path]]) -> Optional[Path]:
        """Resolve a relative output path against the configured output directory."""
        if path is None:
            return None
        path = Path(path).expanduser()
        if path.is_absolute():
            return path
        return self.output_dir / path

    @staticmethod
    def _read_int(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{name} must be an integer, got {raw!r}.")

    @staticmethod
    def _read_float(name: str, default: float) -> float:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(f"{name} must be a number, got {raw!r}.")
