"""
Configuration module for the LCTRS analyzer
===========================================

Centralized configuration management for all analysis components
"""

import logging
import os
import re
import shlex
import shutil
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from server.lctrs.errors import ConfigurationError

logger = logging.getLogger(__name__)

BACKENDS = ("builtin", "external")
EQUIV_MODES = ("syntactic", "semantic")
FORMATS = ("text", "json")


@dataclass
class SolverConfig:
    """Constraint solver selection"""

    backend: str = "builtin"
    command: str = "z3 -in"
    timeout_ms: int = 5000
    # consult the other backend when the first answers Unknown
    fallback: bool = True


@dataclass
class AnalysisConfig:
    """Difference and quasi-reducibility parameters"""

    equiv_mode: str = "syntactic"
    max_diff_steps: int = 10000


@dataclass
class OracleConfig:
    """Finite ground fragment used for brute-force cross-checks"""

    int_min: int = -2
    int_max: int = 2
    max_height: int = 4


@dataclass
class OutputConfig:
    format: str = "text"
    log_level: str = "WARNING"
    json_logs: bool = False


def _flag(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def parse_int_range(text: str) -> Tuple[int, int]:
    """Parse ``a..b`` (signs allowed) into an inclusive pair."""
    match = re.fullmatch(r"\s*([+-]?\d+)\s*\.\.\s*([+-]?\d+)\s*", text or "")
    if match is None:
        raise ConfigurationError(f"integer range must look like a..b, got {text!r}")
    return int(match.group(1)), int(match.group(2))


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from None


class ConfigManager:
    """Central configuration manager"""

    def __init__(self, env_file: Optional[str] = None):
        load_dotenv(env_file, override=False)
        self.solver = self._load_solver_config()
        self.analysis = self._load_analysis_config()
        self.oracle = self._load_oracle_config()
        self.output = self._load_output_config()

    def _load_solver_config(self) -> SolverConfig:
        """Load solver configuration from environment or defaults"""
        return SolverConfig(
            backend=os.getenv('LCTRS_SOLVER', 'builtin'),
            command=os.getenv('LCTRS_SOLVER_CMD', 'z3 -in'),
            timeout_ms=_int_env('LCTRS_SOLVER_TIMEOUT_MS', 5000),
            fallback=_flag(os.getenv('LCTRS_SOLVER_FALLBACK', 'true')),
        )

    def _load_analysis_config(self) -> AnalysisConfig:
        return AnalysisConfig(
            equiv_mode=os.getenv('LCTRS_EQUIV_MODE', 'syntactic'),
            max_diff_steps=_int_env('LCTRS_MAX_DIFF_STEPS', 10000),
        )

    def _load_oracle_config(self) -> OracleConfig:
        int_min, int_max = parse_int_range(os.getenv('LCTRS_INT_RANGE', '-2..2'))
        return OracleConfig(
            int_min=int_min,
            int_max=int_max,
            max_height=_int_env('LCTRS_MAX_HEIGHT', 4),
        )

    def _load_output_config(self) -> OutputConfig:
        return OutputConfig(
            format=os.getenv('LCTRS_OUTPUT_FORMAT', 'text'),
            log_level=os.getenv('LCTRS_LOG_LEVEL', 'WARNING').upper(),
            json_logs=_flag(os.getenv('LCTRS_JSON_LOGS', 'false')),
        )

    def get_config_dict(self) -> Dict[str, Any]:
        """Get complete configuration as dictionary"""
        return {
            'solver': asdict(self.solver),
            'analysis': asdict(self.analysis),
            'oracle': asdict(self.oracle),
            'output': asdict(self.output),
        }

    def update(self, section: str, **kwargs) -> None:
        """Override parameters of one section, ignoring ``None`` values (unset CLI flags)."""
        target = getattr(self, section)
        for key, value in kwargs.items():
            if value is not None and hasattr(target, key):
                setattr(target, key, value)

    def validate_config(self) -> bool:
        """Validate configuration parameters"""
        errors = []

        if self.solver.backend not in BACKENDS:
            errors.append(f"solver backend must be one of {BACKENDS}")
        if self.solver.timeout_ms <= 0:
            errors.append("solver timeout must be positive")
        if self.solver.backend == "external" and not shlex.split(self.solver.command):
            errors.append("external solver command must not be empty")

        if self.analysis.equiv_mode not in EQUIV_MODES:
            errors.append(f"equivalence mode must be one of {EQUIV_MODES}")
        if self.analysis.max_diff_steps < 1:
            errors.append("max_diff_steps must be at least 1")

        if self.oracle.int_min > self.oracle.int_max:
            errors.append("oracle integer range is empty")
        if self.oracle.max_height < 1:
            errors.append("oracle max_height must be at least 1")

        if self.output.format not in FORMATS:
            errors.append(f"output format must be one of {FORMATS}")

        if errors:
            logger.error("Configuration validation errors:")
            for error in errors:
                logger.error("  - %s", error)
            return False

        return True


def external_solver_available(solver: SolverConfig) -> bool:
    argv = shlex.split(solver.command)
    return bool(argv) and shutil.which(argv[0]) is not None
