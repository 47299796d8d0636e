#!/usr/bin/env python3
"""
Runtime configuration for the MBUR quantile-regression toolkit.
Values come from environment variables; CLI flags override them per run.
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from .optimizer import NmOptions

# Set up logging
logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 4
DEFAULT_WORKERS = 4
DEFAULT_F_TOLERANCE = 1e-10
DEFAULT_X_TOLERANCE = 1e-8


class AnalysisConfig:
    """Configuration class for fitting and reporting runs"""

    def __init__(self):
        self.is_valid = True
        self.data_path = os.environ.get('MBUR_QREG_DATA') or None
        self.log_level = os.environ.get('MBUR_QREG_LOG_LEVEL', 'WARNING').upper()
        self.max_iterations = self._read_int('MBUR_QREG_MAX_ITERATIONS', None, minimum=1)
        self.restarts = self._read_int('MBUR_QREG_RESTARTS', DEFAULT_RESTARTS, minimum=0)
        self.workers = self._read_int('MBUR_QREG_WORKERS', DEFAULT_WORKERS, minimum=1)
        self.f_tolerance = self._read_float('MBUR_QREG_F_TOLERANCE', DEFAULT_F_TOLERANCE)
        self.x_tolerance = self._read_float('MBUR_QREG_X_TOLERANCE', DEFAULT_X_TOLERANCE)

        if not isinstance(logging.getLevelName(self.log_level), int):
            logger.warning(f"⚠️ Unknown MBUR_QREG_LOG_LEVEL {self.log_level!r}, using WARNING")
            self.log_level = 'WARNING'
            self.is_valid = False

        if self.data_path and not Path(self.data_path).exists():
            logger.warning(f"⚠️ MBUR_QREG_DATA points to a missing file: {self.data_path}")
            self.is_valid = False

    def _read_int(self, name: str, default: Optional[int], minimum: int) -> Optional[int]:
        raw = os.environ.get(name)
        if raw is None or raw == '':
            return default
        try:
            value = int(raw)
        except ValueError:
            logger.warning(f"⚠️ {name}={raw!r} is not an integer, using {default}")
            self.is_valid = False
            return default
        if value < minimum:
            logger.warning(f"⚠️ {name}={value} is below {minimum}, using {default}")
            self.is_valid = False
            return default
        return value

    def _read_float(self, name: str, default: float) -> float:
        raw = os.environ.get(name)
        if raw is None or raw == '':
            return default
        try:
            value = float(raw)
        except ValueError:
            logger.warning(f"⚠️ {name}={raw!r} is not a number, using {default}")
            self.is_valid = False
            return default
        if not value > 0:
            logger.warning(f"⚠️ {name} must be positive, using {default}")
            self.is_valid = False
            return default
        return value

    def nm_options(self) -> NmOptions:
        """Optimizer settings for CLI and report fits"""
        return NmOptions(
            max_iterations=self.max_iterations,
            f_tolerance=self.f_tolerance,
            x_tolerance=self.x_tolerance,
            restarts=self.restarts,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Export configuration as dictionary"""
        return {
            'data_path': self.data_path,
            'log_level': self.log_level,
            'max_iterations': self.max_iterations,
            'restarts': self.restarts,
            'workers': self.workers,
            'f_tolerance': self.f_tolerance,
            'x_tolerance': self.x_tolerance,
            'is_valid': self.is_valid,
        }


# Global configuration instance
_config_instance = None


def get_config() -> AnalysisConfig:
    """Get or create the process-wide configuration"""
    global _config_instance
    if _config_instance is None:
        _config_instance = AnalysisConfig()
    return _config_instance


def reset_config():
    """Drop the cached configuration so the environment is read again"""
    global _config_instance
    _config_instance = None
