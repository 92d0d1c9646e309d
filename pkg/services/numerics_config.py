# services/numerics_config.py
"""
Numerics Configuration

Tolerances, grid sizes and default rates shared by the numerical services.
Values come from DEFAULT_NUMERICS_CONFIG, optionally overridden by the
'numerics' section of the JSON configuration file.
"""

import copy
import logging
from typing import Any, Dict, Optional

from services.cache_service import invalidate_ratio_cache

logger = logging.getLogger(__name__)

# Default configuration for the numerical services
DEFAULT_NUMERICS_CONFIG = {
    'quadrature_abs_tol': 1e-9,
    'quadrature_rel_tol': 1e-10,
    'quadrature_max_depth': 40,
    'hermitian_tol': 1e-10,
    'trace_tol': 1e-10,
    'positivity_tol': 1e-9,
    'completeness_tol': 1e-10,
    'purity_tol': 1e-8,
    'stationary_tol': 1e-12,
    'bisection_tol': 1e-6,
    'coarse_step': 0.01,
    'speedup_eps': 1e-6,
    'crossover_eps': 1e-7,
    'gain_threshold': 5e-4,
    'grid_points': 200,
    'workers': 1,
    'default_rates': {'ad': 1.0, 'pd': 0.5, 'depol': 0.5}
}

_POSITIVE_KEYS = (
    'quadrature_abs_tol', 'quadrature_rel_tol', 'hermitian_tol', 'trace_tol',
    'positivity_tol', 'completeness_tol', 'purity_tol', 'stationary_tol',
    'bisection_tol', 'coarse_step', 'speedup_eps', 'crossover_eps', 'gain_threshold'
)


class NumericsConfig:
    """
    Configuration manager for numerical settings.
    Handles loading, validation, and access to tolerances and grid sizes.
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration with provided settings or defaults.

        Args:
            config: Configuration dictionary, uses defaults if None
        """
        self.config = copy.deepcopy(config) if config else copy.deepcopy(DEFAULT_NUMERICS_CONFIG)
        self._validate_config()

    def _validate_config(self):
        """Validate configuration values and set defaults for missing keys."""
        for key, default_value in DEFAULT_NUMERICS_CONFIG.items():
            if key not in self.config:
                self.config[key] = copy.deepcopy(default_value)
                logger.debug(f"Missing numerics key '{key}', using default: {default_value}")

        for key in _POSITIVE_KEYS:
            value = self.config[key]
            if not isinstance(value, (int, float)) or value <= 0:
                logger.warning(f"{key} must be a positive number, got {value!r}; using {DEFAULT_NUMERICS_CONFIG[key]}")
                self.config[key] = DEFAULT_NUMERICS_CONFIG[key]

        if self.config['coarse_step'] >= 0.5:
            logger.warning("coarse_step must be < 0.5, setting to 0.01")
            self.config['coarse_step'] = 0.01

        if int(self.config['quadrature_max_depth']) < 4:
            logger.warning("quadrature_max_depth must be >= 4, setting to 4")
            self.config['quadrature_max_depth'] = 4

        if int(self.config['grid_points']) < 2:
            logger.warning("grid_points must be >= 2, setting to 2")
            self.config['grid_points'] = 2

        if int(self.config['workers']) < 1:
            logger.warning("workers must be >= 1, setting to 1")
            self.config['workers'] = 1

        rates = dict(DEFAULT_NUMERICS_CONFIG['default_rates'])
        for family, rate in (self.config.get('default_rates') or {}).items():
            if isinstance(rate, (int, float)) and rate > 0:
                rates[family] = float(rate)
            else:
                logger.warning(f"Invalid default rate {rate!r} for '{family}', keeping {rates.get(family)}")
        self.config['default_rates'] = rates

    def get_quadrature_abs_tol(self) -> float:
        """Absolute tolerance of the adaptive Simpson rule."""
        return float(self.config['quadrature_abs_tol'])

    def get_quadrature_rel_tol(self) -> float:
        """Quadrature tolerance floor relative to the size of the integral."""
        return float(self.config['quadrature_rel_tol'])

    def get_quadrature_max_depth(self) -> int:
        """Maximum recursion depth of the adaptive Simpson rule."""
        return int(self.config['quadrature_max_depth'])

    def get_hermitian_tol(self) -> float:
        return float(self.config['hermitian_tol'])

    def get_trace_tol(self) -> float:
        return float(self.config['trace_tol'])

    def get_positivity_tol(self) -> float:
        return float(self.config['positivity_tol'])

    def get_completeness_tol(self) -> float:
        return float(self.config['completeness_tol'])

    def get_purity_tol(self) -> float:
        return float(self.config['purity_tol'])

    def get_stationary_tol(self) -> float:
        return float(self.config['stationary_tol'])

    def get_bisection_tol(self) -> float:
        """Width below which a critical-value bracket is accepted."""
        return float(self.config['bisection_tol'])

    def get_coarse_step(self) -> float:
        """Step of the bracketing scan that precedes bisection."""
        return float(self.config['coarse_step'])

    def get_speedup_eps(self) -> float:
        """Margin below 1 for classifying a ratio as a speedup."""
        return float(self.config['speedup_eps'])

    def get_crossover_eps(self) -> float:
        """Margin below 1 that locates the entanglement crossover C_c."""
        return float(self.config['crossover_eps'])

    def get_gain_threshold(self) -> float:
        """Smallest drop of the ratio under memory that counts toward P_tau_c."""
        return float(self.config['gain_threshold'])

    def get_grid_points(self) -> int:
        """Points per swept axis of the figure datasets."""
        return int(self.config['grid_points'])

    def get_workers(self) -> int:
        return int(self.config['workers'])

    def get_quadrature_settings(self) -> tuple:
        """(abs_tol, rel_tol, max_depth); cached quadrature results are keyed on it."""
        return (self.get_quadrature_abs_tol(), self.get_quadrature_rel_tol(), self.get_quadrature_max_depth())

    def get_default_rate(self, family: str) -> float:
        """Default decay rate (Gamma for AD, gamma for PD and DEPOL)."""
        return float(self.config['default_rates'][family])

    def update_config(self, updates: Dict[str, Any]):
        """
        Update configuration with new values.

        Args:
            updates: Dictionary of configuration updates
        """
        self.config.update(copy.deepcopy(updates))
        self._validate_config()
        logger.info(f"Updated numerics configuration: {updates}")

    def get_config(self) -> Dict[str, Any]:
        """Get the current configuration dictionary."""
        return copy.deepcopy(self.config)


# Global configuration instance
_global_config = NumericsConfig()


def get_numerics_config() -> NumericsConfig:
    """Get the global numerics configuration instance."""
    return _global_config


def update_numerics_config(updates: Dict[str, Any]):
    """Update the global numerics configuration."""
    _global_config.update_config(updates)
    invalidate_ratio_cache()


def reload_numerics_config(config: Optional[Dict[str, Any]] = None) -> NumericsConfig:
    """
    Replace the global configuration, e.g. after loading a config file.

    Args:
        config: The 'numerics' section of a loaded configuration

    Returns:
        The new global NumericsConfig instance
    """
    global _global_config
    _global_config = NumericsConfig(config)
    invalidate_ratio_cache()
    return _global_config
