import copy
import json
import logging
import os

from dotenv import load_dotenv

from services.numerics_config import DEFAULT_NUMERICS_CONFIG

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = 'QSLCHAN_CONFIG'


def default_config():
    return {
        'log_level': 'WARNING',
        'log_file': None,
        'numerics': copy.deepcopy(DEFAULT_NUMERICS_CONFIG),
        'figures': {
            'mu_values': [0.0, 0.3, 0.6, 1.0],
            'fig5b_c_values': [0.2, 0.4, 0.6, 0.8],
            'fig4_tau_max': 5.0,
            'fig4_tau_d': 1.0,
            'fixed_endpoint': 0.5
        }
    }


def load_config(path=None):
    """
    Load the configuration: defaults merged with an optional JSON file.

    The file is taken from `path`, else from $QSLCHAN_CONFIG (a .env file in
    the working directory is honoured). Nothing is written to disk.
    """
    load_dotenv()
    config = default_config()
    config_path = path or os.getenv(CONFIG_ENV_VAR)

    if not config_path:
        return config

    if not os.path.exists(config_path):
        logger.warning(f"Configuration file {config_path} not found, using defaults")
        return config

    with open(config_path, 'r') as f:
        overrides = json.load(f)
    logger.info(f"Loaded configuration from {config_path}")

    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    return config
