import copy
import logging
import os
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

load_dotenv()

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), '..', '..', 'configs', 'verification_config.yaml')

DEFAULTS: Dict[str, Any] = {
    'verification': {
        'seed': 42,
        'tolerance': 1e-9,
        'numeric_points': 10,
        'windows': {'integer': '-2..2', 'half': '-3/2..3/2', 'exponent': '0..2'},
        'sample_ranges': {'default': [1.5, 3.0], 'second_point': [0.25, 1.0]},
    },
    'property_tests': {'transport_cases': 30, 'axiom_cases': 50, 'ideal_cases': 100},
    'service': {'host': '0.0.0.0', 'port': 5000},
    'output': {'default_format': 'text'},
}

# environment variable -> (dotted key, converter)
ENV_OVERRIDES = {
    'VERIFY_SEED': ('verification.seed', int),
    'VERIFY_TOL': ('verification.tolerance', float),
    'API_HOST': ('service.host', str),
    'API_PORT': ('service.port', int),
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def _set(config: Dict[str, Any], dotted: str, value: Any):
    node = config
    *parents, leaf = dotted.split('.')
    for key in parents:
        node = node.setdefault(key, {})
    node[leaf] = value


def get_setting(config: Dict[str, Any], dotted: str, default: Any = None) -> Any:
    node: Any = config
    for key in dotted.split('.'):
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load verification settings: built-in defaults, then the YAML file, then the environment.

    :param path: YAML file; defaults to VERIFY_CONFIG or configs/verification_config.yaml
    :return: nested settings dictionary
    """
    config = copy.deepcopy(DEFAULTS)
    path = path or os.getenv('VERIFY_CONFIG') or DEFAULT_CONFIG_PATH
    try:
        with open(path, 'r') as handle:
            loaded = yaml.safe_load(handle) or {}
        if not isinstance(loaded, dict):
            logger.warning(f"Config file {path} is not a mapping, using defaults")
        else:
            _merge(config, loaded)
            logger.debug(f"Loaded configuration from {path}")
    except FileNotFoundError:
        logger.warning(f"Config file {path} not found, using defaults")
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML in {path}: {e}")

    for env_name, (dotted, convert) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None:
            continue
        try:
            _set(config, dotted, convert(raw))
        except ValueError:
            logger.error(f"Ignoring {env_name}={raw!r}: expected {convert.__name__}")
    return config


def window_text(config: Dict[str, Any]) -> str:
    """The integer window as ``a..b``, the form parse_window accepts."""
    return get_setting(config, 'verification.windows.integer', '-2..2')
