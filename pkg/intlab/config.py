"""
Configuration and logging setup utilities.
"""

import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

from .errors import ConfigError


# Default values for optional config fields
CONFIG_DEFAULTS = {
    "output_path": "results",
    "seed": 0,
    "tolerances": {},
    "sweep": None,
}

# Fields that must be present in the config file
REQUIRED_FIELDS = ["experiment"]

# Per-experiment parameter schema with defaults; keys outside it are rejected
EXPERIMENT_PARAMS = {
    "dressed": {"c": 1.0, "h": 1.0, "n": 64, "probe_points": 41},
    "bethe": {"L": 10.0, "N": 4, "c": 1.0, "integers": None, "beta": 0.0},
    "formfactor": {
        "mode": "decomposition",
        "L": 20.0,
        "N": 4,
        "c": 1.0,
        "holes": [3],
        "particles": [7],
        "ell": 0,
        "density": 0.5,
        "L_values": [64.0, 128.0, 256.0, 512.0],
    },
    "sumid": {"ell": 0, "nu": 0.0, "z": 0.4, "cutoff": 40},
    "gsk": {"nu": [0.0, 0.1103178000763258], "q": 1.0, "x": 200.0, "n": 256},
    "cshift": {"F": 0.5, "c": 1.0, "q": 1.0, "x": 200.0, "n": 256, "loop_points": 256},
    "toeplitz": {"N": 20, "t": 1.5, "hole_offsets": [2], "particle_offsets": [2]},
    "yangyang": {"c": 1.0, "h": 1.0, "T": 0.01, "probe_points": 41},
    "qtm": {
        "J": 1.0,
        "zeta": 1.0471975511965976,
        "h": 0.5,
        "T": 1.0,
        "ed_length": 14,
        "excitations": 2,
        "boundary_xi": [0.0, 1.2],
        "boundary_length": 0,
        "decay_length": 0,
    },
    "toda": {"hbar": 1.0, "level": 0, "momentum": 0.0},
    "sinh": {
        "N": 200,
        "T": None,
        "g": 1.0,
        "t": 0.0,
        "omega1": 1.0,
        "omega2": 1.0,
        "mc_N": 0,
        "sweeps": 20000,
        "burn_in": 5000,
        "bins": 20,
    },
    "oracle": {
        "kind": "ed",
        "L": 8,
        "delta": 0.5,
        "h": 0.0,
        "T": 1.0,
        "J": 1.0,
        "correlations": [1, 2, 3],
        "hbar": 1.0,
        "c": 1.0,
        "N": 1,
    },
}

# Bounds used by --check; overridable through the "tolerances" config key
TOLERANCE_DEFAULTS = {
    "dressed_identity": 1e-8,
    "fermi_doubling": 1e-9,
    "bethe_residual": 1e-12,
    "free_fermion_roots": 1e-6,
    "ff_decomposition": 1e-10,
    "ff_asymptotic_ratio": 0.6,
    "ell_exponent": 0.05,
    "sum_identity": 1e-8,
    "gsk_leading": 0.1,
    "cshift_factorization": 0.05,
    "lacunary_gain": 0.1,
    "lacunary_plain": 1e-12,
    "lacunary_limit": 1e-8,
    "yang_yang_ratio": [3.0, 5.0],
    "free_fermion_energy": 1e-4,
    "qtm_free_energy": 1e-3,
    "qtm_decay_rate": 0.15,
    "qtm_sum_rule": 0.05,
    "qtm_boundary": 1e-3,
    "qtm_theta": 1e-6,
    "toda_energy": 1e-4,
    "toda_wronskian": 1e-8,
    "toda_transfer": 1e-7,
    "toda_conjugation": 1e-8,
    "sinh_direct": 1e-8,
    "sinh_asymptotic": 0.05,
    "sinh_sigma": 3.0,
    "ed_hermitian": 1e-10,
    "toda_richardson": 1e-6,
    "overlap": 1e-5,
}


def setup_logging(verbose=False, quiet=False):
    """
    Configure logging based on verbosity settings.

    Args:
        verbose: Enable DEBUG level logging
        quiet: Enable ERROR level logging only

    Returns:
        Logger instance
    """
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.DEBUG
    else:
        level = logging.INFO

    logging.basicConfig(
        level=level,
        format='%(levelname)s: %(message)s',
        stream=sys.stdout
    )
    return logging.getLogger(__name__)


def default_workers():
    """Worker count from INTLAB_WORKERS, falling back to 1."""
    raw = os.environ.get("INTLAB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"INTLAB_WORKERS must be an integer, got {raw!r}")


def load_config(config_path):
    """
    Load configuration from JSON file.

    Args:
        config_path: Path to JSON configuration file

    Returns:
        dict: Configuration dictionary

    Raises:
        ConfigError: If the file doesn't exist or has invalid JSON
    """
    config_file = Path(config_path)
    if not config_file.exists():
        raise ConfigError(f"Config file not found: {config_path}")

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}")
    except OSError as e:
        raise ConfigError(f"Failed to load config file: {e}")

    if not isinstance(config, dict):
        raise ConfigError(f"{config_path}:1:1: top level must be an object")
    return config


def _check_finite(value, path):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ConfigError(f"Non-finite number at {path}")
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _check_finite(item, f"{path}[{i}]")
    elif isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f"{path}.{key}")


def validate_config(config):
    """
    Validate required fields and apply defaults for optional fields.

    Args:
        config: Configuration dictionary loaded from JSON

    Returns:
        dict: Config with defaults applied and params completed

    Raises:
        ConfigError: On missing/unknown keys, non-finite numbers or a bad sweep
    """
    missing = [f for f in REQUIRED_FIELDS if not config.get(f)]
    if missing:
        raise ConfigError(f"Missing required config fields: {', '.join(missing)}")

    allowed = set(REQUIRED_FIELDS) | set(CONFIG_DEFAULTS) | {"params"}
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

    experiment = config["experiment"]
    if experiment not in EXPERIMENT_PARAMS:
        raise ConfigError(
            f"Unknown experiment '{experiment}'. Choose from: {', '.join(sorted(EXPERIMENT_PARAMS))}"
        )

    params = config.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    schema = EXPERIMENT_PARAMS[experiment]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise ConfigError(f"Unknown params for '{experiment}': {', '.join(unknown)}")
    _check_finite(params, "params")
    tolerances = config.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown = sorted(set(tolerances) - set(TOLERANCE_DEFAULTS))
    if unknown:
        raise ConfigError(f"Unknown tolerances: {', '.join(unknown)}")
    _check_finite(tolerances, "tolerances")

    # Apply defaults for optional fields
    for key, default in CONFIG_DEFAULTS.items():
        config.setdefault(key, default)
    config["params"] = {**schema, **params}

    sweep = config["sweep"]
    if sweep is not None:
        if not isinstance(sweep, dict) or set(sweep) != {"parameter", "values"}:
            raise ConfigError("'sweep' needs exactly the keys 'parameter' and 'values'")
        if sweep["parameter"] not in schema:
            raise ConfigError(f"Sweep parameter '{sweep['parameter']}' is not a '{experiment}' param")
        if not isinstance(sweep["values"], list) or not sweep["values"]:
            raise ConfigError("Sweep value list is empty")
        _check_finite(sweep["values"], "sweep.values")

    if not isinstance(config["seed"], int) or config["seed"] < 0:
        raise ConfigError("'seed' must be a non-negative integer")

    return config


def config_digest(config):
    """SHA-256 of the canonical JSON form of a config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def as_complex(value):
    """Read a JSON number or [re, im] pair as a complex number."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"Complex values are [re, im] pairs, got {value!r}")
        return complex(value[0], value[1])
    return complex(value)
