"""
Runtime configuration for compactlin.

Module-level defaults, each overridable through an environment variable.
Command-line flags in main.py take precedence over both.
"""

import os


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# Verifier caps
DEFAULT_CAP_X = _env_int("COMPACTLIN_CAP_X", 4096)
DEFAULT_CAP_Y = _env_int("COMPACTLIN_CAP_Y", 2 ** 20)

# Exact size minimization
DEFAULT_NODE_BUDGET = _env_int("COMPACTLIN_NODE_BUDGET", 200000)
DEFAULT_WEIGHTS = (1.0, 1.0)

# Total unimodularity sampling
DEFAULT_TU_SAMPLES = _env_int("COMPACTLIN_TU_SAMPLES", 1000)
DEFAULT_TU_MAX_ORDER = 6
DEFAULT_SEED = _env_int("COMPACTLIN_SEED", 0)

# Input files
MAX_INPUT_SIZE_MB = _env_int("COMPACTLIN_MAX_INPUT_MB", 20)
ALLOWED_INPUT_EXTENSIONS = {'.json'}
MAX_FILENAME_LENGTH = 255

DEFAULT_LOG_LEVEL = os.environ.get("COMPACTLIN_LOG_LEVEL", "WARNING")
