"""
Settings for the qfbounds project.

Numeric defaults live here as module constants. The environment (and an
optional ``.env`` file) only controls logging; no environment variable
changes a computed value.
"""

import logging
import os

from dotenv import load_dotenv

# Load .env file (try encodings for Windows compatibility)
for encoding in ("utf-8", "utf-8-sig", "utf-16", "utf-16-le", "cp1252"):
    try:
        load_dotenv(encoding=encoding)
        break
    except Exception as e:
        logging.warning(f"Could not load .env with {encoding}: {e}")

logger = logging.getLogger(__name__)

# Logging
LOG_LEVEL = os.getenv("QFBOUNDS_LOG_LEVEL", "WARNING").upper()
LOG_DIR = os.getenv("QFBOUNDS_LOG_DIR") or None

# Model defaults
DEFAULT_MARGULIS_EPS = 0.104
DEFAULT_TOL = 1e-9
DEFAULT_REFINEMENT = 16

# Axis solver
SOLVER_TOL = 1e-10
SOLVER_MAX_ITER = 200

# Closed-form evaluation
LOG_SPACE_SWITCH = 50.0
CLAMP_SILENT = 1e-12
CLAMP_LIMIT = 1e-6

# Type-Cyl minimality is checked over |k| <= MINIMALITY_WINDOW
MINIMALITY_WINDOW = 16

# Classification of solved quadrilaterals
CLASSIFY_TOL = 1e-7


def validate_settings():
    """Validate numeric settings at startup."""
    positive = {
        "DEFAULT_MARGULIS_EPS": DEFAULT_MARGULIS_EPS,
        "DEFAULT_TOL": DEFAULT_TOL,
        "SOLVER_TOL": SOLVER_TOL,
        "LOG_SPACE_SWITCH": LOG_SPACE_SWITCH,
        "CLAMP_SILENT": CLAMP_SILENT,
        "CLAMP_LIMIT": CLAMP_LIMIT,
        "CLASSIFY_TOL": CLASSIFY_TOL,
    }
    bad = [name for name, value in positive.items() if not value > 0]
    if bad:
        raise ValueError(f"Settings must be positive: {', '.join(bad)}")
    if CLAMP_SILENT >= CLAMP_LIMIT:
        raise ValueError("CLAMP_SILENT must be smaller than CLAMP_LIMIT")
    if DEFAULT_REFINEMENT < 0 or MINIMALITY_WINDOW < 1:
        raise ValueError("DEFAULT_REFINEMENT must be >= 0 and MINIMALITY_WINDOW >= 1")
    if LOG_LEVEL not in logging.getLevelNamesMapping():
        raise ValueError(f"Unknown QFBOUNDS_LOG_LEVEL: {LOG_LEVEL}")

    logger.debug("Settings validated")
    return True
