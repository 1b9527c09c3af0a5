"""
Startup validation for qfbounds.
Validates the interpreter, the numeric stack and the settings before a batch run.
"""

import importlib
import logging
import sys
from pathlib import Path
from typing import Dict, List

from . import settings

logger = logging.getLogger(__name__)

REQUIRED_PACKAGES = (
    "numpy",
    "scipy",
    "networkx",
    "mpmath",
    "pydantic",
    "click",
    "dotenv",
    "tqdm",
)


class StartupValidator:
    """Validates system requirements and configuration before a run."""

    def __init__(self, log_dir=None):
        self.base_dir = Path(__file__).resolve().parent.parent
        self.log_dir = log_dir if log_dir is not None else settings.LOG_DIR
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.versions: Dict[str, str] = {}

    def validate_python_version(self):
        """Check if Python version meets requirements."""
        version = sys.version_info
        if version < (3, 11):
            self.errors.append(
                f"Python 3.11+ required. Current version: {version.major}.{version.minor}.{version.micro}"
            )
            return False
        logger.info(
            f"[OK] Python version: {version.major}.{version.minor}.{version.micro}"
        )
        return True

    def validate_dependencies(self):
        """Check that every package of the stack imports."""
        missing = []
        for name in REQUIRED_PACKAGES:
            try:
                module = importlib.import_module(name)
            except ImportError:
                missing.append(name)
                continue
            self.versions[name] = str(getattr(module, "__version__", "unknown"))

        if missing:
            self.errors.append(f"Missing required packages: {', '.join(missing)}")
            return False

        logger.info("[OK] Dependencies validation passed")
        return True

    def validate_settings(self):
        try:
            settings.validate_settings()
        except ValueError as e:
            self.errors.append(f"Settings validation failed: {e}")
            return False
        logger.info("[OK] Settings validation passed")
        return True

    def validate_log_dir(self):
        """Check that the configured log directory is writable."""
        if not self.log_dir:
            return True
        path = Path(self.log_dir)
        try:
            path.mkdir(parents=True, exist_ok=True)
            probe = path / ".write_test"
            probe.write_text("ok")
            probe.unlink()
        except OSError as e:
            self.warnings.append(f"Log directory {path} is not writable: {e}")
            return False
        logger.info(f"[OK] Log directory writable: {path}")
        return True

    def run_all_validations(self):
        """Run all validation checks."""
        logger.info("Starting startup validation...")

        validations = [
            self.validate_python_version(),
            self.validate_dependencies(),
            self.validate_settings(),
            self.validate_log_dir(),
        ]

        all_passed = all(validations)

        if self.errors:
            logger.error("Validation errors found:")
            for error in self.errors:
                logger.error(f"  [ERROR] {error}")

        if self.warnings:
            logger.warning("Validation warnings:")
            for warning in self.warnings:
                logger.warning(f"  [WARNING]  {warning}")

        if all_passed and not self.errors:
            logger.info("[SUCCESS] All validations passed.")
            return True
        return not self.errors
