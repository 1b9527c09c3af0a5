import io
import logging
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from qfbounds_project import settings
from qfbounds_project.logging_config import StructuredFormatter, setup_logging
from qfbounds_project.startup import StartupValidator


class SettingsTests(unittest.TestCase):
    def test_defaults_validate(self):
        self.assertTrue(settings.validate_settings())

    def test_reference_constants(self):
        self.assertEqual(settings.DEFAULT_MARGULIS_EPS, 0.104)
        self.assertEqual(settings.DEFAULT_REFINEMENT, 16)

    def test_bad_clamp_order(self):
        with mock.patch.object(settings, "CLAMP_SILENT", 1.0):
            with self.assertRaises(ValueError):
                settings.validate_settings()

    def test_unknown_log_level(self):
        with mock.patch.object(settings, "LOG_LEVEL", "CHATTY"):
            with self.assertRaises(ValueError):
                settings.validate_settings()


class LoggingTests(unittest.TestCase):
    def tearDown(self):
        logging.getLogger().handlers.clear()

    def test_structured_line(self):
        stream = io.StringIO()
        setup_logging("INFO", stream=stream)
        logging.getLogger("qfbounds.test").info("solver converged")
        line = stream.getvalue().strip()
        self.assertTrue(line.startswith("["))
        self.assertIn("] INFO | test_project:test_structured_line:", line)
        self.assertTrue(line.endswith("| solver converged"))

    def test_level_filters_console(self):
        stream = io.StringIO()
        setup_logging("WARNING", stream=stream)
        logging.getLogger("qfbounds.test").info("hidden")
        self.assertEqual(stream.getvalue(), "")

    def test_file_handlers(self):
        with tempfile.TemporaryDirectory() as tmp:
            setup_logging("WARNING", log_dir=tmp, stream=io.StringIO())
            logging.getLogger("qfbounds.test").debug("to the debug file")
            logging.getLogger("qfbounds.test").error("to both files")
            for handler in logging.getLogger().handlers:
                handler.flush()
                handler.close()
            self.assertIn("to the debug file", (Path(tmp) / "debug.log").read_text())
            errors = (Path(tmp) / "errors.log").read_text()
            self.assertIn("to both files", errors)
            self.assertNotIn("debug file", errors)

    def test_exception_info(self):
        try:
            raise RuntimeError("boom")
        except RuntimeError:
            record = logging.LogRecord("x", logging.ERROR, __file__, 1, "failed", None, sys.exc_info())
        self.assertIn("Exception: Traceback", StructuredFormatter().format(record))


class StartupTests(unittest.TestCase):
    def test_all_validations_pass(self):
        validator = StartupValidator(log_dir="")
        self.assertTrue(validator.run_all_validations())
        self.assertEqual(validator.errors, [])
        self.assertIn("scipy", validator.versions)

    def test_missing_package(self):
        validator = StartupValidator(log_dir="")
        with mock.patch("qfbounds_project.startup.REQUIRED_PACKAGES", ("numpy", "not_a_real_package")):
            self.assertFalse(validator.validate_dependencies())
        self.assertIn("not_a_real_package", validator.errors[0])

    def test_writable_log_dir(self):
        with tempfile.TemporaryDirectory() as tmp:
            validator = StartupValidator(log_dir=Path(tmp) / "logs")
            self.assertTrue(validator.validate_log_dir())
            self.assertTrue((Path(tmp) / "logs").is_dir())


if __name__ == "__main__":
    unittest.main()
