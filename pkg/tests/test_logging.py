"""Tests for logging setup."""

import io
import logging
import warnings

from subdecode.utils.logging import get_logger, setup_logging


class TestSetupLogging:
    """Test logging configuration."""

    def teardown_method(self):
        logging.captureWarnings(False)

    def test_records_reach_stream(self):
        stream = io.StringIO()
        setup_logging("INFO", include_timestamp=False, stream=stream)
        get_logger("subdecode.test").info("hello")
        assert "subdecode.test - INFO - hello" in stream.getvalue()

    def test_level_filters(self):
        stream = io.StringIO()
        setup_logging("ERROR", stream=stream)
        get_logger("subdecode.test").warning("quiet")
        assert stream.getvalue() == ""

    def test_rebinds_stream(self):
        first, second = io.StringIO(), io.StringIO()
        setup_logging("INFO", stream=first)
        setup_logging("INFO", stream=second)
        get_logger("subdecode.test").info("moved")
        assert "moved" in second.getvalue()
        assert first.getvalue() == ""

    def test_runtime_warnings_logged(self):
        stream = io.StringIO()
        setup_logging("WARNING", stream=stream)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.warn("overflow in matmul", RuntimeWarning, stacklevel=1)
        assert "overflow in matmul" in stream.getvalue()
