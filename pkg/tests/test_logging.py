"""Tests for the per-run log."""

from aeroamp.logging import RUN_LOG_NAME, attach_run_log, detach_run_log, get_logger


class TestRunLog:
    """run.log beside command outputs."""

    def test_records_between_attach_and_detach(self, tmp_path):
        """Test only records emitted while attached reach the file."""
        logger = get_logger()
        handler = attach_run_log(tmp_path)
        logger.debug("bootstrap redraws: 3")
        detach_run_log(handler)
        logger.info("after detach")

        text = (tmp_path / RUN_LOG_NAME).read_text()
        assert "DEBUG" in text
        assert "bootstrap redraws: 3" in text
        assert "after detach" not in text
        assert handler not in logger.handlers

    def test_rerun_overwrites(self, tmp_path):
        """Test a second run replaces the first run's log."""
        for message in ("first run", "second run"):
            handler = attach_run_log(tmp_path)
            get_logger().info(message)
            detach_run_log(handler)
        text = (tmp_path / RUN_LOG_NAME).read_text()
        assert text.splitlines() == ["INFO    test_logging: second run"]
