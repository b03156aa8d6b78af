"""Tests for configuration management."""

from unittest.mock import patch

from aeroamp.config import DATA_DIR_ENV, Config


class TestConfig:
    """Test Config class."""

    def test_default_values(self):
        """Test default config values."""
        config = Config()
        assert config.seed == 0
        assert config.train_count == 120
        assert config.bootstrap_replications == 1000
        assert config.cv_folds == 5
        assert config.sync_rate_hz == 5.0
        assert config.max_malformed_fraction == 0.01
        assert config.drone_profile == ""

    def test_save_and_load(self, tmp_path):
        """Test saving and loading config."""
        config_file = tmp_path / "config.json"

        with patch("aeroamp.config.CONFIG_FILE", config_file), \
             patch("aeroamp.config.CONFIG_DIR", tmp_path):
            Config(seed=7, train_count=60).save()

            assert config_file.exists()

            loaded = Config.load()
            assert loaded.seed == 7
            assert loaded.train_count == 60

    def test_load_missing_file(self, tmp_path):
        """Test loading when config file doesn't exist."""
        with patch("aeroamp.config.CONFIG_FILE", tmp_path / "nonexistent" / "config.json"):
            assert Config.load() == Config()

    def test_load_invalid_json(self, tmp_path):
        """Test loading invalid JSON file."""
        config_file = tmp_path / "config.json"
        config_file.write_text("invalid json {{{")

        with patch("aeroamp.config.CONFIG_FILE", config_file):
            assert Config.load() == Config()

    def test_load_ignores_stale_keys(self, tmp_path):
        """Test keys from older versions are dropped."""
        config_file = tmp_path / "config.json"
        config_file.write_text('{"seed": 3, "retired_option": true}')

        with patch("aeroamp.config.CONFIG_FILE", config_file):
            assert Config.load().seed == 3

    def test_reset(self, isolated_config):
        """Test resetting config to defaults."""
        Config(bootstrap_replications=10).save()

        reset_config = Config.reset()
        assert reset_config.bootstrap_replications == 1000
        assert Config.load().bootstrap_replications == 1000

    def test_data_dir_from_environment(self, monkeypatch, tmp_path):
        """Test the environment variable wins over the config file."""
        monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
        assert Config(data_dir="/elsewhere").resolved_data_dir() == tmp_path

    def test_data_dir_unset(self, monkeypatch):
        """Test no dataset root without either source."""
        monkeypatch.delenv(DATA_DIR_ENV, raising=False)
        assert Config().resolved_data_dir() is None
