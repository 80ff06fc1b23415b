"""Tests for configuration loading."""

import pytest
from pydantic import ValidationError

from secrecy_regions.config import Config, load_config


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run from an empty directory so no stray .env or secrecy.toml is read."""
    monkeypatch.chdir(tmp_path)
    for name in ("SECRECY_SEED", "SECRECY_WORKERS", "SECRECY_MU_GRID", "SECRECY_UNITS"):
        monkeypatch.delenv(name, raising=False)


class TestDefaults:
    """Field defaults."""

    def test_defaults(self):
        config = Config()
        assert config.log_level == "info"
        assert config.workers == 1
        assert config.grid_resolution == 16
        assert config.random_samples == 2000
        assert config.mu_grid == [1.0, 1.5, 2.0, 4.0, 8.0]
        assert config.max_output_bits == 24.0
        assert config.max_codewords == 65536
        assert config.csv_digits == 12
        assert config.units == "bits"

    def test_frozen(self):
        config = Config()
        with pytest.raises(ValidationError):
            config.seed = 3  # type: ignore


class TestValidation:
    """Field constraints."""

    def test_mu_below_one_rejected(self):
        with pytest.raises(ValidationError):
            Config(mu_grid=[0.5, 2.0])

    def test_empty_mu_grid_rejected(self):
        with pytest.raises(ValidationError):
            Config(mu_grid=[])

    def test_workers_positive(self):
        with pytest.raises(ValidationError):
            Config(workers=0)

    def test_unknown_units_rejected(self):
        with pytest.raises(ValidationError):
            Config(units="hartleys")


class TestSources:
    """Precedence of environment, TOML files and overrides."""

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("SECRECY_SEED", "7")
        monkeypatch.setenv("SECRECY_MU_GRID", "[1, 3]")
        config = Config()
        assert config.seed == 7
        assert config.mu_grid == [1.0, 3.0]

    def test_working_directory_toml(self, tmp_path):
        (tmp_path / "secrecy.toml").write_text("workers = 3\n")
        assert Config().workers == 3

    def test_environment_beats_working_directory_toml(self, tmp_path, monkeypatch):
        (tmp_path / "secrecy.toml").write_text("workers = 3\n")
        monkeypatch.setenv("SECRECY_WORKERS", "5")
        assert Config().workers == 5

    def test_explicit_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('seed = 5\nunits = "nats"\n')
        config = load_config(path)
        assert config.seed == 5
        assert config.units == "nats"

    def test_overrides_beat_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("seed = 5\n")
        assert load_config(path, seed=9).seed == 9

    def test_none_overrides_fall_through(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("seed = 5\n")
        assert load_config(path, seed=None).seed == 5
