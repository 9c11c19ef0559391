"""Tests for environment-driven settings."""

from src.config import Settings


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("POP_SEED", "POP_PATIENCE", "POP_LOG_LEVEL"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings(_env_file=None)
        assert settings.seed == 0
        assert settings.patience == 20
        assert settings.width_alphabet == [64, 128, 256, 512, 1024]
        assert settings.stem_widths == (32, 64)
        assert settings.max_blocks_per_stage == 32

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("POP_SEED", "42")
        monkeypatch.setenv("POP_WIDTH_ALPHABET", "[96, 192]")
        settings = Settings(_env_file=None)
        assert settings.seed == 42
        assert settings.width_alphabet == [96, 192]
