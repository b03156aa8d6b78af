"""aeroamp configuration management."""

import json
import os
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Any

from aeroamp.errors import MalformedInput


CONFIG_DIR = Path.home() / ".config" / "aeroamp"
CONFIG_FILE = CONFIG_DIR / "config.json"

DATA_DIR_ENV = "AEROAMP_DATA_DIR"


def read_json(path: str | Path) -> Any:
    """Parse a user-supplied JSON file; syntax errors become MalformedInput."""
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInput(path, str(e)) from e


@dataclass
class Config:
    """aeroamp configuration.

    Flags on the command line override these values for a single run.
    """

    data_dir: str = ""  # Dataset root; AEROAMP_DATA_DIR wins when set
    seed: int = 0
    train_count: int = 120
    bootstrap_replications: int = 1000
    cv_folds: int = 5
    gbt_rounds: int = 200
    sync_rate_hz: float = 5.0
    max_malformed_fraction: float = 0.01
    drone_profile: str = ""  # Empty: shipped m100.json

    def resolved_data_dir(self) -> Path | None:
        """Dataset root from the environment, then from the config file."""
        value = os.environ.get(DATA_DIR_ENV) or self.data_dir
        return Path(value).expanduser() if value else None

    @classmethod
    def field_names(cls) -> list[str]:
        """Names of all settings."""
        return list(cls.__dataclass_fields__)

    @classmethod
    def load(cls) -> "Config":
        """Load config from file. Return defaults if missing or unreadable."""
        if CONFIG_FILE.exists():
            try:
                with open(CONFIG_FILE, "r") as f:
                    data = json.load(f)
                # Filter out keys from older versions
                valid_keys = set(cls.field_names())
                filtered = {k: v for k, v in data.items() if k in valid_keys}
                return cls(**filtered)
            except (json.JSONDecodeError, TypeError, AttributeError):
                return cls()
        return cls()

    def save(self) -> None:
        """Save config to file."""
        CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        with open(CONFIG_FILE, "w") as f:
            json.dump(asdict(self), f, indent=2)

    @classmethod
    def reset(cls) -> "Config":
        """Reset to default config and save."""
        config = cls()
        config.save()
        return config
