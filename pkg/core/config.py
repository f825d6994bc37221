"""
Configuration Management Module
Loads defaults from the .env file and parses flat key = value run files.
"""
import os
import re
from pathlib import Path
from typing import Dict, Tuple

from dotenv import load_dotenv, set_key

from utils.system.error_handler import ConfigError

# Define constants
SCRIPT_DIR = Path(__file__).parent.parent
ENV_PATH = SCRIPT_DIR / ".env"

SECTION_PATTERN = re.compile(r"^\[(?P<name>[A-Za-z_][\w-]*)\]$")
KNOWN_SECTIONS = ("sweep",)


def load_config():
    """
    Load configuration from .env file

    Returns:
        dict: Configuration dictionary
    """
    load_dotenv(ENV_PATH)

    def _number(key, default, cast):
        raw = os.getenv(key, default)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected a {cast.__name__}, got '{raw}'", solution=f"Fix {key} in {ENV_PATH}")

    seed = os.getenv('GEOPURSUIT_SEED')
    config = {
        'GEOPURSUIT_SEED': _number('GEOPURSUIT_SEED', seed, int) if seed else None,
        'GEOPURSUIT_OUTPUT_DIR': os.getenv('GEOPURSUIT_OUTPUT_DIR', 'output'),
        'GEOPURSUIT_VERIFY_SAMPLES': _number('GEOPURSUIT_VERIFY_SAMPLES', '1000', int),
        'GEOPURSUIT_HORIZON': _number('GEOPURSUIT_HORIZON', '100', int),
        'GEOPURSUIT_WIN_TOL': _number('GEOPURSUIT_WIN_TOL', '1e-6', float),
        'GEOPURSUIT_WORKERS': _number('GEOPURSUIT_WORKERS', '1', int),
    }

    return config


def load_config_to_env():
    """Load .env to os.environment"""
    load_dotenv(ENV_PATH)


def save_config(key, value):
    """
    Save configuration to .env file

    Args:
        key: Environment variable key
        value: Value to save
    """
    if not ENV_PATH.exists():
        ENV_PATH.touch()

    set_key(str(ENV_PATH), key, str(value))
    load_dotenv(ENV_PATH, override=True)


def parse_config_text(text: str) -> Dict[str, Tuple[str, int]]:
    """
    Parse a run file into {key: (value, line_number)}.
    Keys under a [sweep] header come back as 'sweep.<key>'.
    """
    entries = {}
    section = None
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        header = SECTION_PATTERN.match(line)
        if header:
            section = header.group("name").lower()
            if section not in KNOWN_SECTIONS:
                raise ConfigError(f"[{section}]", "unknown section", line=number)
            continue

        if "=" not in line:
            raise ConfigError(line, "expected 'key = value'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("", "empty key", line=number)
        if section:
            key = f"{section}.{key}"
        if key in entries:
            raise ConfigError(key, f"duplicate key (first set on line {entries[key][1]})", line=number)
        entries[key] = (value, number)

    return entries
