"""
Centralized path management for ALE Edit.

App data lives in an .ale/ folder next to the entry script so a checkout
stays self-contained.

Directory structure:
    path/to/ale.py
    path/to/dictionaries.json   - Default attribute dictionaries (bundled)
    path/to/assets/
        toy_params_v1.bin       - Golden toy backend parameters
    path/to/.ale/
        logs/YYYY-MM-DD.log     - Tee'd console output
    path/to/ale-out/            - Default output directory for edits
"""

import os
from pathlib import Path

# Directory name for app data (hidden on Unix)
DATA_DIR_NAME = ".ale"

# Default folder name for edit outputs
OUTPUT_FOLDER_NAME = "ale-out"

# Environment variable pointing at a JSON config file
CONFIG_ENV_VAR = "ALE_CONFIG"

TOY_PARAMS_FILENAME = "toy_params_v1.bin"


def get_app_dir() -> Path:
    """Get the repo root (parent of src/)."""
    return Path(__file__).parent.parent.parent


def get_bundle_dir() -> Path:
    """Get the directory holding bundled resources (dictionaries, assets)."""
    return get_app_dir()


def get_data_dir() -> Path:
    """Get the .ale/ data directory, creating it if needed."""
    data_dir = get_app_dir() / DATA_DIR_NAME
    data_dir.mkdir(exist_ok=True)
    return data_dir


def get_logs_dir() -> Path:
    """Get the directory for dated log files."""
    logs_dir = get_data_dir() / "logs"
    logs_dir.mkdir(exist_ok=True)
    return logs_dir


def get_default_output_dir() -> Path:
    """Get the default output directory for edits."""
    return get_app_dir() / OUTPUT_FOLDER_NAME


def get_dictionaries_path() -> Path:
    """Get path to the bundled attribute dictionaries."""
    return get_bundle_dir() / "dictionaries.json"


def get_toy_params_path() -> Path:
    """Get path to the golden toy backend parameter file."""
    return get_bundle_dir() / "assets" / TOY_PARAMS_FILENAME


def get_config_path_from_env() -> Path | None:
    """Get the config file named by ALE_CONFIG, if set."""
    value = os.environ.get(CONFIG_ENV_VAR, "").strip()
    return Path(value) if value else None
