"""
Configuration management for ALE Edit.

- EditConfig: per-edit sampler, schedule and mask settings
- ToyBackendConfig: shapes and seeds of the toy diffusion stack
- CliConfig: everything a CLI invocation needs, resolved from
  flags > config file (--config / ALE_CONFIG) > defaults
"""

from .edit import EditConfig
from .backend import ToyBackendConfig
from .settings import (
    CliConfig,
    BACKEND_KINDS,
    ENCODER_KINDS,
    SCORER_KINDS,
    resolve_cli_config,
    load_config_file,
    flatten_keys,
    config_hash,
    describe_config,
)

__all__ = [
    "EditConfig",
    "ToyBackendConfig",
    "CliConfig",
    "BACKEND_KINDS",
    "ENCODER_KINDS",
    "SCORER_KINDS",
    "resolve_cli_config",
    "load_config_file",
    "flatten_keys",
    "config_hash",
    "describe_config",
]
