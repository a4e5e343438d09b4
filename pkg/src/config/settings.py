"""
Command-line configuration for ALE Edit.

Values come from three places, highest priority first:
- command-line flags
- a JSON config file (--config PATH, or the ALE_CONFIG environment variable)
- built-in defaults

Config files use dotted keys, either flat ({"edit.num_steps": 10}) or nested
({"edit": {"num_steps": 10}}).
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from ..core.errors import ConfigError
from ..core.hashing import sha256_hex
from ..core.logging import warn
from ..core.paths import get_config_path_from_env
from .backend import ToyBackendConfig
from .edit import EditConfig

BACKEND_KINDS = ("toy", "real")
ENCODER_KINDS = ("mock", "clip")
SCORER_KINDS = ("mock", "clip")

DEFAULT_REAL_MODEL_ID = "SimianLuo/LCM_Dreamshaper_v7"
DEFAULT_CLIP_MODEL_ID = "openai/clip-vit-large-patch14"


@dataclass
class CliConfig:
    """Resolved configuration for one CLI invocation."""
    backend_kind: str = "toy"
    encoder_kind: str = "mock"
    scorer_kind: str = "mock"
    segmenter_endpoint: Optional[str] = None
    segmenter_timeout: int = 60
    mask_dir: Optional[Path] = None
    out_dir: Optional[Path] = None
    workers: int = 1
    real_model_id: str = DEFAULT_REAL_MODEL_ID
    clip_model_id: str = DEFAULT_CLIP_MODEL_ID
    device: str = "cpu"
    edit: EditConfig = field(default_factory=EditConfig)
    toy: ToyBackendConfig = field(default_factory=ToyBackendConfig)

    def validate(self) -> "CliConfig":
        if self.backend_kind not in BACKEND_KINDS:
            raise ConfigError(f"backend.kind must be one of {BACKEND_KINDS}, got '{self.backend_kind}'")
        if self.encoder_kind not in ENCODER_KINDS:
            raise ConfigError(f"encoder.kind must be one of {ENCODER_KINDS}, got '{self.encoder_kind}'")
        if self.scorer_kind not in SCORER_KINDS:
            raise ConfigError(f"scorer.kind must be one of {SCORER_KINDS}, got '{self.scorer_kind}'")
        if self.workers < 1:
            raise ConfigError(f"bench.workers must be at least 1, got {self.workers}")
        self.edit.validate()
        self.toy.validate()
        return self


# ============================================================================
# Value coercion
# ============================================================================

def _to_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer, got a boolean")
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"expected an integer, got {value}")
    return int(value)


def _to_float(value) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number, got a boolean")
    return float(value)


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _to_str(value) -> str:
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {value!r}")
    return value


def _to_path(value) -> Path:
    return Path(value)


def _optional(convert: Callable) -> Callable:
    def inner(value):
        if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none", "null")):
            return None
        return convert(value)
    return inner


def _to_shape(value) -> tuple:
    return tuple(_to_int(v) for v in value)


def _to_resolutions(value) -> tuple:
    return tuple(_to_shape(v) for v in value)


# Dotted key -> (section, attribute, converter); section None = CliConfig itself
_KEYS: dict[str, tuple[Optional[str], str, Callable]] = {
    "backend.kind": (None, "backend_kind", _to_str),
    "encoder.kind": (None, "encoder_kind", _to_str),
    "scorer.kind": (None, "scorer_kind", _to_str),
    "segmenter.endpoint": (None, "segmenter_endpoint", _optional(_to_str)),
    "segmenter.timeout": (None, "segmenter_timeout", _to_int),
    "masks.dir": (None, "mask_dir", _optional(_to_path)),
    "output.dir": (None, "out_dir", _optional(_to_path)),
    "bench.workers": (None, "workers", _to_int),
    "real.model_id": (None, "real_model_id", _to_str),
    "real.clip_model_id": (None, "clip_model_id", _to_str),
    "real.device": (None, "device", _to_str),
    "edit.num_steps": ("edit", "num_steps", _to_int),
    "edit.schedule_fraction": ("edit", "schedule_fraction", _optional(_to_float)),
    "edit.dilation_ratio": ("edit", "dilation_ratio", _to_float),
    "edit.eos_strategy": ("edit", "eos_strategy", _to_str),
    "edit.guidance_scale": ("edit", "guidance_scale", _optional(_to_float)),
    "edit.seed": ("edit", "seed", _to_int),
    "edit.use_rgb_cam": ("edit", "use_rgb_cam", _to_bool),
    "edit.use_bb": ("edit", "use_bb", _to_bool),
    "toy.latent_shape": ("toy", "latent_shape", _to_shape),
    "toy.attention_resolutions": ("toy", "attention_resolutions", _to_resolutions),
    "toy.embed_width": ("toy", "embed_width", _to_int),
    "toy.prompt_length": ("toy", "prompt_length", _to_int),
    "toy.hidden_width": ("toy", "hidden_width", _to_int),
    "toy.image_scale": ("toy", "image_scale", _to_int),
    "toy.seed": ("toy", "seed", _to_int),
    "toy.encoder_seed": ("toy", "encoder_seed", _to_int),
}


def flatten_keys(data: dict, prefix: str = "") -> dict[str, Any]:
    """Flatten nested dicts into dotted keys."""
    flat = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_keys(value, prefix=f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def apply_values(config: CliConfig, values: dict[str, Any], source: str):
    """Apply dotted-key values to config. Unknown keys are skipped with a warning."""
    for key, value in values.items():
        if key not in _KEYS:
            warn(f"Ignoring unknown config key '{key}' ({source})")
            continue
        section, attr, convert = _KEYS[key]
        try:
            converted = convert(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid value for '{key}' ({source}): {e}") from e
        target = getattr(config, section) if section else config
        setattr(target, attr, converted)


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON config file into dotted keys."""
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, IOError) as e:
        raise ConfigError(f"Could not read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return flatten_keys(data)


def resolve_cli_config(
    flags: Optional[dict[str, Any]] = None,
    config_path: Optional[Path] = None,
    use_env: bool = True,
) -> CliConfig:
    """
    Build a CliConfig from defaults, an optional config file and flags.

    Args:
        flags: Dotted key -> value from the command line; None values mean
               "flag not given" and do not override anything
        config_path: Explicit config file (beats ALE_CONFIG)
        use_env: Consult ALE_CONFIG when no explicit path is given

    Returns:
        Validated CliConfig
    """
    config = CliConfig()

    path = config_path
    if path is None and use_env:
        path = get_config_path_from_env()
    if path is not None:
        apply_values(config, load_config_file(Path(path)), source=str(path))

    if flags:
        apply_values(config, {k: v for k, v in flags.items() if v is not None}, source="flag")

    return config.validate()


def config_hash(edit: EditConfig, backend: dict) -> str:
    """SHA-256 over the resolved edit config and the backend description."""
    return sha256_hex({"edit": edit.to_dict(), "backend": backend})


def describe_config(config: CliConfig) -> dict:
    """JSON-safe view of a CliConfig."""
    data = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if isinstance(value, (EditConfig, ToyBackendConfig)):
            value = value.to_dict()
        elif isinstance(value, Path):
            value = str(value)
        data[f.name] = value
    return data
