"""
Core utilities for ALE Edit.

Shared constants, errors, paths, file I/O, hashing and formatting.
"""

from .constants import (
    PROMPT_LENGTH,
    BOS_TOKEN_ID,
    EOS_TOKEN_ID,
    CONNECTIVE,
    EOS_STRATEGIES,
    EDIT_TYPES,
    SCHEDULE_BY_EDIT_TYPE,
    DEFAULT_EDIT_TYPE,
    DEFAULT_NUM_STEPS,
    DEFAULT_DILATION_RATIO,
    MASK_THRESHOLD,
    PSNR_CAP,
)

from .errors import (
    AleError,
    RequestError,
    EmptyRequest,
    PromptOverflowError,
    EncoderShapeError,
    MissingStrippedPrompt,
    MaskShapeError,
    SegmenterUnavailable,
    PartitionError,
    ShapeError,
    RangeError,
    ScheduleError,
    BackendError,
    EmptyBackground,
    MissingAttribute,
    ManifestError,
    ConfigError,
)

from .paths import (
    get_app_dir,
    get_bundle_dir,
    get_data_dir,
    get_logs_dir,
    get_default_output_dir,
    get_dictionaries_path,
    get_toy_params_path,
    get_config_path_from_env,
)

from .files import (
    write_json_atomic,
    read_json,
    load_image,
    save_image,
    load_mask_png,
    save_mask_png,
    resize_image,
)

from .hashing import stable_hash, derive_seed, canonical_json, sha256_hex, hash_uniforms

from .formatting import sanitize_filename, format_duration, format_score, format_table

__all__ = [
    # Constants
    "PROMPT_LENGTH",
    "BOS_TOKEN_ID",
    "EOS_TOKEN_ID",
    "CONNECTIVE",
    "EOS_STRATEGIES",
    "EDIT_TYPES",
    "SCHEDULE_BY_EDIT_TYPE",
    "DEFAULT_EDIT_TYPE",
    "DEFAULT_NUM_STEPS",
    "DEFAULT_DILATION_RATIO",
    "MASK_THRESHOLD",
    "PSNR_CAP",
    # Errors
    "AleError",
    "RequestError",
    "EmptyRequest",
    "PromptOverflowError",
    "EncoderShapeError",
    "MissingStrippedPrompt",
    "MaskShapeError",
    "SegmenterUnavailable",
    "PartitionError",
    "ShapeError",
    "RangeError",
    "ScheduleError",
    "BackendError",
    "EmptyBackground",
    "MissingAttribute",
    "ManifestError",
    "ConfigError",
    # Paths
    "get_app_dir",
    "get_bundle_dir",
    "get_data_dir",
    "get_logs_dir",
    "get_default_output_dir",
    "get_dictionaries_path",
    "get_toy_params_path",
    "get_config_path_from_env",
    # Files
    "write_json_atomic",
    "read_json",
    "load_image",
    "save_image",
    "load_mask_png",
    "save_mask_png",
    "resize_image",
    # Hashing
    "stable_hash",
    "derive_seed",
    "canonical_json",
    "sha256_hex",
    "hash_uniforms",
    # Formatting
    "sanitize_filename",
    "format_duration",
    "format_score",
    "format_table",
]
