"""
File system utilities for ALE Edit.
"""

import json
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .errors import MaskShapeError, RequestError


def write_json_atomic(path: Path, data, indent: int = 2):
    """Atomic write: write to .tmp file, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_file = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_file, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=indent, sort_keys=True)
        f.write("\n")
    tmp_file.replace(path)


def read_json(path: Path) -> Optional[dict]:
    """Read a JSON object, or None if missing or unreadable."""
    if not path.exists():
        return None
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, IOError):
        return None
    return data if isinstance(data, dict) else None


def load_image(path: Path) -> np.ndarray:
    """Load an RGB image as float32 H×W×3 in [0, 1]; RequestError if unreadable."""
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float32)
    except OSError as e:
        raise RequestError(f"Cannot read image {Path(path).name}: {e}") from e
    return rgb / 255.0


def save_image(path: Path, image: np.ndarray):
    """Save a float H×W×3 image in [0, 1] as an 8-bit PNG."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data).save(path, format="PNG")


def load_mask_png(path: Path) -> np.ndarray:
    """Load an 8-bit single-channel PNG mask; nonzero is foreground."""
    try:
        with Image.open(path) as img:
            data = np.asarray(img.convert("L"))
    except OSError as e:
        raise MaskShapeError(f"Cannot read mask {Path(path).name}: {e}") from e
    return (data > 0).astype(np.uint8)


def save_mask_png(path: Path, mask: np.ndarray):
    """Save a binary mask as an 8-bit PNG (255 = foreground)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = (np.asarray(mask) > 0).astype(np.uint8) * 255
    Image.fromarray(data).save(path, format="PNG")


def resize_image(image: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Resize a float H×W×3 image to (height, width), channel by channel."""
    height, width = size
    if image.shape[:2] == (height, width):
        return np.asarray(image, dtype=np.float64)
    channels = []
    for c in range(image.shape[2]):
        plane = Image.fromarray(np.asarray(image[:, :, c], dtype=np.float32))
        channels.append(np.asarray(plane.resize((width, height), resample=Image.Resampling.BILINEAR)))
    return np.clip(np.stack(channels, axis=-1).astype(np.float64), 0.0, 1.0)
