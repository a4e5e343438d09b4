"""
Attribute dictionaries for benchmark target prompts.

Either one JSON file {"colors": [...], "objects": [...], "materials": [...]}
or a directory holding colors.txt / objects.txt / materials.txt (one entry
per line, '#' comments allowed).
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..core.errors import ConfigError
from ..core.paths import get_dictionaries_path

DICTIONARY_KINDS = ("colors", "objects", "materials")


def _clean(entries, kind: str) -> tuple[str, ...]:
    if not isinstance(entries, list):
        raise ConfigError(f"Dictionary '{kind}' must be a list")
    cleaned = tuple(str(e).strip().lower() for e in entries if str(e).strip())
    if not cleaned:
        raise ConfigError(f"Dictionary '{kind}' is empty")
    if len(set(cleaned)) != len(cleaned):
        dupes = sorted({e for e in cleaned if cleaned.count(e) > 1})
        raise ConfigError(f"Dictionary '{kind}' has duplicate entries: {', '.join(dupes)}")
    return cleaned


@dataclass(frozen=True)
class AttributeDictionaries:
    colors: tuple[str, ...]
    objects: tuple[str, ...]
    materials: tuple[str, ...]

    def __post_init__(self):
        for kind in DICTIONARY_KINDS:
            object.__setattr__(self, kind, _clean(list(getattr(self, kind)), kind))

    def entries(self, kind: str) -> tuple[str, ...]:
        return getattr(self, kind)

    def to_dict(self) -> dict:
        return {kind: list(getattr(self, kind)) for kind in DICTIONARY_KINDS}

    @classmethod
    def from_dict(cls, data: dict) -> "AttributeDictionaries":
        missing = [kind for kind in DICTIONARY_KINDS if kind not in data]
        if missing:
            raise ConfigError(f"Dictionaries missing: {', '.join(missing)}")
        return cls(**{kind: data[kind] for kind in DICTIONARY_KINDS})

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "AttributeDictionaries":
        """
        Load dictionaries from a JSON file or a directory of .txt lists.

        Args:
            path: File or directory; defaults to the bundled dictionaries.json
        """
        path = Path(path) if path else get_dictionaries_path()
        if path.is_dir():
            data = {}
            for kind in DICTIONARY_KINDS:
                txt = path / f"{kind}.txt"
                if not txt.exists():
                    raise ConfigError(f"Missing dictionary file: {txt}")
                lines = txt.read_text(encoding="utf-8").splitlines()
                data[kind] = [line for line in lines if line.strip() and not line.lstrip().startswith("#")]
            return cls.from_dict(data)

        if not path.exists():
            raise ConfigError(f"Dictionaries not found: {path}")
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid dictionaries file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Dictionaries file {path} must hold a JSON object")
        return cls.from_dict(data)
