"""
Image manifest for ALE-Bench.

The image manifest is a JSON file declaring each image and its maskable
objects. Relative paths resolve against the manifest's directory:

    {
      "images": [
        {
          "id": "kitchen",
          "path": "images/kitchen.png",
          "objects": [
            {"name": "teapot", "mask": "masks/kitchen_teapot.png", "color": "white"},
            {"name": "cup", "mask": "masks/kitchen_cup.png", "phrase": "small cup"}
          ]
        }
      ]
    }

Optional per-object keys: "color" / "material" (existing attributes, never
sampled as targets) and "phrase" (segmentation phrase).
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..core.errors import ManifestError


@dataclass
class ManifestObject:
    name: str
    mask: Optional[Path] = None
    color: Optional[str] = None
    material: Optional[str] = None
    phrase: Optional[str] = None

    def existing(self, kind: str) -> Optional[str]:
        """Current value of an attribute kind ('object' is the name itself)."""
        if kind == "object":
            return self.name
        return getattr(self, kind, None)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path) -> "ManifestObject":
        name = str(data.get("name", "")).strip()
        if not name:
            raise ManifestError("Every object needs a non-empty 'name'")
        mask = data.get("mask")
        return cls(
            name=name,
            mask=(base_dir / mask) if mask else None,
            color=data.get("color"),
            material=data.get("material"),
            phrase=data.get("phrase"),
        )


@dataclass
class ManifestImage:
    id: str
    path: Path
    objects: list[ManifestObject] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path) -> "ManifestImage":
        image_id = str(data.get("id", "")).strip()
        if not image_id:
            raise ManifestError("Every image needs a non-empty 'id'")
        if "path" not in data:
            raise ManifestError(f"Image '{image_id}' has no 'path'")
        objects = [ManifestObject.from_dict(o, base_dir) for o in data.get("objects", [])]
        names = [o.name for o in objects]
        if len(set(names)) != len(names):
            raise ManifestError(f"Image '{image_id}' declares an object twice")
        return cls(id=image_id, path=base_dir / data["path"], objects=objects)


@dataclass
class ImageManifest:
    images: list[ManifestImage]
    path: Optional[Path] = None

    def get(self, image_id: str) -> ManifestImage:
        for image in self.images:
            if image.id == image_id:
                return image
        raise ManifestError(f"Image '{image_id}' is not in the manifest")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path) -> "ImageManifest":
        if not isinstance(data, dict) or not isinstance(data.get("images"), list):
            raise ManifestError("Manifest must be an object with an 'images' list")
        images = [ManifestImage.from_dict(d, base_dir) for d in data["images"]]
        ids = [image.id for image in images]
        if len(set(ids)) != len(ids):
            raise ManifestError("Manifest declares an image id twice")
        return cls(images=images)

    @classmethod
    def load(cls, path: Path) -> "ImageManifest":
        path = Path(path)
        if not path.exists():
            raise ManifestError(f"Manifest not found: {path}")
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ManifestError(f"Invalid manifest {path}: {e}") from e
        manifest = cls.from_dict(data, path.parent)
        manifest.path = path
        return manifest

