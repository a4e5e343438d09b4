"""
ALE-Bench scenario generation.

The grid is image × edit type × object count × instance. Every cell draws
its instances from its own seeded generator, so a cell's scenarios do not
depend on which other images or types are in the manifest.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..core.constants import EDIT_TYPES, INSTANCES_PER_CELL, OBJECT_COUNTS
from ..core.errors import ManifestError
from ..core.files import write_json_atomic
from ..core.formatting import sanitize_filename
from ..core.hashing import derive_seed
from ..prompts.pairs import ObjectPromptPair
from .dictionaries import AttributeDictionaries
from .manifest import ImageManifest, ManifestImage
from .prompts import ATTRIBUTE_KINDS, DICTIONARY_FOR, render_prompt, source_prompt, with_article

SCENARIOS_VERSION = 1


@dataclass
class ScenarioObject:
    index: int  # 1-based
    source_object: str
    attributes: dict[str, str]
    target_phrase: str  # bare template rendering, e.g. "red-colored car"
    mask: Optional[str] = None
    phrase: Optional[str] = None

    @property
    def source_prompt(self) -> str:
        return source_prompt(self.source_object)

    @property
    def target_prompt(self) -> str:
        return with_article(self.target_phrase)

    def to_pair(self) -> ObjectPromptPair:
        return ObjectPromptPair(self.source_prompt, self.target_prompt, self.index, self.phrase)

    def to_dict(self) -> dict:
        d = {
            "index": self.index,
            "source_object": self.source_object,
            "attributes": dict(sorted(self.attributes.items())),
            "target_phrase": self.target_phrase,
        }
        if self.mask:
            d["mask"] = self.mask
        if self.phrase:
            d["phrase"] = self.phrase
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioObject":
        return cls(
            index=int(data["index"]),
            source_object=data["source_object"],
            attributes=dict(data.get("attributes", {})),
            target_phrase=data["target_phrase"],
            mask=data.get("mask"),
            phrase=data.get("phrase"),
        )


@dataclass
class Scenario:
    scenario_id: str
    image_id: str
    image_path: str
    edit_type: str
    num_objects: int
    instance: int  # 1..INSTANCES_PER_CELL
    seed: int
    objects: list[ScenarioObject] = field(default_factory=list)

    @property
    def pairs(self) -> list[ObjectPromptPair]:
        return [o.to_pair() for o in self.objects]

    @property
    def target_prompts(self) -> list[str]:
        return [o.target_prompt for o in self.objects]

    @property
    def mask_paths(self) -> Optional[list[Path]]:
        """Per-object mask files, or None unless every object has one."""
        if all(o.mask for o in self.objects):
            return [Path(o.mask) for o in self.objects]
        return None

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "image_id": self.image_id,
            "image_path": self.image_path,
            "edit_type": self.edit_type,
            "num_objects": self.num_objects,
            "instance": self.instance,
            "seed": self.seed,
            "objects": [o.to_dict() for o in self.objects],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            return cls(
                scenario_id=data["scenario_id"],
                image_id=data["image_id"],
                image_path=data["image_path"],
                edit_type=data["edit_type"],
                num_objects=int(data["num_objects"]),
                instance=int(data["instance"]),
                seed=int(data["seed"]),
                objects=[ScenarioObject.from_dict(o) for o in data.get("objects", [])],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"Invalid scenario record: {e}") from e


def scenario_id(image_id: str, edit_type: str, num_objects: int, instance: int) -> str:
    return sanitize_filename(f"{image_id}_{edit_type}_k{num_objects}_{instance:02d}")


def _sample_attributes(
    rng: np.random.Generator,
    edit_type: str,
    objects: Sequence,
    dictionaries: AttributeDictionaries,
) -> list[dict[str, str]]:
    """One attribute dict per object; no value repeats within the scenario."""
    used: dict[str, set] = {kind: set() for kind in ATTRIBUTE_KINDS[edit_type]}
    sampled = []
    for obj in objects:
        attrs = {}
        for kind in ATTRIBUTE_KINDS[edit_type]:
            existing = obj.existing(kind)
            candidates = [
                e for e in dictionaries.entries(DICTIONARY_FOR[kind])
                if e != existing and e not in used[kind]
            ]
            if not candidates:
                raise ManifestError(
                    f"Dictionary '{DICTIONARY_FOR[kind]}' is too small for {len(objects)} objects"
                )
            value = candidates[int(rng.integers(len(candidates)))]
            used[kind].add(value)
            attrs[kind] = value
        sampled.append(attrs)
    return sampled


def generate_cell(
    image: ManifestImage,
    edit_type: str,
    num_objects: int,
    dictionaries: AttributeDictionaries,
    seed: int,
    instances: int = INSTANCES_PER_CELL,
) -> list[Scenario]:
    """Instances for one (image, edit type, K) cell."""
    if len(image.objects) < num_objects:
        raise ManifestError(
            f"Image '{image.id}' declares {len(image.objects)} objects; {num_objects} needed"
        )
    rng = np.random.default_rng(derive_seed(seed, image.id, edit_type, num_objects))
    scenarios = []
    for instance in range(1, instances + 1):
        chosen = sorted(rng.choice(len(image.objects), size=num_objects, replace=False).tolist())
        objects = [image.objects[i] for i in chosen]
        attributes = _sample_attributes(rng, edit_type, objects, dictionaries)

        sid = scenario_id(image.id, edit_type, num_objects, instance)
        scenarios.append(Scenario(
            scenario_id=sid,
            image_id=image.id,
            image_path=str(image.path),
            edit_type=edit_type,
            num_objects=num_objects,
            instance=instance,
            seed=derive_seed(seed, sid),
            objects=[
                ScenarioObject(
                    index=k,
                    source_object=obj.name,
                    attributes=attrs,
                    target_phrase=render_prompt(edit_type, obj.name, attrs),
                    mask=str(obj.mask) if obj.mask else None,
                    phrase=obj.phrase,
                )
                for k, (obj, attrs) in enumerate(zip(objects, attributes), start=1)
            ],
        ))
    return scenarios


def generate_scenarios(
    manifest: ImageManifest,
    dictionaries: AttributeDictionaries,
    seed: int,
    edit_types: Sequence[str] = EDIT_TYPES,
    object_counts: Sequence[int] = OBJECT_COUNTS,
    instances: int = INSTANCES_PER_CELL,
) -> list[Scenario]:
    """
    Generate the full scenario grid.

    Args:
        manifest: Images with their declared objects
        dictionaries: Target attribute pools
        seed: Grid seed; the same seed reproduces the same list
        edit_types / object_counts / instances: Restrict the grid

    Returns:
        Scenarios ordered by image, edit type, K, instance
    """
    unknown = [t for t in edit_types if t not in EDIT_TYPES]
    if unknown:
        raise ManifestError(f"Unknown edit types: {', '.join(unknown)}")

    scenarios = []
    for image in manifest.images:
        for edit_type in edit_types:
            for k in object_counts:
                scenarios.extend(generate_cell(image, edit_type, k, dictionaries, seed, instances))
    return scenarios


def save_scenarios(path: Path, scenarios: list[Scenario], seed: int):
    """Write a scenario file atomically."""
    write_json_atomic(Path(path), {
        "version": SCENARIOS_VERSION,
        "seed": seed,
        "count": len(scenarios),
        "scenarios": [s.to_dict() for s in scenarios],
    })


def load_scenarios(path: Path) -> list[Scenario]:
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"Scenario file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ManifestError(f"Invalid scenario file {path}: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("scenarios"), list):
        raise ManifestError(f"Scenario file {path} has no 'scenarios' list")
    return [Scenario.from_dict(d) for d in data["scenarios"]]
