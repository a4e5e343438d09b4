"""
Tests for ALE-Bench: templates, manifests, scenario grids, runner and aggregation.
"""

import json
from unittest.mock import Mock

import numpy as np
import pytest

from src.bench import (
    TEMPLATES,
    AttributeDictionaries,
    ImageManifest,
    aggregate,
    find_reports,
    generate_cell,
    generate_scenarios,
    load_scenarios,
    render_prompt,
    run_benchmark,
    save_scenarios,
    scenario_id,
    with_article,
)
from src.config import EditConfig
from src.core.constants import EDIT_TYPES
from src.core.errors import ConfigError, ManifestError, MissingAttribute, RequestError
from src.core.files import save_image, save_mask_png
from src.masks import SegmenterMaskProvider
from src.metrics import LeakageReport
from src.pipeline import AlePipeline

OBJECTS = [
    {"name": "car", "color": "red", "material": "steel"},
    {"name": "dog", "color": "brown"},
    {"name": "vase", "material": "glass"},
]


def manifest_data(count: int) -> dict:
    return {"images": [
        {"id": f"img{i:02d}", "path": f"images/img{i:02d}.png", "objects": OBJECTS}
        for i in range(count)
    ]}


@pytest.fixture
def dictionaries():
    return AttributeDictionaries.load()


@pytest.fixture
def small_dictionaries():
    return AttributeDictionaries(
        colors=["red", "green", "blue", "brown", "white"],
        objects=["cat", "owl", "fox", "car"],
        materials=["gold", "wood", "glass", "steel", "clay"],
    )


@pytest.fixture
def bench_dir(temp_dir, source_image, two_object_masks):
    """One 128×128 image with three masked objects, written to disk."""
    save_image(temp_dir / "images" / "shapes.png", source_image)
    third = np.zeros((128, 128), dtype=bool)
    third[80:110, 10:40] = True
    names = ["square", "box", "tile"]
    for name, mask in zip(names, two_object_masks + [third]):
        save_mask_png(temp_dir / "masks" / f"shapes_{name}.png", mask)

    data = {"images": [{
        "id": "shapes",
        "path": "images/shapes.png",
        "objects": [{"name": n, "mask": f"masks/shapes_{n}.png"} for n in names],
    }]}
    (temp_dir / "manifest.json").write_text(json.dumps(data))
    return temp_dir


class TestPrompts:
    """Tests for target prompt templates."""

    @pytest.mark.parametrize("edit_type,attrs,expected", [
        ("color", {"color": "red"}, "red-colored car"),
        ("object", {"object": "tiger"}, "tiger"),
        ("material", {"material": "gold"}, "car made of gold"),
        ("color+object", {"color": "blue", "object": "bus"}, "blue-colored bus"),
        ("object+material", {"object": "owl", "material": "wood"}, "owl made of wood"),
    ])
    def test_render(self, edit_type, attrs, expected):
        assert render_prompt(edit_type, "car", attrs) == expected

    def test_every_edit_type_has_a_template(self):
        assert set(TEMPLATES) == {"color", "object", "material", "color+object", "object+material"}

    def test_missing_attribute(self):
        with pytest.raises(MissingAttribute):
            render_prompt("color+object", "car", {"color": "red"})

    def test_unknown_edit_type(self):
        with pytest.raises(RequestError):
            render_prompt("texture", "car", {})

    def test_articles(self):
        assert with_article("owl made of gold") == "an owl made of gold"
        assert with_article("red-colored car") == "a red-colored car"


class TestDictionaries:
    """Tests for AttributeDictionaries."""

    def test_bundled_dictionaries_load(self, dictionaries):
        assert "red" in dictionaries.colors
        assert "gold" in dictionaries.materials
        assert len(dictionaries.objects) >= 3

    def test_text_directory(self, temp_dir):
        for kind, lines in (("colors", "red\n# comment\nBlue\n"), ("objects", "cat\n"), ("materials", "gold\n")):
            (temp_dir / f"{kind}.txt").write_text(lines)
        loaded = AttributeDictionaries.load(temp_dir)
        assert loaded.colors == ("red", "blue")

    def test_duplicates_rejected(self):
        with pytest.raises(ConfigError):
            AttributeDictionaries(colors=["red", "Red"], objects=["cat"], materials=["gold"])

    def test_missing_kind(self):
        with pytest.raises(ConfigError):
            AttributeDictionaries.from_dict({"colors": ["red"], "objects": ["cat"]})


class TestManifest:
    """Tests for ImageManifest.load()."""

    def test_paths_resolve_against_manifest_dir(self, bench_dir):
        manifest = ImageManifest.load(bench_dir / "manifest.json")
        image = manifest.get("shapes")
        assert image.path == bench_dir / "images" / "shapes.png"
        assert image.objects[0].mask == bench_dir / "masks" / "shapes_square.png"

    def test_missing_file(self, temp_dir):
        with pytest.raises(ManifestError):
            ImageManifest.load(temp_dir / "nope.json")

    def test_invalid_json(self, temp_dir):
        path = temp_dir / "m.json"
        path.write_text("{not json")
        with pytest.raises(ManifestError):
            ImageManifest.load(path)

    def test_duplicate_image_ids(self, temp_dir):
        data = manifest_data(1)
        data["images"].append(dict(data["images"][0]))
        with pytest.raises(ManifestError):
            ImageManifest.from_dict(data, temp_dir)

    def test_object_without_name(self, temp_dir):
        with pytest.raises(ManifestError):
            ImageManifest.from_dict({"images": [{"id": "a", "path": "a.png", "objects": [{}]}]}, temp_dir)


class TestScenarioGeneration:
    """Tests for generate_scenarios()."""

    def test_full_grid_size(self, temp_dir, dictionaries):
        """20 images × 5 edit types × 3 object counts × 10 instances."""
        manifest = ImageManifest.from_dict(manifest_data(20), temp_dir)
        scenarios = generate_scenarios(manifest, dictionaries, seed=0)

        assert len(scenarios) == 3000
        assert len({s.scenario_id for s in scenarios}) == 3000
        assert {s.edit_type for s in scenarios} == set(EDIT_TYPES)
        assert "color+material" not in {s.edit_type for s in scenarios}
        assert all(s.edit_type.count("+") <= 1 for s in scenarios)

    def test_two_image_grid(self, temp_dir, dictionaries):
        manifest = ImageManifest.from_dict(manifest_data(2), temp_dir)
        scenarios = generate_scenarios(manifest, dictionaries, seed=0)

        assert len(scenarios) == 300
        for k in (1, 2, 3):
            assert sum(1 for s in scenarios if s.num_objects == k) == 100

    def test_same_seed_same_list(self, temp_dir, dictionaries):
        manifest = ImageManifest.from_dict(manifest_data(2), temp_dir)
        a = [s.to_dict() for s in generate_scenarios(manifest, dictionaries, seed=42)]
        b = [s.to_dict() for s in generate_scenarios(manifest, dictionaries, seed=42)]
        c = [s.to_dict() for s in generate_scenarios(manifest, dictionaries, seed=43)]
        assert a == b
        assert a != c

    def test_cells_independent_of_other_images(self, temp_dir, dictionaries):
        one = ImageManifest.from_dict(manifest_data(1), temp_dir)
        two = ImageManifest.from_dict(manifest_data(2), temp_dir)
        a = [s.to_dict() for s in generate_scenarios(one, dictionaries, seed=1)]
        b = [s.to_dict() for s in generate_scenarios(two, dictionaries, seed=1) if s.image_id == "img00"]
        assert a == b

    def test_existing_attributes_excluded(self, temp_dir, small_dictionaries):
        """A sampled color or material never equals the object's current one."""
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        image = manifest.images[0]
        for edit_type, kind in (("color", "color"), ("material", "material"), ("object", "object")):
            for scenario in generate_cell(image, edit_type, 3, small_dictionaries, seed=5):
                for obj in scenario.objects:
                    declared = next(o for o in image.objects if o.name == obj.source_object)
                    assert obj.attributes[kind] != declared.existing(kind)

    def test_no_repeats_within_scenario(self, temp_dir, small_dictionaries):
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        for scenario in generate_cell(manifest.images[0], "color+object", 3, small_dictionaries, seed=2):
            colors = [o.attributes["color"] for o in scenario.objects]
            objects = [o.attributes["object"] for o in scenario.objects]
            assert len(set(colors)) == 3
            assert len(set(objects)) == 3

    def test_prompts_follow_templates(self, temp_dir, dictionaries):
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        scenario = generate_cell(manifest.images[0], "material", 1, dictionaries, seed=0, instances=1)[0]
        obj = scenario.objects[0]
        assert obj.target_phrase == f"{obj.source_object} made of {obj.attributes['material']}"
        assert scenario.pairs[0].source_text == with_article(obj.source_object)
        assert scenario.target_prompts == [with_article(obj.target_phrase)]

    def test_too_few_objects(self, temp_dir, dictionaries):
        data = {"images": [{"id": "a", "path": "a.png", "objects": OBJECTS[:2]}]}
        manifest = ImageManifest.from_dict(data, temp_dir)
        with pytest.raises(ManifestError):
            generate_scenarios(manifest, dictionaries, seed=0)

    def test_dictionary_too_small(self, temp_dir):
        tiny = AttributeDictionaries(colors=["red", "blue"], objects=["cat"], materials=["gold"])
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        with pytest.raises(ManifestError):
            generate_cell(manifest.images[0], "color", 3, tiny, seed=0)

    def test_scenario_ids_are_filename_safe(self):
        assert scenario_id("kitchen", "color+object", 2, 3) == "kitchen_color-object_k2_03"

    def test_save_load(self, temp_dir, dictionaries):
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        scenarios = generate_scenarios(manifest, dictionaries, seed=0, edit_types=["color"], object_counts=[2])
        save_scenarios(temp_dir / "scenarios.json", scenarios, seed=0)
        loaded = load_scenarios(temp_dir / "scenarios.json")
        assert [s.to_dict() for s in loaded] == [s.to_dict() for s in scenarios]


class TestAggregate:
    """Tests for aggregate()."""

    def reports(self):
        return [
            LeakageReport("a", "i", "color", 1, 0, tels=10.0, tils=None, editing_performance=50.0, psnr=30.0),
            LeakageReport("b", "i", "color", 2, 0, tels=20.0, tils=40.0, editing_performance=60.0, psnr=40.0),
            LeakageReport("c", "i", "object", 2, 0, tels=30.0, tils=20.0, editing_performance=70.0, psnr=None),
        ]

    def test_means_match_recomputation(self):
        rows = aggregate(self.reports())
        by_key = {(r.group_by, r.group): r for r in rows}

        overall = by_key[("all", "all")]
        assert overall.count == 3
        assert overall.means["tels"] == pytest.approx(20.0)
        assert overall.means["tils"] == pytest.approx(30.0)
        assert overall.means["psnr"] == pytest.approx(35.0)
        assert overall.means["lpips"] is None

        assert by_key[("edit_type", "color")].means["tels"] == pytest.approx(15.0)
        assert by_key[("edit_type", "color")].means["tils"] == pytest.approx(40.0)
        assert by_key[("num_objects", "2")].means["editing_performance"] == pytest.approx(65.0)

    def test_row_order(self):
        rows = aggregate(self.reports())
        assert [(r.group_by, r.group) for r in rows] == [
            ("all", "all"),
            ("edit_type", "color"),
            ("edit_type", "object"),
            ("num_objects", "1"),
            ("num_objects", "2"),
        ]

    def test_csv_row_leaves_missing_metrics_blank(self):
        row = aggregate(self.reports())[0].csv_row()
        assert row["tels"] == "20.000000"
        assert row["lpips"] == ""

    def test_empty(self):
        assert aggregate([]) == []


class TestRunBenchmark:
    """Tests for run_benchmark() on the toy backend."""

    CONFIG = EditConfig(num_steps=2)

    def scenarios(self, bench_dir, dictionaries):
        manifest = ImageManifest.load(bench_dir / "manifest.json")
        return generate_scenarios(
            manifest, dictionaries, seed=0, edit_types=["color"], object_counts=[1, 2], instances=2,
        )

    def factory(self, toy_backend, mock_encoder, calls=None):
        def make():
            if calls is not None:
                calls.append(1)
            return AlePipeline(toy_backend, mock_encoder)
        return make

    def test_no_scenarios(self, temp_dir, mock_scorer):
        summary = run_benchmark([], lambda: None, mock_scorer, temp_dir / "out", show_progress=False)
        assert summary.outcomes == []
        assert (temp_dir / "out" / "aggregate.csv").read_text().startswith("group_by,group,count,tels")

    def test_reports_and_aggregate_written(self, bench_dir, dictionaries, toy_backend, mock_encoder, mock_scorer):
        out = bench_dir / "out"
        scenarios = self.scenarios(bench_dir, dictionaries)
        summary = run_benchmark(
            scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, out,
            config=self.CONFIG, config_hash="abc", show_progress=False, save_images=True,
        )

        assert summary.completed == 4
        assert not summary.failed
        for scenario in scenarios:
            report = json.loads((out / "reports" / f"{scenario.scenario_id}.json").read_text())
            assert report["config_hash"] == "abc"
            assert report["seed"] == scenario.seed
            assert (out / "images" / f"{scenario.scenario_id}.png").exists()
        assert [r.scenario_id for r in find_reports(out)] == sorted(s.scenario_id for s in scenarios)
        assert summary.rows[0].count == 4

    def test_resume_skips_finished_and_matches(self, bench_dir, dictionaries, toy_backend, mock_encoder, mock_scorer):
        """An interrupted run resumed later writes the same aggregate as an uninterrupted one."""
        scenarios = self.scenarios(bench_dir, dictionaries)
        full = bench_dir / "full"
        run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, full,
                      config=self.CONFIG, config_hash="h", show_progress=False)

        partial = bench_dir / "partial"
        run_benchmark(scenarios[:2], self.factory(toy_backend, mock_encoder), mock_scorer, partial,
                      config=self.CONFIG, config_hash="h", show_progress=False)
        resumed = run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, partial,
                                config=self.CONFIG, config_hash="h", show_progress=False)

        assert resumed.resumed == 2
        assert resumed.completed == 2
        assert (partial / "aggregate.csv").read_bytes() == (full / "aggregate.csv").read_bytes()

        calls = []
        again = run_benchmark(scenarios, self.factory(toy_backend, mock_encoder, calls), mock_scorer, partial,
                              config=self.CONFIG, config_hash="h", show_progress=False)
        assert again.completed == 0
        assert calls == []
        assert (partial / "aggregate.csv").read_bytes() == (full / "aggregate.csv").read_bytes()

    def test_config_change_reruns(self, bench_dir, dictionaries, toy_backend, mock_encoder, mock_scorer):
        scenarios = self.scenarios(bench_dir, dictionaries)[:1]
        out = bench_dir / "out"
        run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, out,
                      config=self.CONFIG, config_hash="one", show_progress=False)
        summary = run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, out,
                                config=self.CONFIG, config_hash="two", show_progress=False)
        assert summary.completed == 1
        assert summary.resumed == 0

    def test_parallel_matches_serial(self, bench_dir, dictionaries, toy_backend, mock_encoder, mock_scorer):
        scenarios = self.scenarios(bench_dir, dictionaries)
        run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, bench_dir / "serial",
                      config=self.CONFIG, show_progress=False)
        run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, bench_dir / "parallel",
                      config=self.CONFIG, workers=3, show_progress=False)
        assert (bench_dir / "serial" / "aggregate.csv").read_bytes() == \
            (bench_dir / "parallel" / "aggregate.csv").read_bytes()

    def test_failures_recorded(self, temp_dir, source_image, dictionaries, toy_backend, mock_encoder, mock_scorer):
        """Scenarios without masks fail with a tag; a failing segmenter is tagged fallback_none."""
        save_image(temp_dir / "images" / "img00.png", source_image)
        manifest = ImageManifest.from_dict(manifest_data(1), temp_dir)
        scenarios = generate_scenarios(manifest, dictionaries, seed=0, edit_types=["color"], object_counts=[1], instances=1)

        summary = run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, temp_dir / "a",
                                config=self.CONFIG, show_progress=False)
        assert summary.failed[0].error_tag == "RequestError"

        client = Mock()
        client.segment.return_value = None
        summary = run_benchmark(scenarios, self.factory(toy_backend, mock_encoder), mock_scorer, temp_dir / "b",
                                config=self.CONFIG, show_progress=False,
                                mask_provider_factory=lambda s: SegmenterMaskProvider(client))
        assert summary.failed[0].error_tag == "fallback_none"
        failures = (temp_dir / "b" / "failures.csv").read_text().splitlines()
        assert failures[0] == "scenario_id,error_tag,message"
        assert failures[1].startswith(f"{scenarios[0].scenario_id},fallback_none,")
