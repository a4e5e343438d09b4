"""
Tests for the `ale` command line.
"""

import json
import os
import re
from unittest.mock import patch

import numpy as np
import pytest

from src.cli import main
from src.cli.bench import variant_name
from src.cli.edit import EXIT_INVALID, EXIT_OK, parse_pairs
from src.config import EditConfig
from src.core.errors import RequestError
from src.core.files import save_image, save_mask_png


@pytest.fixture(autouse=True)
def no_env():
    env = {k: v for k, v in os.environ.items() if k != "ALE_CONFIG"}
    with patch.dict(os.environ, env, clear=True):
        yield


@pytest.fixture
def edit_inputs(temp_dir, source_image, two_object_masks):
    """cats.png plus masks/cats_obj1.png and masks/cats_obj2.png."""
    save_image(temp_dir / "cats.png", source_image)
    for i, mask in enumerate(two_object_masks, start=1):
        save_mask_png(temp_dir / "masks" / f"cats_obj{i}.png", mask)
    return temp_dir


def edit_argv(root, *extra):
    return [
        "edit",
        "--image", str(root / "cats.png"),
        "--pair", "a red square->a green square",
        "--pair", "a blue square->a yellow square",
        "--masks", str(root / "masks"),
        "--steps", "3",
        "--out", str(root / "out"),
        *extra,
    ]


class TestParsePairs:
    """Tests for parse_pairs()."""

    def test_pairs_are_indexed(self):
        pairs = parse_pairs(["a cat -> a tiger", "a dog->a wolf"], [])
        assert [(p.source_text, p.target_text, p.index) for p in pairs] == [
            ("a cat", "a tiger", 1),
            ("a dog", "a wolf", 2),
        ]

    def test_phrases_attached(self):
        pairs = parse_pairs(["a cat->a tiger"], ["cat"])
        assert pairs[0].phrase == "cat"

    def test_missing_separator(self):
        with pytest.raises(RequestError):
            parse_pairs(["a cat"], [])

    def test_phrase_count_mismatch(self):
        with pytest.raises(RequestError):
            parse_pairs(["a cat->a tiger", "a dog->a wolf"], ["cat"])


class TestEditCommand:
    """Tests for `ale edit`."""

    def test_writes_image_and_sidecar(self, edit_inputs, capsys):
        assert main(edit_argv(edit_inputs)) == EXIT_OK

        out = edit_inputs / "out"
        assert (out / "cats_edited.png").exists()
        sidecar = json.loads((out / "cats_edited.json").read_text())
        assert sidecar["image_id"] == "cats"
        assert sidecar["edit_type"] == "object"
        assert sidecar["schedule_fraction"] == 0.5
        assert sidecar["config"]["num_steps"] == 3
        assert sidecar["provenance"] == "file"
        assert sidecar["fallback_reason"] is None
        assert len(sidecar["config_hash"]) == 64
        assert [p["target"] for p in sidecar["pairs"]] == ["a green square", "a yellow square"]
        assert "Edited" in capsys.readouterr().out

    def test_color_edit_injects_every_step(self, edit_inputs):
        assert main(edit_argv(edit_inputs, "--edit-type", "color")) == EXIT_OK
        sidecar = json.loads((edit_inputs / "out" / "cats_edited.json").read_text())
        assert sidecar["schedule_fraction"] == 1.0
        assert sidecar["injected_steps"] == 3

    def test_reruns_are_byte_identical(self, edit_inputs):
        """Same inputs and seed give the same image and sidecar bytes."""
        out = edit_inputs / "out"
        assert main(edit_argv(edit_inputs, "--seed", "5")) == EXIT_OK
        first = ((out / "cats_edited.png").read_bytes(), (out / "cats_edited.json").read_bytes())
        assert main(edit_argv(edit_inputs, "--seed", "5")) == EXIT_OK
        assert ((out / "cats_edited.png").read_bytes(), (out / "cats_edited.json").read_bytes()) == first

    def test_debug_writes_trace(self, edit_inputs):
        assert main(edit_argv(edit_inputs, "--debug")) == EXIT_OK
        out = edit_inputs / "out"
        assert (out / "cats_edited_trace.json").exists()
        assert (out / "cats_edited_trace.npz").exists()

    def test_missing_mask_files(self, edit_inputs, capsys):
        (edit_inputs / "masks" / "cats_obj2.png").unlink()
        assert main(edit_argv(edit_inputs)) == EXIT_INVALID
        assert "cats_obj2.png" in capsys.readouterr().out
        assert not (edit_inputs / "out").exists()

    def test_no_mask_source(self, edit_inputs):
        argv = [a for a in edit_argv(edit_inputs) if a not in ("--masks", str(edit_inputs / "masks"))]
        assert main(argv) == EXIT_INVALID

    def test_missing_image(self, edit_inputs):
        (edit_inputs / "cats.png").unlink()
        assert main(edit_argv(edit_inputs)) == EXIT_INVALID

    def test_unreadable_image(self, edit_inputs, capsys):
        (edit_inputs / "cats.png").write_bytes(b"not a png")
        assert main(edit_argv(edit_inputs)) == EXIT_INVALID
        assert "cats.png" in capsys.readouterr().out
        assert not (edit_inputs / "out").exists()

    def test_corrupt_mask_file(self, edit_inputs, capsys):
        (edit_inputs / "masks" / "cats_obj1.png").write_bytes(b"not a png")
        assert main(edit_argv(edit_inputs)) == EXIT_INVALID
        assert "cats_obj1.png" in capsys.readouterr().out
        assert not (edit_inputs / "out").exists()

    def test_ets_without_stripped_prompts(self, edit_inputs):
        assert main(edit_argv(edit_inputs, "--eos-strategy", "ets")) == EXIT_INVALID

    def test_bad_config_value(self, edit_inputs):
        assert main(edit_argv(edit_inputs, "--dilation", "0.9")) == EXIT_INVALID

    def test_unknown_edit_type_rejected_by_argparse(self, edit_inputs):
        with pytest.raises(SystemExit):
            main(edit_argv(edit_inputs, "--edit-type", "texture"))


class TestVariantName:
    """Tests for variant_name()."""

    @pytest.mark.parametrize("changes,expected", [
        ({}, "ale"),
        ({"use_bb": False}, "ore-no-bb"),
        ({"use_rgb_cam": False, "use_bb": False}, "ore-no-rgb-cam-no-bb"),
        ({"eos_strategy": "naive"}, "naive"),
        ({"eos_strategy": "zeros", "use_rgb_cam": False}, "zeros-no-rgb-cam"),
    ])
    def test_names(self, changes, expected):
        assert variant_name(EditConfig(**changes)) == expected


class TestBenchCommands:
    """Tests for `ale bench generate | run | report`."""

    @pytest.fixture
    def manifest(self, temp_dir, source_image, two_object_masks):
        """Two images with three masked objects each."""
        third = np.zeros((128, 128), dtype=bool)
        third[80:110, 10:40] = True
        images = []
        for image_id in ("shapes", "blocks"):
            save_image(temp_dir / "images" / f"{image_id}.png", source_image)
            objects = []
            for name, mask in zip(("square", "box", "tile"), two_object_masks + [third]):
                save_mask_png(temp_dir / "masks" / f"{image_id}_{name}.png", mask)
                objects.append({"name": name, "mask": f"masks/{image_id}_{name}.png"})
            images.append({"id": image_id, "path": f"images/{image_id}.png", "objects": objects})
        path = temp_dir / "manifest.json"
        path.write_text(json.dumps({"images": images}))
        return path

    def test_generate_full_grid(self, manifest, temp_dir, capsys):
        out = temp_dir / "scenarios.json"
        assert main(["bench", "generate", "--manifest", str(manifest), "--out", str(out)]) == EXIT_OK

        data = json.loads(out.read_text())
        assert data["count"] == 300
        assert len(data["scenarios"]) == 300
        assert "Generated 300 scenarios" in capsys.readouterr().out

    def test_generate_restricted(self, manifest, temp_dir):
        out = temp_dir / "scenarios.json"
        argv = ["bench", "generate", "--manifest", str(manifest), "--out", str(out),
                "--edit-type", "color", "--objects", "2", "--instances", "3"]
        assert main(argv) == EXIT_OK
        assert json.loads(out.read_text())["count"] == 6

    def test_generate_bad_manifest(self, temp_dir):
        path = temp_dir / "manifest.json"
        path.write_text(json.dumps({"images": [{"id": "x"}]}))
        argv = ["bench", "generate", "--manifest", str(path), "--out", str(temp_dir / "s.json")]
        assert main(argv) == EXIT_INVALID
        assert not (temp_dir / "s.json").exists()

    def test_run_then_report(self, manifest, temp_dir, capsys):
        scenarios = temp_dir / "scenarios.json"
        main(["bench", "generate", "--manifest", str(manifest), "--out", str(scenarios),
              "--edit-type", "color", "--objects", "2", "--instances", "2"])
        out = temp_dir / "runs"

        argv = ["bench", "run", "--scenarios", str(scenarios), "--out", str(out), "--steps", "2"]
        assert main(argv) == EXIT_OK
        assert len(list((out / "ale" / "reports").glob("*.json"))) == 4
        assert (out / "ale" / "aggregate.csv").exists()

        capsys.readouterr()
        assert main(["bench", "report", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "4 report(s)" in text
        assert "By edit type" in text
        assert "color" in text
        assert re.search(r"\d\.\d\de[-+]\d\d", text)

    def test_run_variant_directory(self, manifest, temp_dir):
        scenarios = temp_dir / "scenarios.json"
        main(["bench", "generate", "--manifest", str(manifest), "--out", str(scenarios),
              "--edit-type", "object", "--objects", "1", "--instances", "1"])
        out = temp_dir / "runs"
        argv = ["bench", "run", "--scenarios", str(scenarios), "--out", str(out),
                "--steps", "2", "--no-bb", "--limit", "1"]
        assert main(argv) == EXIT_OK
        assert len(list((out / "ore-no-bb" / "reports").glob("*.json"))) == 1

    def test_run_missing_scenario_file(self, temp_dir):
        assert main(["bench", "run", "--scenarios", str(temp_dir / "none.json")]) == EXIT_INVALID

    def test_report_without_reports(self, temp_dir, capsys):
        assert main(["bench", "report", str(temp_dir)]) == 1
        assert "no reports found" in capsys.readouterr().out
