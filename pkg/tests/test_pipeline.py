"""
End-to-end edit tests on the toy backend.
"""

import json
from unittest.mock import Mock

import numpy as np
import pytest

from src.config import EditConfig
from src.core.errors import EmptyRequest, RequestError
from src.masks import ArrayMaskProvider, SegmenterMaskProvider
from src.pipeline import AlePipeline, EditRequest, run_edit
from src.prompts import make_pairs

TWO_OBJECTS = [("a red square", "a green square"), ("a blue square", "a yellow square")]


@pytest.fixture
def pipeline(toy_backend, mock_encoder):
    return AlePipeline(toy_backend, mock_encoder)


def two_object_request(source_image, **kwargs):
    return EditRequest(image=source_image, pairs=make_pairs(TWO_OBJECTS), **kwargs)


class TestEditLoop:
    """Tests for AlePipeline.edit()."""

    def test_background_latents_match_source_exactly(self, pipeline, source_image, two_object_masks):
        """With blending on, background latent pixels end equal to z0_src bit for bit."""
        result = pipeline.edit(two_object_request(source_image), ArrayMaskProvider(two_object_masks))

        background = result.mask_set.at((16, 16))[1]
        assert background.any()
        np.testing.assert_array_equal(result.final_latent[:, background], result.source_latent[:, background])
        assert not np.array_equal(result.final_latent[:, ~background], result.source_latent[:, ~background])

    def test_identity_edit_reconstructs_source(self, pipeline, source_image, two_object_masks):
        """K=1 with target prompt = source prompt gives back the source latent."""
        request = EditRequest(image=source_image, pairs=make_pairs([("a red square", "a red square")]))
        result = pipeline.edit(request, ArrayMaskProvider(two_object_masks[:1]))

        np.testing.assert_array_equal(result.final_latent, result.source_latent)
        np.testing.assert_allclose(result.edited_image, source_image, atol=1e-9)

    def test_all_background_returns_source(self, pipeline, source_image):
        """An empty object mask makes every pixel background; the output is the reconstruction."""
        empty = np.zeros((128, 128), dtype=bool)
        request = EditRequest(image=source_image, pairs=make_pairs([("a cat", "a tiger")]))
        result = pipeline.edit(request, ArrayMaskProvider([empty]))

        np.testing.assert_array_equal(result.final_latent, result.source_latent)

    def test_forward_pass_count(self, pipeline, source_image, two_object_masks):
        """Exactly N backend passes per branch."""
        request = two_object_request(source_image, config=EditConfig(num_steps=6))
        result = pipeline.edit(request, ArrayMaskProvider(two_object_masks))

        assert result.forward_calls == {"source": 6, "target": 6}
        assert [s.step for s in result.trace.steps] == list(range(6))

    @pytest.mark.parametrize("edit_type,injected", [("color", 15), ("object", 8), ("material", 9)])
    def test_injection_follows_edit_type(self, pipeline, source_image, two_object_masks, edit_type, injected):
        request = two_object_request(source_image, edit_type=edit_type)
        result = pipeline.edit(request, ArrayMaskProvider(two_object_masks))

        assert result.injected_steps == injected
        assert [s.injected for s in result.trace.steps] == [n < injected for n in range(15)]

    def test_recovered_clean_latent_every_step(self, pipeline, source_image, two_object_masks):
        result = pipeline.edit(two_object_request(source_image), ArrayMaskProvider(two_object_masks))
        assert all(s.recovered_z0_error < 1e-6 for s in result.trace.steps)

    def test_deterministic_for_fixed_seed(self, toy_backend, mock_encoder, source_image, two_object_masks):
        """Two runs with the same seed are bit-identical."""
        a = run_edit(two_object_request(source_image), toy_backend, ArrayMaskProvider(two_object_masks), mock_encoder)
        b = run_edit(two_object_request(source_image), toy_backend, ArrayMaskProvider(two_object_masks), mock_encoder)
        np.testing.assert_array_equal(a.edited_image, b.edited_image)
        np.testing.assert_array_equal(a.final_latent, b.final_latent)

    def test_seed_changes_output(self, pipeline, source_image, two_object_masks):
        a = pipeline.edit(two_object_request(source_image), ArrayMaskProvider(two_object_masks))
        b = pipeline.edit(two_object_request(source_image, config=EditConfig(seed=7)), ArrayMaskProvider(two_object_masks))
        assert not np.array_equal(a.final_latent, b.final_latent)

    def test_ablation_switches_recorded(self, pipeline, source_image, two_object_masks):
        config = EditConfig(use_rgb_cam=False, use_bb=False)
        result = pipeline.edit(two_object_request(source_image, config=config), ArrayMaskProvider(two_object_masks))
        assert not any(s.rgb_cam or s.bb for s in result.trace.steps)
        assert result.mask_set is not None


class TestFallback:
    """Segmentation failure runs without masking and blending."""

    def test_segmenter_failure_completes(self, pipeline, source_image):
        client = Mock()
        client.segment.return_value = None
        result = pipeline.edit(two_object_request(source_image), SegmenterMaskProvider(client))

        assert result.mask_set is None
        assert result.fallback is not None
        assert result.provenance == "fallback_none"
        assert result.trace.fallback
        assert result.edited_image.shape == (128, 128, 3)
        assert not any(s.rgb_cam or s.bb for s in result.trace.steps)

    def test_no_provider(self, pipeline, source_image):
        result = pipeline.edit(two_object_request(source_image), None)
        assert result.trace.fallback_reason == "no mask provider"


class TestRequestValidation:
    """EditRequest.validate() failures surface before any sampling."""

    def test_empty_pairs(self, pipeline, source_image):
        with pytest.raises(EmptyRequest):
            pipeline.edit(EditRequest(image=source_image, pairs=[]))

    def test_unknown_edit_type(self, pipeline, source_image):
        with pytest.raises(RequestError):
            pipeline.edit(two_object_request(source_image, edit_type="texture"))

    def test_grayscale_image(self, pipeline):
        with pytest.raises(RequestError):
            pipeline.edit(EditRequest(image=np.zeros((128, 128)), pairs=make_pairs(TWO_OBJECTS)))

    def test_resizes_other_image_sizes(self, pipeline, source_image):
        """Images are resized to the backend resolution."""
        big = np.repeat(np.repeat(source_image, 2, axis=0), 2, axis=1)
        result = pipeline.edit(EditRequest(image=big, pairs=make_pairs(TWO_OBJECTS)), None)
        assert result.source_image.shape == (128, 128, 3)


class TestTrace:
    """Tests for debug traces."""

    def test_debug_records_latents(self, pipeline, source_image, two_object_masks, temp_dir):
        request = two_object_request(source_image, config=EditConfig(num_steps=4), debug=True)
        result = pipeline.edit(request, ArrayMaskProvider(two_object_masks))

        assert len(result.trace.latents["z_src"]) == 5
        np.testing.assert_array_equal(result.trace.latents["z_src"][-1], result.source_latent)

        written = result.trace.save(temp_dir / "cats_edited")
        assert [p.name for p in written] == ["cats_edited_trace.json", "cats_edited_trace.npz"]
        data = json.loads(written[0].read_text())
        assert data["provenance"] == "file"
        assert len(data["steps"]) == 4

    def test_no_latents_without_debug(self, pipeline, source_image, two_object_masks, temp_dir):
        result = pipeline.edit(two_object_request(source_image, config=EditConfig(num_steps=2)), ArrayMaskProvider(two_object_masks))
        assert result.trace.latents is None
        assert len(result.trace.save(temp_dir / "x")) == 1
