"""
Tests for the toy backend, mock encoder/scorer and adapter discovery.
"""

import numpy as np
import pytest

from src.attention import resolve_schedule
from src.backends import (
    FLOOR_SCORE,
    NEUTRAL_SCORE,
    ConditioningEmbeddings,
    Controls,
    MockEncoder,
    MockScorer,
    RegionValues,
    ToyBackend,
    ToyParams,
    load_toy_params,
    make_backend,
    make_encoder,
    make_scorer,
)
from src.config import CliConfig, ToyBackendConfig
from src.core.errors import ConfigError, ShapeError
from src.core.paths import get_toy_params_path
from src.masks import build_mask_set


@pytest.fixture
def embeddings(mock_encoder):
    rows = mock_encoder.encode("a red square and a blue square").rows
    return ConditioningEmbeddings(rows, rows)


@pytest.fixture
def latent(toy_backend, source_image):
    return toy_backend.encode_image(source_image)


class TestToyParams:
    """Tests for the golden parameter file."""

    def test_save_load_round_trip(self, temp_dir):
        """Arrays and config survive the binary format bit for bit."""
        params = ToyParams.generate(ToyBackendConfig(seed=3))
        path = temp_dir / "toy.bin"
        params.save(path)
        loaded = ToyParams.load(path)

        assert loaded.config == params.config
        assert sorted(loaded.arrays) == sorted(params.arrays)
        for name, arr in params.arrays.items():
            np.testing.assert_array_equal(loaded.arrays[name], arr)
        assert not path.with_suffix(".bin.tmp").exists()

    def test_generation_is_deterministic(self):
        a = ToyParams.generate(ToyBackendConfig(seed=1))
        b = ToyParams.generate(ToyBackendConfig(seed=1))
        for name in a.arrays:
            np.testing.assert_array_equal(a.arrays[name], b.arrays[name])

    def test_bad_magic(self, temp_dir):
        path = temp_dir / "junk.bin"
        path.write_bytes(b"NOTATOYFILE_____________")
        with pytest.raises(ConfigError):
            ToyParams.load(path)

    def test_mismatched_golden_file_is_regenerated(self, temp_dir):
        """A golden file for another config is ignored."""
        path = temp_dir / "toy.bin"
        ToyParams.generate(ToyBackendConfig(seed=5)).save(path)

        params = load_toy_params(ToyBackendConfig(seed=0), path)
        assert params.config.seed == 0
        fresh = ToyParams.generate(ToyBackendConfig(seed=0))
        np.testing.assert_array_equal(params.arrays["ae.mix"], fresh.arrays["ae.mix"])

    def test_shipped_golden_file_matches_generation(self):
        """assets/toy_params_v1.bin holds exactly the default parameters."""
        path = get_toy_params_path()
        assert path.exists()
        stored = ToyParams.load(path)
        fresh = ToyParams.generate(ToyBackendConfig())

        assert stored.config == ToyBackendConfig()
        assert sorted(stored.arrays) == sorted(fresh.arrays)
        for name, arr in fresh.arrays.items():
            np.testing.assert_array_equal(stored.arrays[name], arr)

    def test_default_backend_loads_golden_file(self, capsys):
        backend = ToyBackend.from_config(ToyBackendConfig())
        stored = ToyParams.load(get_toy_params_path())
        np.testing.assert_array_equal(backend.params.arrays["res8x8.out"], stored.arrays["res8x8.out"])
        assert "Warning" not in capsys.readouterr().out

    def test_missing_default_file_warns(self, temp_dir, capsys):
        params = load_toy_params(ToyBackendConfig(), temp_dir / "missing.bin")
        assert params.config == ToyBackendConfig()
        assert "missing.bin" in capsys.readouterr().out

    def test_missing_file_for_custom_config_is_quiet(self, temp_dir, capsys):
        load_toy_params(ToyBackendConfig(seed=2), temp_dir / "missing.bin")
        assert capsys.readouterr().out == ""

    def test_parameters_have_unit_scale(self):
        """Draws are uniform with variance scale²."""
        params = ToyParams.generate(ToyBackendConfig())
        q = params.arrays["res16x16.self.q"]
        assert np.abs(q).max() <= 0.25 * np.sqrt(3.0)
        assert q.std() == pytest.approx(0.25, rel=0.15)

    def test_bad_attention_resolution(self):
        with pytest.raises(ConfigError):
            ToyBackendConfig(attention_resolutions=((5, 5),)).validate()


class TestToyAutoencoder:
    """Tests for encode_image() / decode_latent()."""

    def test_shapes(self, toy_backend, source_image, latent):
        assert latent.shape == toy_backend.latent_shape == (4, 16, 16)
        assert toy_backend.decode_latent(latent).shape == source_image.shape

    def test_block_constant_image_reconstructs(self, toy_backend, source_image, latent):
        """Images constant on 8×8 blocks come back exactly (up to float error)."""
        np.testing.assert_allclose(toy_backend.decode_latent(latent), source_image, atol=1e-9)

    def test_wrong_image_size(self, toy_backend):
        with pytest.raises(ShapeError):
            toy_backend.encode_image(np.zeros((64, 64, 3)))

    def test_wrong_latent_shape(self, toy_backend):
        with pytest.raises(ShapeError):
            toy_backend.decode_latent(np.zeros((4, 8, 8)))


class TestToyForward:
    """Tests for ToyBackend.forward()."""

    def test_plain_forward(self, toy_backend, latent, embeddings):
        """Prediction has latent shape and Q/K is captured for every self-attention layer."""
        out = toy_backend.forward(latent, 999, embeddings, Controls())
        assert out.z0_pred.shape == latent.shape
        assert sorted(out.qk) == sorted(toy_backend.self_attention_layers)
        for layer, (q, k) in out.qk.items():
            assert out.used_qk[layer][0] is q and out.used_qk[layer][1] is k

    def test_deterministic(self, toy_backend, latent, embeddings):
        a = toy_backend.forward(latent, 500, embeddings, Controls())
        b = toy_backend.forward(latent, 500, embeddings, Controls())
        np.testing.assert_array_equal(a.z0_pred, b.z0_pred)

    def test_injection_uses_source_qk(self, toy_backend, latent, embeddings):
        """On an active step every self-attention layer uses the supplied source Q/K."""
        source = toy_backend.forward(latent, 999, embeddings, Controls())
        other = latent + 0.3
        schedule = resolve_schedule(0.5, 4)

        injected = toy_backend.forward(other, 999, embeddings, Controls(1, schedule, source.qk))
        for layer in toy_backend.self_attention_layers:
            np.testing.assert_array_equal(injected.used_qk[layer][0], source.qk[layer][0])
            np.testing.assert_array_equal(injected.used_qk[layer][1], source.qk[layer][1])
            assert not np.array_equal(injected.qk[layer][0], source.qk[layer][0])

        late = toy_backend.forward(other, 999, embeddings, Controls(3, schedule, source.qk))
        for layer in toy_backend.self_attention_layers:
            np.testing.assert_array_equal(late.used_qk[layer][0], late.qk[layer][0])

    def test_rgb_cam_with_equal_values_matches_plain(self, toy_backend, latent, embeddings, two_object_masks):
        """When every object reads the base values the region path equals the plain path."""
        resolutions = list(toy_backend.attention_resolutions)
        mask_set = build_mask_set(two_object_masks, 0.0, resolutions, "file")
        regions = RegionValues([embeddings.value_rows] * 2, mask_set.pyramid)

        plain = toy_backend.forward(latent, 700, embeddings, Controls())
        blended = toy_backend.forward(latent, 700, embeddings, Controls(regions=regions))
        np.testing.assert_allclose(blended.z0_pred, plain.z0_pred, atol=1e-9)

    def test_rgb_cam_object_values_change_prediction(self, toy_backend, latent, embeddings, mock_encoder, two_object_masks):
        resolutions = list(toy_backend.attention_resolutions)
        mask_set = build_mask_set(two_object_masks, 0.0, resolutions, "file")
        object_rows = [mock_encoder.encode("a green vase").rows, mock_encoder.encode("a glass owl").rows]

        plain = toy_backend.forward(latent, 700, embeddings, Controls())
        blended = toy_backend.forward(latent, 700, embeddings, Controls(regions=RegionValues(object_rows, mask_set.pyramid)))
        assert not np.allclose(blended.z0_pred, plain.z0_pred)

    def test_object_values_stay_inside_object_footprint(self, toy_backend, latent, embeddings, mock_encoder, two_object_masks):
        """Changing object 1's value rows moves z0_pred only where object 1 covers some attention level."""
        resolutions = list(toy_backend.attention_resolutions)
        mask_set = build_mask_set(two_object_masks, 0.0, resolutions, "file")
        rows = [mock_encoder.encode("a green vase").rows, mock_encoder.encode("a glass owl").rows]
        swapped = [mock_encoder.encode("a velvet crown").rows, rows[1]]

        before = toy_backend.forward(latent, 700, embeddings, Controls(regions=RegionValues(rows, mask_set.pyramid)))
        after = toy_backend.forward(latent, 700, embeddings, Controls(regions=RegionValues(swapped, mask_set.pyramid)))

        _, H, W = toy_backend.latent_shape
        footprint = np.zeros((H, W), dtype=bool)
        for h, w in resolutions:
            level = np.asarray(mask_set.pyramid[(h, w)][0], dtype=bool)
            footprint |= np.repeat(np.repeat(level, H // h, axis=0), W // w, axis=1)

        assert footprint.any() and not footprint.all()
        np.testing.assert_array_equal(after.z0_pred[:, ~footprint], before.z0_pred[:, ~footprint])
        assert not np.allclose(after.z0_pred[:, footprint], before.z0_pred[:, footprint])

    def test_embedding_shape_checked(self, toy_backend, latent):
        bad = ConditioningEmbeddings(np.zeros((10, 32)), np.zeros((10, 32)))
        with pytest.raises(ShapeError):
            toy_backend.forward(latent, 999, bad, Controls())

    def test_describe(self, toy_backend):
        info = toy_backend.describe()
        assert info["kind"] == "toy"
        assert info["config"]["latent_shape"] == [4, 16, 16]


class TestMockScorer:
    """Tests for MockScorer."""

    def test_colour_ordering(self, source_image, two_object_masks):
        """The red region scores higher for 'red' than for 'blue'."""
        scorer = MockScorer()
        red_region = np.where(two_object_masks[0][..., None], source_image, 0.0)
        assert scorer.score(red_region, "red") > scorer.score(red_region, "blue")

    def test_range(self, source_image):
        scorer = MockScorer()
        for text in ("a red car", "a wooden owl", "gold"):
            assert 0.0 <= scorer.score(source_image, text) <= 100.0

    def test_empty_region_scores_floor(self):
        assert MockScorer().score(np.zeros((8, 8, 3)), "a red car") == FLOOR_SCORE

    def test_stopwords_only_is_neutral(self, source_image):
        assert MockScorer().score(source_image, "a an the") == NEUTRAL_SCORE

    def test_deterministic_across_instances(self, source_image):
        assert MockScorer().score(source_image, "a tiger") == MockScorer().score(source_image, "a tiger")


class TestFactory:
    """Tests for make_backend() / make_encoder() / make_scorer()."""

    def test_defaults_are_mock_stack(self):
        config = CliConfig()
        backend = make_backend(config)
        encoder = make_encoder(config, backend)

        assert isinstance(backend, ToyBackend)
        assert isinstance(encoder, MockEncoder)
        assert encoder.width == config.toy.embed_width
        assert isinstance(make_scorer(config), MockScorer)

    def test_encoder_follows_toy_config(self):
        config = CliConfig()
        config.toy.encoder_seed = 4
        assert make_encoder(config).seed == 4
