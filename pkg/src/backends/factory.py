"""
Adapter discovery: build backend, encoder and scorer from a CliConfig.
"""

from ..config.settings import CliConfig
from .mock_encoder import MockEncoder
from .mock_scorer import MockScorer
from .toy import ToyBackend


def make_backend(config: CliConfig):
    """backend.kind: toy | real."""
    if config.backend_kind == "real":
        from .real import LcmBackend
        return LcmBackend(
            config.real_model_id,
            device=config.device,
            guidance_scale=config.edit.guidance_scale,
        )
    return ToyBackend.from_config(config.toy)


def make_encoder(config: CliConfig, backend=None):
    """encoder.kind: mock | clip. The CLIP encoder reuses a real backend's text stack."""
    if config.encoder_kind == "clip":
        from .real import ClipPromptEncoder
        pipe = getattr(backend, "pipe", None)
        if pipe is not None:
            return ClipPromptEncoder(
                config.real_model_id, device=config.device,
                tokenizer=pipe.tokenizer, text_encoder=pipe.text_encoder,
            )
        return ClipPromptEncoder(config.real_model_id, device=config.device)
    return MockEncoder(
        length=config.toy.prompt_length,
        width=config.toy.embed_width,
        seed=config.toy.encoder_seed,
    )


def make_scorer(config: CliConfig):
    """scorer.kind: mock | clip."""
    if config.scorer_kind == "clip":
        from .real import ClipScorer
        return ClipScorer(config.clip_model_id, device=config.device)
    return MockScorer()
