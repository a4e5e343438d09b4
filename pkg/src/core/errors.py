"""
Error types for ALE Edit.

Every error derives from AleError and from the closest builtin, so callers
can catch either the project base or the usual Python category.
"""


class AleError(Exception):
    """Base class for all ALE Edit errors."""


class RequestError(AleError, ValueError):
    """An edit request failed validation."""


class EmptyRequest(RequestError):
    """An edit request carries no object prompt pairs."""


class PromptOverflowError(AleError, OverflowError):
    """The joined base prompt does not fit in the encoder's padded length."""


class EncoderShapeError(AleError, ValueError):
    """A text encoder returned an embedding matrix of the wrong shape."""


class MissingStrippedPrompt(AleError, ValueError):
    """The ets strategy was requested without attribute-free prompts."""


class MaskShapeError(AleError, ValueError):
    """A mask is unreadable or does not match the image resolution."""


class SegmenterUnavailable(AleError, ConnectionError):
    """The segmenter service could not be reached (transport failure)."""


class PartitionError(AleError, ValueError):
    """Region masks do not partition the pixels."""


class ShapeError(AleError, ValueError):
    """Array dimensions do not line up."""


class RangeError(AleError, ValueError):
    """A scalar parameter is outside its allowed range."""


class ScheduleError(AleError, ValueError):
    """A noise schedule cannot drive the sampler."""


class BackendError(AleError, RuntimeError):
    """A diffusion backend failed during a forward pass."""


class EmptyBackground(AleError, ValueError):
    """The background mask has no pixels to score."""


class MissingAttribute(AleError, KeyError):
    """A prompt template needs an attribute that was not supplied."""


class ManifestError(AleError, ValueError):
    """An image manifest or dictionary file is malformed or insufficient."""


class ConfigError(AleError, ValueError):
    """A configuration value is invalid."""
