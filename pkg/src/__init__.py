"""
ALE Edit - attribute-leakage-free multi-object image editing.

Dual-branch consistency sampling with object-restricted embeddings,
region-guided cross-attention and background blending, plus the benchmark
generator and leakage metrics used to evaluate it.

Import from submodules directly:
    from src.config import EditConfig, CliConfig
    from src.prompts import ObjectPromptPair, encode_object_restricted
    from src.pipeline import EditRequest, run_edit
    from src.metrics import tels, tils
    from src.bench import generate_scenarios, run_benchmark
"""


def _get_version():
    """Read version from VERSION file."""
    from pathlib import Path
    version_file = Path(__file__).parent.parent / "VERSION"
    if version_file.exists():
        return version_file.read_text().strip()
    return "0.0.0"


__version__ = _get_version()
