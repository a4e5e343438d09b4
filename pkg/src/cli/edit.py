"""
`ale edit`: one multi-object edit from the command line.

Exit codes: 0 success (a fallback run prints a warning), 2 invalid input,
3 pipeline failure.
"""

import argparse
from pathlib import Path

from .. import __version__
from ..backends.factory import make_backend, make_encoder
from ..config.settings import CliConfig, config_hash, resolve_cli_config
from ..core.colors import Colors
from ..core.constants import DEFAULT_EDIT_TYPE, EDIT_TYPES, EOS_STRATEGIES
from ..core.errors import (
    AleError,
    ConfigError,
    MaskShapeError,
    MissingStrippedPrompt,
    PromptOverflowError,
    RangeError,
    RequestError,
)
from ..core.files import load_image, save_image, write_json_atomic
from ..core.formatting import format_duration, sanitize_filename
from ..core.logging import error, warn
from ..core.paths import get_default_output_dir
from ..masks.providers import FileMaskProvider, SegmenterMaskProvider
from ..masks.segmenter import HttpSegmenterClient, SegmenterClientConfig
from ..pipeline.edit import EditRequest, EditResult, run_edit
from ..prompts.pairs import ObjectPromptPair

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3

PAIR_SEPARATOR = "->"

# Errors caused by the request itself rather than by the pipeline
VALIDATION_ERRORS = (
    RequestError,
    ConfigError,
    PromptOverflowError,
    MissingStrippedPrompt,
    MaskShapeError,
    RangeError,
)


def add_edit_flags(parser: argparse.ArgumentParser):
    """Flags shared by `edit` and `bench run` that override config values."""
    parser.add_argument("--config", type=Path, help="JSON config file (default: $ALE_CONFIG)")
    parser.add_argument("--backend", choices=("toy", "real"), help="Diffusion backend")
    parser.add_argument("--steps", type=int, help="Denoising steps (default 15)")
    parser.add_argument("--schedule", type=float, help="Self-attention injection fraction (default per edit type)")
    parser.add_argument("--eos-strategy", choices=EOS_STRATEGIES, help="EOS handling for the base embedding")
    parser.add_argument("--dilation", type=float, help="Mask dilation ratio (default 0.01)")
    parser.add_argument("--segmenter-endpoint", help="Segmentation service URL")
    parser.add_argument("--no-rgb-cam", action="store_true", help="Disable region-guided cross-attention")
    parser.add_argument("--no-bb", action="store_true", help="Disable background blending")


def edit_flag_values(args: argparse.Namespace) -> dict:
    """Dotted config keys for the shared flags; None means not given."""
    return {
        "backend.kind": args.backend,
        "edit.num_steps": args.steps,
        "edit.schedule_fraction": args.schedule,
        "edit.eos_strategy": args.eos_strategy,
        "edit.dilation_ratio": args.dilation,
        "segmenter.endpoint": args.segmenter_endpoint,
        "edit.use_rgb_cam": False if args.no_rgb_cam else None,
        "edit.use_bb": False if args.no_bb else None,
    }


def add_parser(subparsers):
    parser = subparsers.add_parser("edit", help="Edit one image")
    parser.add_argument("--image", type=Path, required=True, help="Source image (PNG/JPEG)")
    parser.add_argument("--pair", action="append", default=[], metavar="SRC->TGT",
                        help="Object prompt pair, repeat in object order")
    parser.add_argument("--phrase", action="append", default=[],
                        help="Segmentation phrase per object (defaults to the source prompt)")
    parser.add_argument("--stripped", action="append", default=[],
                        help="Attribute-stripped prompt per object (eos strategy 'ets')")
    parser.add_argument("--masks", type=Path, help="Directory with <image stem>_obj<i>.png masks")
    parser.add_argument("--edit-type", choices=EDIT_TYPES, default=DEFAULT_EDIT_TYPE,
                        help="Edit type; picks the default injection fraction")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--debug", action="store_true", help="Write the per-step trace and latents")
    add_edit_flags(parser)
    parser.set_defaults(handler=cmd_edit)
    return parser


def parse_pairs(texts: list[str], phrases: list[str]) -> list[ObjectPromptPair]:
    """'src->tgt' strings to indexed pairs; RequestError on malformed input."""
    if phrases and len(phrases) != len(texts):
        raise RequestError(f"{len(phrases)} --phrase values for {len(texts)} --pair values")
    pairs = []
    for i, text in enumerate(texts, start=1):
        if PAIR_SEPARATOR not in text:
            raise RequestError(f"--pair '{text}' must look like 'source{PAIR_SEPARATOR}target'")
        source, target = (part.strip() for part in text.split(PAIR_SEPARATOR, 1))
        phrase = phrases[i - 1] if phrases else None
        pairs.append(ObjectPromptPair(source, target, i, phrase))
    return pairs


def make_mask_provider(config: CliConfig, image_stem: str, count: int):
    if config.mask_dir is not None:
        return FileMaskProvider.from_directory(config.mask_dir, image_stem, count)
    if config.segmenter_endpoint:
        client = HttpSegmenterClient(SegmenterClientConfig(
            endpoint=config.segmenter_endpoint,
            timeout=config.segmenter_timeout,
        ))
        return SegmenterMaskProvider(client)
    raise RequestError(
        "No masks available: pass --masks DIR with <image stem>_obj<i>.png files, "
        "or --segmenter-endpoint URL"
    )


def build_sidecar(request: EditRequest, result: EditResult, backend_info: dict, digest: str) -> dict:
    """Everything needed to reproduce the edit; no timings or timestamps."""
    return {
        "version": __version__,
        "image_id": request.image_id,
        "edit_type": request.edit_type,
        "pairs": [p.to_dict() for p in request.pairs],
        "seed": request.config.seed,
        "config": request.config.to_dict(),
        "config_hash": digest,
        "backend": backend_info,
        "schedule_fraction": result.schedule_fraction,
        "injected_steps": result.injected_steps,
        "eos_strategy": result.ore.eos_strategy,
        "base_prompt": result.ore.base_prompt,
        "provenance": result.provenance,
        "fallback_reason": result.trace.fallback_reason,
    }


def cmd_edit(args: argparse.Namespace) -> int:
    flags = edit_flag_values(args)
    flags.update({
        "masks.dir": args.masks,
        "edit.seed": args.seed,
        "output.dir": args.out,
    })

    try:
        config = resolve_cli_config(flags, config_path=args.config)
        pairs = parse_pairs(args.pair, args.phrase)
        if not args.image.exists():
            raise RequestError(f"Image not found: {args.image}")
        image = load_image(args.image)
        stem = sanitize_filename(args.image.stem)
        provider = make_mask_provider(config, stem, len(pairs))
    except VALIDATION_ERRORS as e:
        error(str(e))
        return EXIT_INVALID

    request = EditRequest(
        image=image,
        pairs=pairs,
        edit_type=args.edit_type,
        config=config.edit,
        stripped_prompts=args.stripped or None,
        image_id=stem,
        debug=args.debug,
    )

    try:
        request.validate()
        backend = make_backend(config)
        encoder = make_encoder(config, backend)
        result = run_edit(request, backend, provider, encoder)
    except VALIDATION_ERRORS as e:
        error(str(e))
        return EXIT_INVALID
    except AleError as e:
        error(f"Edit failed: {e}")
        return EXIT_FAILED

    out_dir = config.out_dir or get_default_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    output_stem = out_dir / f"{stem}_edited"
    image_path = out_dir / f"{stem}_edited.png"
    backend_info = backend.describe()

    save_image(image_path, result.edited_image)
    write_json_atomic(
        out_dir / f"{stem}_edited.json",
        build_sidecar(request, result, backend_info, config_hash(request.config, backend_info)),
    )
    if args.debug:
        for path in result.trace.save(output_stem):
            print(f"  Trace: {path}")

    print(f"{Colors.GREEN}Edited{Colors.RESET} {args.image.name} -> {image_path}")
    print(f"  {len(pairs)} object(s), {config.edit.num_steps} steps, "
          f"injection {result.injected_steps}/{config.edit.num_steps}, "
          f"{format_duration(result.runtime_sec)}")
    if result.fallback is not None:
        warn(f"[fallback_none] {result.fallback.reason}; edited without masks or background blending")
    return EXIT_OK
