"""
`ale bench generate | run | report`.
"""

import argparse
import csv
from pathlib import Path

from .. import __version__
from ..backends.factory import make_backend, make_encoder, make_scorer
from ..bench.aggregate import GROUPINGS, aggregate, find_reports
from ..bench.dictionaries import AttributeDictionaries
from ..bench.manifest import ImageManifest
from ..bench.runner import run_benchmark
from ..bench.scenarios import generate_scenarios, load_scenarios, save_scenarios
from ..config.edit import EditConfig
from ..config.settings import CliConfig, config_hash, resolve_cli_config
from ..core.colors import Colors
from ..core.constants import EDIT_TYPES, INSTANCES_PER_CELL, OBJECT_COUNTS
from ..core.errors import ConfigError, ManifestError
from ..core.formatting import format_duration, format_score, format_table
from ..core.logging import error, warn
from ..core.paths import get_default_output_dir
from ..masks.providers import SegmenterMaskProvider
from ..masks.segmenter import HttpSegmenterClient, SegmenterClientConfig
from ..pipeline.edit import AlePipeline
from .edit import EXIT_INVALID, EXIT_OK, add_edit_flags, edit_flag_values

EXIT_NO_REPORTS = 1

TABLE_METRICS = ("tels", "tils", "editing_performance", "psnr", "ssim", "mse")
TABLE_HEADERS = {
    "tels": "TELS",
    "tils": "TILS",
    "editing_performance": "Edit",
    "psnr": "PSNR",
    "ssim": "SSIM",
    "mse": "MSE",
}
# Too small for two fixed-point decimals
SCIENTIFIC_METRICS = frozenset({"mse"})
GROUP_TITLES = {
    "edit_type": "By edit type",
    "num_objects": "By number of objects",
    "variant": "By variant",
}


def add_parser(subparsers):
    parser = subparsers.add_parser("bench", help="Benchmark scenarios")
    bench = parser.add_subparsers(dest="bench_command", required=True)

    gen = bench.add_parser("generate", help="Generate the scenario grid")
    gen.add_argument("--manifest", type=Path, required=True, help="Image manifest (JSON)")
    gen.add_argument("--dictionaries", type=Path, help="Dictionaries JSON file or directory of .txt lists")
    gen.add_argument("--seed", type=int, default=0, help="Grid seed")
    gen.add_argument("--out", type=Path, required=True, help="Scenario file to write")
    gen.add_argument("--edit-type", action="append", choices=EDIT_TYPES, help="Restrict edit types (repeatable)")
    gen.add_argument("--objects", action="append", type=int, choices=OBJECT_COUNTS,
                     help="Restrict object counts (repeatable)")
    gen.add_argument("--instances", type=int, default=INSTANCES_PER_CELL, help="Instances per cell")
    gen.set_defaults(bench_handler=cmd_generate)

    run = bench.add_parser("run", help="Run scenarios and write reports")
    run.add_argument("--scenarios", type=Path, required=True, help="Scenario file from 'bench generate'")
    run.add_argument("--out", type=Path, help="Output root; the run writes to <out>/<variant>/")
    run.add_argument("--variant", help="Variant label (default derived from the ablation flags)")
    run.add_argument("--workers", type=int, help="Parallel workers")
    run.add_argument("--no-resume", action="store_true", help="Redo scenarios that already have reports")
    run.add_argument("--save-images", action="store_true", help="Also write edited images")
    run.add_argument("--limit", type=int, help="Run only the first N scenarios")
    add_edit_flags(run)
    run.set_defaults(bench_handler=cmd_run)

    report = bench.add_parser("report", help="Summarize reports")
    report.add_argument("path", type=Path, help="Run directory or output root")
    report.add_argument("--by", choices=GROUPINGS, action="append",
                        help="Grouping (default: edit_type and num_objects)")
    report.set_defaults(bench_handler=cmd_report)
    parser.set_defaults(handler=cmd_bench)
    return parser


def cmd_bench(args: argparse.Namespace) -> int:
    return args.bench_handler(args)


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        manifest = ImageManifest.load(args.manifest)
        dictionaries = AttributeDictionaries.load(args.dictionaries)
        scenarios = generate_scenarios(
            manifest,
            dictionaries,
            seed=args.seed,
            edit_types=args.edit_type or EDIT_TYPES,
            object_counts=args.objects or OBJECT_COUNTS,
            instances=args.instances,
        )
    except (ManifestError, ConfigError) as e:
        error(str(e))
        return EXIT_INVALID

    save_scenarios(args.out, scenarios, seed=args.seed)
    print(f"Generated {len(scenarios)} scenarios from {len(manifest.images)} image(s) -> {args.out}")
    return EXIT_OK


def variant_name(config: EditConfig) -> str:
    """'ale' for the full method, otherwise the EOS strategy plus disabled parts."""
    parts = [] if config.eos_strategy == "ore" else [config.eos_strategy]
    if not config.use_rgb_cam:
        parts.append("no-rgb-cam")
    if not config.use_bb:
        parts.append("no-bb")
    if not parts:
        return "ale"
    if config.eos_strategy == "ore":
        parts.insert(0, "ore")
    return "-".join(parts)


def _build_editor(config: CliConfig) -> AlePipeline:
    backend = make_backend(config)
    return AlePipeline(backend, make_encoder(config, backend))


def _editor_factory(config: CliConfig, first: AlePipeline):
    """Hands out first once, then builds a fresh pipeline per call."""
    spare = [first]

    def build():
        return spare.pop() if spare else _build_editor(config)
    return build


def _segmenter_factory(config: CliConfig):
    if not config.segmenter_endpoint:
        return None
    client_config = SegmenterClientConfig(endpoint=config.segmenter_endpoint, timeout=config.segmenter_timeout)
    return lambda scenario: SegmenterMaskProvider(HttpSegmenterClient(client_config))


def cmd_run(args: argparse.Namespace) -> int:
    flags = edit_flag_values(args)
    flags.update({"output.dir": args.out, "bench.workers": args.workers})
    try:
        config = resolve_cli_config(flags, config_path=args.config)
        scenarios = load_scenarios(args.scenarios)
    except (ConfigError, ManifestError) as e:
        error(str(e))
        return EXIT_INVALID
    if args.limit is not None:
        scenarios = scenarios[:args.limit]

    variant = args.variant or variant_name(config.edit)
    out_dir = (config.out_dir or get_default_output_dir() / "bench") / variant
    first = _build_editor(config)
    backend_info = first.backend.describe()
    digest = config_hash(config.edit, backend_info)

    print(f"Running {len(scenarios)} scenario(s), variant '{variant}', {config.workers} worker(s)")
    summary = run_benchmark(
        scenarios,
        _editor_factory(config, first),
        make_scorer(config),
        out_dir,
        config=config.edit,
        variant=variant,
        config_hash=digest,
        version=__version__,
        workers=config.workers,
        resume=not args.no_resume,
        save_images=args.save_images,
        mask_provider_factory=_segmenter_factory(config),
    )

    print(f"  Completed: {summary.completed}")
    print(f"  Resumed:   {summary.resumed}")
    failed = summary.failed
    if failed:
        print(f"  {Colors.RED}Failed:    {len(failed)}{Colors.RESET} (see {out_dir / 'failures.csv'})")
    else:
        print("  Failed:    0")
    print(f"  Output:    {out_dir}")
    return EXIT_OK


def _count_failures(root: Path) -> int:
    total = 0
    for path in sorted(root.rglob("failures.csv")):
        try:
            with open(path, encoding="utf-8", newline="") as f:
                total += sum(1 for _ in csv.DictReader(f))
        except OSError as e:
            warn(f"Could not read {path}: {e}")
    return total


def _metric_cell(metric: str, value) -> str:
    return format_score(value, scientific=metric in SCIENTIFIC_METRICS)


def cmd_report(args: argparse.Namespace) -> int:
    reports = find_reports(args.path)
    if not reports:
        print(f"no reports found in {args.path}")
        return EXIT_NO_REPORTS

    groupings = args.by or ["edit_type", "num_objects"]
    rows = aggregate(reports, groupings=groupings)
    headers = ["Group", "N", *(TABLE_HEADERS[m] for m in TABLE_METRICS), "Time"]

    overall = rows[0]
    print(f"{Colors.BOLD}{len(reports)} report(s){Colors.RESET}, {_count_failures(args.path)} failure(s)")
    for group_by in groupings:
        table = [
            [row.group, str(row.count),
             *(_metric_cell(m, row.means.get(m)) for m in TABLE_METRICS),
             format_duration(row.mean_runtime_sec or 0.0)]
            for row in rows if row.group_by == group_by
        ]
        table.append(
            ["all", str(overall.count),
             *(_metric_cell(m, overall.means.get(m)) for m in TABLE_METRICS),
             format_duration(overall.mean_runtime_sec or 0.0)]
        )
        print()
        print(GROUP_TITLES[group_by])
        print(format_table(headers, table))
    return EXIT_OK
