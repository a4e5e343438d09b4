"""
Benchmark runner.

Scenarios fan out over a thread pool; each worker thread builds its own
editor through the factory. Workers only compute: every file is written by
the calling thread as results arrive, so report writes never race.

Output tree:
    out_dir/
        reports/<scenario_id>.json
        images/<scenario_id>.png     (save_images=True)
        aggregate.csv
        failures.csv
"""

import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence

import numpy as np
from tqdm import tqdm

from ..backends.base import Scorer
from ..config.edit import EditConfig
from ..core.errors import AleError, RequestError
from ..core.files import load_image, save_image, write_json_atomic
from ..core.formatting import sanitize_filename
from ..masks.masks import FallbackSignal
from ..masks.providers import FileMaskProvider, MaskProvider
from ..metrics.report import LeakageReport, MetricAdapters, build_report
from ..pipeline.edit import EditRequest, EditResult
from .aggregate import AggregateRow, aggregate, load_report, write_aggregate_csv, write_csv
from .scenarios import Scenario


class Editor(Protocol):
    def edit(self, request: EditRequest, mask_provider: Optional[MaskProvider] = None) -> EditResult:
        ...


@dataclass
class ScenarioOutcome:
    """Result of one scenario; failures carry an error tag instead of a report."""
    scenario_id: str
    success: bool
    message: str = ""
    error_tag: str = ""
    report: Optional[LeakageReport] = None
    edited_image: Optional[np.ndarray] = None
    resumed: bool = False


@dataclass
class BenchmarkSummary:
    out_dir: Path
    outcomes: list[ScenarioOutcome] = field(default_factory=list)
    rows: list[AggregateRow] = field(default_factory=list)

    @property
    def completed(self) -> int:
        return sum(1 for o in self.outcomes if o.success and not o.resumed)

    @property
    def resumed(self) -> int:
        return sum(1 for o in self.outcomes if o.resumed)

    @property
    def failed(self) -> list[ScenarioOutcome]:
        return [o for o in self.outcomes if not o.success]

    @property
    def reports(self) -> list[LeakageReport]:
        return [o.report for o in self.outcomes if o.success]


def report_path(out_dir: Path, scenario_id: str) -> Path:
    return Path(out_dir) / "reports" / f"{sanitize_filename(scenario_id)}.json"


def _existing_report(out_dir: Path, scenario: Scenario, variant: str, config_hash: str) -> Optional[LeakageReport]:
    """A previously written report that matches this scenario, variant and config."""
    path = report_path(out_dir, scenario.scenario_id)
    if not path.exists():
        return None
    report = load_report(path)
    if report is None:
        return None
    if report.scenario_id != scenario.scenario_id or report.variant != variant:
        return None
    if config_hash and report.config_hash != config_hash:
        return None
    return report


def _error_tag(exc: BaseException) -> str:
    return type(exc).__name__ if isinstance(exc, AleError) else "unexpected"


def run_scenario(
    scenario: Scenario,
    editor: Editor,
    scorer: Scorer,
    config: EditConfig,
    variant: str = "ale",
    config_hash: str = "",
    version: str = "",
    mask_provider_factory: Optional[Callable[[Scenario], MaskProvider]] = None,
    adapters: Optional[MetricAdapters] = None,
) -> ScenarioOutcome:
    """
    Edit and score one scenario. Never raises.

    Masks come from the scenario's declared files, else from
    mask_provider_factory (e.g. a segmenter); with neither the scenario fails.
    """
    try:
        mask_paths = scenario.mask_paths
        if mask_paths is not None:
            provider = FileMaskProvider(mask_paths)
        elif mask_provider_factory is not None:
            provider = mask_provider_factory(scenario)
        else:
            raise RequestError(f"No masks declared for '{scenario.image_id}' and no segmenter configured")

        request = EditRequest(
            image=load_image(Path(scenario.image_path)),
            pairs=scenario.pairs,
            edit_type=scenario.edit_type,
            config=config.replace(seed=scenario.seed),
            image_id=scenario.image_id,
        )
        result = editor.edit(request, provider)
        if isinstance(result.fallback, FallbackSignal):
            return ScenarioOutcome(
                scenario_id=scenario.scenario_id,
                success=False,
                message=result.fallback.reason,
                error_tag="fallback_none",
            )

        report = build_report(
            result,
            scenario.target_prompts,
            result.ore.base_prompt,
            scorer,
            metadata={
                "scenario_id": scenario.scenario_id,
                "image_id": scenario.image_id,
                "edit_type": scenario.edit_type,
                "seed": scenario.seed,
                "instance": scenario.instance,
                "variant": variant,
                "config_hash": config_hash,
                "version": version,
            },
            adapters=adapters,
        )
        return ScenarioOutcome(
            scenario_id=scenario.scenario_id,
            success=True,
            report=report,
            edited_image=result.edited_image,
        )
    except Exception as e:
        return ScenarioOutcome(
            scenario_id=scenario.scenario_id,
            success=False,
            message=str(e),
            error_tag=_error_tag(e),
        )


def run_benchmark(
    scenarios: Sequence[Scenario],
    editor_factory: Callable[[], Editor],
    scorer: Scorer,
    out_dir: Path,
    config: Optional[EditConfig] = None,
    variant: str = "ale",
    config_hash: str = "",
    version: str = "",
    workers: int = 1,
    resume: bool = True,
    save_images: bool = False,
    mask_provider_factory: Optional[Callable[[Scenario], MaskProvider]] = None,
    adapters: Optional[MetricAdapters] = None,
    show_progress: bool = True,
) -> BenchmarkSummary:
    """
    Run scenarios, persist reports and write the aggregate.

    Args:
        scenarios: Scenarios in grid order
        editor_factory: Builds an editor (e.g. AlePipeline); called once per worker thread
        scorer: Image-text scorer, shared across workers
        out_dir: Output directory
        config: Edit settings; each scenario overrides the seed
        variant: Label stored in every report (ablation name)
        config_hash: Stored in reports; resume only reuses reports with the same hash
        workers: Thread pool size
        resume: Skip scenarios with a valid existing report

    Returns:
        BenchmarkSummary with outcomes in scenario order and the aggregate rows
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = config or EditConfig()

    outcomes: dict[str, ScenarioOutcome] = {}
    pending = []
    for scenario in scenarios:
        existing = _existing_report(out_dir, scenario, variant, config_hash) if resume else None
        if existing is not None:
            outcomes[scenario.scenario_id] = ScenarioOutcome(
                scenario_id=scenario.scenario_id, success=True, report=existing, resumed=True,
            )
        else:
            pending.append(scenario)

    local = threading.local()

    def work(scenario: Scenario) -> ScenarioOutcome:
        if not hasattr(local, "editor"):
            local.editor = editor_factory()
        return run_scenario(
            scenario, local.editor, scorer, config, variant, config_hash, version,
            mask_provider_factory, adapters,
        )

    def record(outcome: ScenarioOutcome):
        if outcome.success:
            write_json_atomic(report_path(out_dir, outcome.scenario_id), outcome.report.to_dict())
            if save_images and outcome.edited_image is not None:
                image_path = out_dir / "images" / f"{sanitize_filename(outcome.scenario_id)}.png"
                image_path.parent.mkdir(parents=True, exist_ok=True)
                save_image(image_path, outcome.edited_image)
            outcome.edited_image = None
        outcomes[outcome.scenario_id] = outcome

    if pending:
        progress = tqdm(total=len(pending), desc="Scenarios", unit="edit", disable=not show_progress)
        try:
            with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
                futures = {executor.submit(work, s): s for s in pending}
                for future in as_completed(futures):
                    record(future.result())
                    progress.update(1)
        finally:
            progress.close()

    ordered = [outcomes[s.scenario_id] for s in scenarios if s.scenario_id in outcomes]
    summary = BenchmarkSummary(out_dir=out_dir, outcomes=ordered)

    # Aggregate from the reports on disk
    reports = []
    for outcome in summary.outcomes:
        if not outcome.success:
            continue
        report = load_report(report_path(out_dir, outcome.scenario_id))
        if report is not None:
            outcome.report = report
            reports.append(report)
    summary.rows = aggregate(reports)
    write_aggregate_csv(out_dir / "aggregate.csv", summary.rows)
    write_csv(
        out_dir / "failures.csv",
        ["scenario_id", "error_tag", "message"],
        ({"scenario_id": o.scenario_id, "error_tag": o.error_tag, "message": o.message} for o in summary.failed),
    )
    return summary
