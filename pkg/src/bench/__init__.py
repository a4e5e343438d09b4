"""
ALE-Bench: scenario generation, benchmark runs and aggregation.
"""

from .dictionaries import DICTIONARY_KINDS, AttributeDictionaries
from .prompts import TEMPLATES, ATTRIBUTE_KINDS, render_prompt, with_article, source_prompt
from .manifest import ManifestObject, ManifestImage, ImageManifest
from .scenarios import (
    ScenarioObject,
    Scenario,
    scenario_id,
    generate_cell,
    generate_scenarios,
    save_scenarios,
    load_scenarios,
)
from .aggregate import METRICS, GROUPINGS, AggregateRow, aggregate, find_reports, load_report
from .runner import Editor, ScenarioOutcome, BenchmarkSummary, report_path, run_scenario, run_benchmark

__all__ = [
    "DICTIONARY_KINDS",
    "AttributeDictionaries",
    "TEMPLATES",
    "ATTRIBUTE_KINDS",
    "render_prompt",
    "with_article",
    "source_prompt",
    "ManifestObject",
    "ManifestImage",
    "ImageManifest",
    "ScenarioObject",
    "Scenario",
    "scenario_id",
    "generate_cell",
    "generate_scenarios",
    "save_scenarios",
    "load_scenarios",
    "METRICS",
    "GROUPINGS",
    "AggregateRow",
    "aggregate",
    "find_reports",
    "load_report",
    "Editor",
    "ScenarioOutcome",
    "BenchmarkSummary",
    "report_path",
    "run_scenario",
    "run_benchmark",
]
