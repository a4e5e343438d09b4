"""
Benchmark aggregation: grouped metric means over per-scenario reports.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ..core.constants import EDIT_TYPES
from ..core.files import read_json
from ..core.logging import warn
from ..metrics.report import LeakageReport

METRICS = ("tels", "tils", "editing_performance", "psnr", "ssim", "mse", "lpips", "structure_distance")

GROUPINGS = ("edit_type", "num_objects", "variant")


@dataclass
class AggregateRow:
    group_by: str  # "all", "edit_type", "num_objects" or "variant"
    group: str
    count: int
    means: dict[str, Optional[float]]
    mean_runtime_sec: Optional[float] = None

    def csv_row(self) -> dict:
        row = {"group_by": self.group_by, "group": self.group, "count": self.count}
        for metric in METRICS:
            value = self.means.get(metric)
            row[metric] = "" if value is None else f"{value:.6f}"
        return row


def _mean(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(np.mean(present))


def _group_order(group_by: str, keys: set) -> list:
    if group_by == "edit_type":
        return [t for t in EDIT_TYPES if t in keys] + sorted(keys - set(EDIT_TYPES))
    return sorted(keys)


def _row(group_by: str, group: str, reports: Sequence[LeakageReport]) -> AggregateRow:
    return AggregateRow(
        group_by=group_by,
        group=group,
        count=len(reports),
        means={m: _mean(r.metric(m) for r in reports) for m in METRICS},
        mean_runtime_sec=_mean(r.runtime_sec for r in reports),
    )


def aggregate(reports: Sequence[LeakageReport], groupings: Sequence[str] = ("edit_type", "num_objects")) -> list[AggregateRow]:
    """
    Overall means followed by per-group means.

    A metric missing from a report (None) is left out of that metric's mean.
    """
    if not reports:
        return []
    rows = [_row("all", "all", reports)]
    for group_by in groupings:
        groups: dict = {}
        for report in reports:
            groups.setdefault(getattr(report, group_by), []).append(report)
        for key in _group_order(group_by, set(groups)):
            rows.append(_row(group_by, str(key), groups[key]))
    return rows


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[dict]):
    """CSV with fixed column order, written through a temp file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_file = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_file, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fieldnames})
    tmp_file.replace(path)


def write_aggregate_csv(path: Path, rows: Sequence[AggregateRow]):
    write_csv(path, ["group_by", "group", "count", *METRICS], (r.csv_row() for r in rows))


def load_report(path: Path) -> Optional[LeakageReport]:
    """Read one report file; None (with a warning) if it is unreadable."""
    data = read_json(path)
    if data is None:
        warn(f"Unreadable report: {path}")
        return None
    try:
        return LeakageReport.from_dict(data)
    except TypeError as e:
        warn(f"Invalid report {path}: {e}")
        return None


def find_reports(root: Path) -> list[LeakageReport]:
    """All reports under any reports/ directory below root, sorted by path."""
    reports = []
    for path in sorted(Path(root).rglob("reports/*.json")):
        report = load_report(path)
        if report is not None:
            reports.append(report)
    return reports
