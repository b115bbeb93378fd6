"""Aggregation of measures, oscillations, and annotations into one report.

The report carries the scatter of (levenshtein, span, class) points per
variation, the share of each change class, corpus-level mean oscillations
per variation kind, the annotation breakdown, and full run provenance. Two
reports are comparable only when their provenance matches.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import AnnotationStats
from .metrics import ChangeClass, ChangeMeasure, OscillationStats, mean_oscillations


class ProvenanceError(Exception):
    """Inputs came from different runs and must not be aggregated."""


@dataclass(frozen=True)
class ScatterPoint:
    variation_id: str
    levenshtein: int
    span: int
    change_class: str


@dataclass
class VolatilityReport:
    scatter: list[ScatterPoint]
    class_shares: dict
    mean_oscillations: dict
    annotation_breakdown: dict | None
    run_metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "scatter": [
                {
                    "variation_id": p.variation_id,
                    "levenshtein": p.levenshtein,
                    "span": p.span,
                    "class": p.change_class,
                }
                for p in self.scatter
            ],
            "class_shares": self.class_shares,
            "mean_oscillations": self.mean_oscillations,
            "annotation_breakdown": self.annotation_breakdown,
            "run_metadata": self.run_metadata,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VolatilityReport":
        return cls(
            scatter=[
                ScatterPoint(
                    variation_id=p["variation_id"],
                    levenshtein=p["levenshtein"],
                    span=p["span"],
                    change_class=p["class"],
                )
                for p in obj["scatter"]
            ],
            class_shares=obj["class_shares"],
            mean_oscillations=obj["mean_oscillations"],
            annotation_breakdown=obj["annotation_breakdown"],
            run_metadata=obj["run_metadata"],
        )


def build_report(
    measures: dict[str, ChangeMeasure],
    oscillations: list[OscillationStats],
    annotation_stats: AnnotationStats | None,
    metadata: dict,
    source_run_ids: dict[str, str] | None = None,
) -> VolatilityReport:
    """Deterministic aggregation of one run's outputs.

    ``source_run_ids`` maps each input stage to the run id recorded in its
    sidecar; mixing ids raises ProvenanceError.
    """
    if source_run_ids:
        distinct = sorted(set(source_run_ids.values()))
        if len(distinct) > 1:
            raise ProvenanceError(
                f"inputs span multiple runs: {distinct} from {source_run_ids}"
            )
    scatter = [
        ScatterPoint(
            variation_id=variation_id,
            levenshtein=measure.levenshtein,
            span=measure.span,
            change_class=measure.change_class.value,
        )
        for variation_id, measure in sorted(measures.items())
    ]
    shares = {cls.value: 0.0 for cls in ChangeClass}
    if scatter:
        for point in scatter:
            shares[point.change_class] += 1
        shares = {name: count / len(scatter) for name, count in shares.items()}
    return VolatilityReport(
        scatter=scatter,
        class_shares=shares,
        mean_oscillations=mean_oscillations(oscillations),
        annotation_breakdown=annotation_stats.to_json() if annotation_stats else None,
        run_metadata=metadata,
    )


def export_json(report: VolatilityReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def import_json(path: str | Path) -> VolatilityReport:
    return VolatilityReport.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def export_csv(report: VolatilityReport, directory: str | Path) -> list[Path]:
    """Write plot-ready CSVs; returns the written paths.

    scatter.csv rows are `lev,span,class` per variation; oscillations.csv
    holds per-kind mean ranges; annotation_breakdown.csv the category/class
    counts.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    scatter_path = directory / "scatter.csv"
    with open(scatter_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lev", "span", "class"])
        for point in report.scatter:
            writer.writerow([point.levenshtein, point.span, point.change_class])
    written.append(scatter_path)

    osc_path = directory / "oscillations.csv"
    with open(osc_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "metric", "mean_range", "mean_std", "families"])
        for kind, metrics in sorted(report.mean_oscillations.items()):
            for metric, stats in sorted(metrics.items()):
                writer.writerow(
                    [kind, metric, stats["mean_range"], stats["mean_std"], stats["families"]]
                )
    written.append(osc_path)

    breakdown_path = directory / "annotation_breakdown.csv"
    with open(breakdown_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["category", "class", "count"])
        if report.annotation_breakdown:
            counts = report.annotation_breakdown["category_counts"]
            for category, by_class in sorted(counts.items()):
                for class_name, count in sorted(by_class.items()):
                    writer.writerow([category, class_name, count])
    written.append(breakdown_path)
    return written
