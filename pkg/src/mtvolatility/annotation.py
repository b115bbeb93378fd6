"""Human evaluation of translation changes: items, records, stats.

Each sampled variation is annotated in two phases. In the blind
DifferenceOnly phase the annotator sees only the two source sentences and
their translations and labels the differences; in the WithReference phase
the references are shown as well and the annotator additionally ranks the
two translations. Judgments are persisted to an append-only JSONL log with
monotone revision numbers; the latest record per (item, annotator, phase)
wins, and history is retained.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .metrics import ChangeClass

PHASE_DIFFERENCE_ONLY = "DifferenceOnly"
PHASE_WITH_REFERENCE = "WithReference"
PHASES = (PHASE_DIFFERENCE_ONLY, PHASE_WITH_REFERENCE)

CATEGORIES = ("WordForm", "Reordered", "Paraphrased", "AddRemove", "Other")
VERDICTS = ("OriginalBetter", "VariantBetter", "Equal")


class UnknownItemError(Exception):
    def __init__(self, item_id: str):
        super().__init__(f"unknown annotation item: {item_id}")
        self.item_id = item_id


class ValidationError(Exception):
    def __init__(self, violated_rule: str, message: str):
        super().__init__(message)
        self.violated_rule = violated_rule


@dataclass(frozen=True)
class AnnotationItem:
    """One annotation task: a variation quadruplet in one phase.

    The payload of a DifferenceOnly item never contains reference text.
    """

    id: str
    variation_id: str
    phase: str
    payload: dict

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "variation_id": self.variation_id,
            "phase": self.phase,
            "payload": dict(self.payload),
        }


@dataclass(frozen=True)
class AnnotationRecord:
    item_id: str
    annotator_id: str
    phase: str
    categories: tuple[str, ...]
    expected: bool
    quality_verdict: str | None = None
    timestamp: float = field(default_factory=time.time)

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "annotator_id": self.annotator_id,
            "phase": self.phase,
            "categories": list(self.categories),
            "expected": self.expected,
            "quality_verdict": self.quality_verdict,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationRecord":
        return cls(
            item_id=obj["item_id"],
            annotator_id=obj["annotator_id"],
            phase=obj["phase"],
            categories=tuple(obj.get("categories", [])),
            expected=bool(obj["expected"]),
            quality_verdict=obj.get("quality_verdict"),
            timestamp=obj.get("timestamp", 0.0),
        )


def validate_record(record: AnnotationRecord) -> None:
    """Raise ValidationError naming the violated rule, if any."""
    if record.phase not in PHASES:
        raise ValidationError("phase", f"unknown phase {record.phase!r}")
    unknown = [c for c in record.categories if c not in CATEGORIES]
    if unknown:
        raise ValidationError("categories", f"unknown categories: {unknown}")
    if len(set(record.categories)) != len(record.categories):
        raise ValidationError("categories", "duplicate category labels")
    if record.expected and record.categories:
        raise ValidationError(
            "expected_excludes_categories",
            "a change marked expected cannot carry difference categories",
        )
    if record.phase == PHASE_WITH_REFERENCE:
        if record.quality_verdict not in VERDICTS:
            raise ValidationError(
                "verdict_required",
                "WithReference records need a quality_verdict of "
                f"{'/'.join(VERDICTS)}, got {record.quality_verdict!r}",
            )
    elif record.quality_verdict is not None:
        raise ValidationError(
            "verdict_forbidden",
            "DifferenceOnly records must not carry a quality_verdict",
        )
    if not record.annotator_id:
        raise ValidationError("annotator_id", "annotator_id must be non-empty")


def build_items(variation_id: str, quadruplet: dict) -> list[AnnotationItem]:
    """Materialize both phase items for one sampled variation.

    ``quadruplet`` carries source_original/source_variant,
    translation_original/translation_variant, and the two references.
    """
    blind_payload = {
        key: quadruplet[key]
        for key in (
            "source_original",
            "source_variant",
            "translation_original",
            "translation_variant",
        )
    }
    ref_payload = dict(blind_payload)
    ref_payload["reference_original"] = quadruplet["reference_original"]
    ref_payload["reference_variant"] = quadruplet["reference_variant"]
    return [
        AnnotationItem(
            id=f"{variation_id}#blind",
            variation_id=variation_id,
            phase=PHASE_DIFFERENCE_ONLY,
            payload=blind_payload,
        ),
        AnnotationItem(
            id=f"{variation_id}#ref",
            variation_id=variation_id,
            phase=PHASE_WITH_REFERENCE,
            payload=ref_payload,
        ),
    ]


def sample_items(
    quadruplets: dict[str, dict], n: int, seed: int
) -> list[AnnotationItem]:
    """Seeded uniform sample of n variations, materialized in both phases.

    ``quadruplets`` maps variation_id to its payload fields. Sampling is
    without replacement over the sorted ids, so a fixed seed reproduces the
    same items regardless of dict ordering.
    """
    pool = sorted(quadruplets)
    if n > len(pool):
        raise ValueError(f"requested {n} items but the pool has only {len(pool)}")
    chosen = random.Random(seed).sample(pool, n)
    items: list[AnnotationItem] = []
    for variation_id in chosen:
        items.extend(build_items(variation_id, quadruplets[variation_id]))
    return items


class AnnotationLog:
    """Append-only JSONL store with serialized writes."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._rows: list[dict] = []
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._rows.append(json.loads(line))

    @property
    def revision(self) -> int:
        return self._rows[-1]["revision"] if self._rows else 0

    def append(self, record: AnnotationRecord) -> int:
        """Persist a validated record; returns its revision number."""
        validate_record(record)
        with self._lock:
            revision = self.revision + 1
            row = {"revision": revision, **record.to_json()}
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            self._rows.append(row)
        return revision

    def history(self) -> list[AnnotationRecord]:
        """Every row ever written, in append order."""
        with self._lock:
            return [AnnotationRecord.from_json(row) for row in self._rows]

    def latest(self) -> list[AnnotationRecord]:
        """The winning record per (item_id, annotator_id, phase)."""
        with self._lock:
            by_key: dict[tuple[str, str, str], dict] = {}
            for row in self._rows:
                by_key[(row["item_id"], row["annotator_id"], row["phase"])] = row
            return [AnnotationRecord.from_json(row) for row in by_key.values()]


@dataclass
class AnnotationStats:
    """Aggregates in the shape of the annotation breakdown report.

    Category counts are split by the Minor/Major/Borderline class of the
    underlying translation pair; multi-label records count once per label.
    Ratios are None when no applicable records exist.
    """

    category_counts: dict
    expected_ratio: float | None
    quality_change_ratio: float | None
    record_count: int

    def to_json(self) -> dict:
        return {
            "category_counts": self.category_counts,
            "expected_ratio": self.expected_ratio,
            "quality_change_ratio": self.quality_change_ratio,
            "record_count": self.record_count,
        }

    @classmethod
    def empty(cls) -> "AnnotationStats":
        return compute_stats([], {})


def compute_stats(
    records: list[AnnotationRecord], classes: dict[str, ChangeClass | str]
) -> AnnotationStats:
    """Pure aggregation over a record set.

    ``classes`` maps variation_id to its change class; items whose class is
    unknown are bucketed under "Unclassified".
    """
    category_counts = {
        category: {cls.value: 0 for cls in ChangeClass} for category in CATEGORIES
    }
    expected_values = []
    quality_changes = []
    for record in records:
        variation_id = record.item_id.rsplit("#", 1)[0]
        bucket = classes.get(variation_id)
        bucket = bucket.value if isinstance(bucket, ChangeClass) else bucket
        for category in record.categories:
            counts = category_counts[category]
            counts[bucket or "Unclassified"] = counts.get(bucket or "Unclassified", 0) + 1
        expected_values.append(record.expected)
        if record.phase == PHASE_WITH_REFERENCE:
            quality_changes.append(record.quality_verdict != "Equal")
    return AnnotationStats(
        category_counts=category_counts,
        expected_ratio=(
            sum(expected_values) / len(expected_values) if expected_values else None
        ),
        quality_change_ratio=(
            sum(quality_changes) / len(quality_changes) if quality_changes else None
        ),
        record_count=len(records),
    )
