"""File-checkpointed pipeline stages.

Each stage reads and writes JSONL files in one output directory, so the
expensive translation step is resumable and every stage can be re-run in
isolation. A stage writes a ``<stage>.meta.json`` sidecar carrying the run
id (a content hash of inputs and parameters) and its parameters; downstream
stages propagate the run id and the report refuses to mix runs.

Stage files: pairs.jsonl, variations.jsonl, translations.jsonl,
measures.jsonl, scores.jsonl, oscillations.jsonl, annotations.jsonl,
report.json (+ CSV exports).
"""

from __future__ import annotations

import hashlib
import json
import warnings
from pathlib import Path

from . import adapter as adapter_mod
from . import corpus, metrics, ngram, report as report_mod, variations as var_mod
from .annotation import AnnotationLog, AnnotationStats, compute_stats
from .corpus import BpeScheme, SentencePair, Token
from .metrics import ChangeMeasure, ChangeClass, OscillationStats, SentenceScore
from .variations import Variation


def write_jsonl(path: str | Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


def write_meta(out_dir: Path, stage: str, run_id: str, params: dict) -> None:
    meta = {"run_id": run_id, "stage": stage, "params": params}
    (out_dir / f"{stage}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

def read_meta(out_dir: Path, stage: str) -> dict:
    path = out_dir / f"{stage}.meta.json"
    if not path.exists():
        raise FileNotFoundError(
            f"missing {path.name}; run the {stage} stage into {out_dir} first"
        )
    return json.loads(path.read_text(encoding="utf-8"))


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_run_id(parts: dict) -> str:
    return hashlib.sha256(
        json.dumps(parts, sort_keys=True).encode("utf-8")
    ).hexdigest()[:16]


def content_hash(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()[:16]


# ---------------------------------------------------------------------------
# serialization helpers

def pair_to_json(pair: SentencePair) -> dict:
    return {
        "id": pair.id,
        "source_raw": pair.source_raw,
        "target_raw": pair.target_raw,
        "source_tokens": corpus.surfaces(pair.source_tokens),
        "target_tokens": corpus.surfaces(pair.target_tokens),
        "language_pair": list(pair.language_pair),
    }


def pair_from_json(obj: dict) -> SentencePair:
    return SentencePair(
        id=obj["id"],
        source_tokens=tuple(Token(s) for s in obj["source_tokens"]),
        target_tokens=tuple(Token(s) for s in obj["target_tokens"]),
        source_raw=obj["source_raw"],
        target_raw=obj["target_raw"],
        language_pair=tuple(obj["language_pair"]),
    )


def variation_to_json(var: Variation) -> dict:
    return {
        "id": var.id,
        "parent_id": var.parent_id,
        "kind": var.kind,
        "edit": var.edit,
        "source_raw": corpus.detokenize(var.source_tokens),
        "target_raw": corpus.detokenize(var.target_tokens),
        "source_tokens": corpus.surfaces(var.source_tokens),
        "target_tokens": corpus.surfaces(var.target_tokens),
        "reference_modified": var.reference_modified,
    }


def variation_from_json(obj: dict) -> Variation:
    return Variation(
        id=obj["id"],
        parent_id=obj["parent_id"],
        kind=obj["kind"],
        source_tokens=tuple(Token(s) for s in obj["source_tokens"]),
        target_tokens=tuple(Token(s) for s in obj["target_tokens"]),
        edit=obj["edit"],
        reference_modified=obj["reference_modified"],
    )


# ---------------------------------------------------------------------------
# stages

def stage_counts(corpus_paths: list[str], out_dir: str | Path, dump: bool = False) -> Path:
    """Build the 5-gram cache used by the INS generator."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = ngram.build_counts(corpus_paths)
    cache = out_dir / "counts.bin"
    ngram.save_table(table, cache)
    if dump:
        ngram.dump_tsv(table, out_dir / "counts.tsv")
    return cache


def stage_generate(
    source_path: str,
    target_path: str,
    out_dir: str | Path,
    language_pair: tuple[str, str] = ("de", "en"),
    kinds: tuple[str, ...] = var_mod.KINDS,
    threshold: float = var_mod.DEFAULT_INS_THRESHOLD,
    k_min: int = var_mod.SUBNUM_MIN_OFFSET,
    k_max: int = var_mod.SUBNUM_MAX_OFFSET,
    counts_path: str | None = None,
    adverbs_path: str | None = None,
    genders_path: str | None = None,
    seed: int = 0,
) -> dict:
    """Load pairs, run the requested generators, write pairs + variations."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if adverbs_path:
        lexicon = var_mod.Lexicon.from_tsv(adverbs_path)
    else:
        # The shipped list is english<TAB>german; swap when German is source.
        lexicon = var_mod.default_adverb_lexicon(swap=language_pair[0] == "de")
    genders = (
        var_mod.GenderLexicon.from_tsv(genders_path)
        if genders_path
        else var_mod.default_gender_lexicon()
    )
    table = ngram.load_table(counts_path) if counts_path else None
    if "ins" in kinds and table is None:
        warnings.warn(
            "ins requested without --counts; no insertions will be generated",
            stacklevel=2,
        )

    pairs = corpus.load_parallel(source_path, target_path, language_pair)
    all_variations: list[Variation] = []
    for pair in pairs:
        all_variations.extend(
            var_mod.generate_all(
                pair,
                kinds=kinds,
                lexicon=lexicon,
                genders=genders,
                table=table,
                threshold=threshold,
                k_min=k_min,
                k_max=k_max,
            )
        )

    write_jsonl(out_dir / "pairs.jsonl", (pair_to_json(p) for p in pairs))
    write_jsonl(out_dir / "variations.jsonl", (variation_to_json(v) for v in all_variations))

    params = {
        "kinds": sorted(kinds),
        "threshold": threshold,
        "k_min": k_min,
        "k_max": k_max,
        "language_pair": list(language_pair),
        "seed": seed,
        "source_file": Path(source_path).name,
        "target_file": Path(target_path).name,
        "source_sha256": file_sha256(source_path),
        "target_sha256": file_sha256(target_path),
        "adverbs_lexicon": lexicon.name,
        "adverbs_hash": content_hash(sorted(lexicon.entries)),
        "genders_hash": content_hash(genders.pairs),
        "counts_file": Path(counts_path).name if counts_path else None,
        "counts_sha256": file_sha256(counts_path) if counts_path else None,
    }
    run_id = make_run_id(params)
    write_meta(out_dir, "generate", run_id, params)
    return {"pairs": len(pairs), "variations": len(all_variations), "run_id": run_id}


def _load_items(out_dir: Path) -> tuple[list[SentencePair], list[Variation]]:
    pairs = [pair_from_json(o) for o in read_jsonl(out_dir / "pairs.jsonl")]
    variants = [variation_from_json(o) for o in read_jsonl(out_dir / "variations.jsonl")]
    return pairs, variants


def stage_translate(
    out_dir: str | Path,
    adapter_spec: str,
    batch_size: int = adapter_mod.DEFAULT_BATCH_SIZE,
) -> dict:
    """Translate originals and variants; one JSONL row per item, in order.

    Source texts are the space-joined token sequences, so originals and
    variants reach the adapter in exactly the same normalization.
    """
    out_dir = Path(out_dir)
    meta = read_meta(out_dir, "generate")
    pairs, variants = _load_items(out_dir)
    translator = adapter_mod.from_spec(adapter_spec, batch_size=batch_size)

    items = [(p.id, corpus.detokenize(p.source_tokens)) for p in pairs]
    items += [(v.id, corpus.detokenize(v.source_tokens)) for v in variants]
    records = []
    for start in range(0, len(items), batch_size):
        records.extend(
            adapter_mod.translate_batch(items[start : start + batch_size], translator)
        )
    write_jsonl(
        out_dir / "translations.jsonl",
        (
            {
                "item_id": r.item_id,
                "output_raw": r.output_raw,
                "adapter_name": r.adapter_name,
                "latency_ms": r.latency_ms,
            }
            for r in records
        ),
    )
    write_meta(
        out_dir,
        "translate",
        meta["run_id"],
        {"adapter": adapter_spec, "batch_size": batch_size},
    )
    return {"translated": len(records), "run_id": meta["run_id"]}


def _translation_units(
    translations: dict[str, str], item_id: str, scheme: BpeScheme | None
) -> list[str]:
    tokens = corpus.tokenize(translations[item_id])
    if scheme is not None:
        tokens = corpus.apply_bpe(tokens, scheme)
    return corpus.render_units(tokens)


def stage_measure(out_dir: str | Path, bpe_path: str | None = None) -> dict:
    """Edit distance, span, and class between each variant's translation
    and its parent's, on subword units when a BPE scheme is given."""
    out_dir = Path(out_dir)
    meta = read_meta(out_dir, "translate")
    _, variants = _load_items(out_dir)
    translations = {
        row["item_id"]: row["output_raw"]
        for row in read_jsonl(out_dir / "translations.jsonl")
    }
    scheme = corpus.load_bpe_scheme(bpe_path) if bpe_path else None

    rows = []
    for variant in variants:
        if variant.id not in translations or variant.parent_id not in translations:
            continue
        original = _translation_units(translations, variant.parent_id, scheme)
        varied = _translation_units(translations, variant.id, scheme)
        measure = metrics.measure_pair(original, varied)
        rows.append(
            {
                "variation_id": variant.id,
                "levenshtein": measure.levenshtein,
                "span": measure.span,
                "class": measure.change_class.value,
            }
        )
    write_jsonl(out_dir / "measures.jsonl", rows)
    write_meta(
        out_dir,
        "measure",
        meta["run_id"],
        {"bpe": Path(bpe_path).name if bpe_path else None},
    )
    return {"measured": len(rows), "run_id": meta["run_id"]}


def stage_score(out_dir: str | Path) -> dict:
    """Sentence scores for every translated item against its reference.

    Variants that modify the reference are scored against the modified one;
    INS variants and originals against the unmodified reference. Scores are
    word-level.
    """
    out_dir = Path(out_dir)
    meta = read_meta(out_dir, "translate")
    pairs, variants = _load_items(out_dir)
    by_pair = {p.id: p for p in pairs}
    translations = {
        row["item_id"]: row["output_raw"]
        for row in read_jsonl(out_dir / "translations.jsonl")
    }

    rows = []
    def score_item(item_id: str, reference_tokens) -> None:
        hypothesis = corpus.surfaces(corpus.tokenize(translations[item_id]))
        reference = corpus.surfaces(reference_tokens)
        score = metrics.score_sentence(hypothesis, reference)
        rows.append(
            {
                "item_id": item_id,
                "bleu": score.bleu,
                "meteor": score.meteor,
                "ter": score.ter,
                "length_ratio": score.length_ratio,
            }
        )

    for pair in pairs:
        if pair.id in translations:
            score_item(pair.id, pair.target_tokens)
    for variant in variants:
        if variant.id not in translations:
            continue
        reference = (
            variant.target_tokens
            if variant.reference_modified
            else by_pair[variant.parent_id].target_tokens
        )
        score_item(variant.id, reference)

    write_jsonl(out_dir / "scores.jsonl", rows)
    write_meta(out_dir, "score", meta["run_id"], {})
    return {"scored": len(rows), "run_id": meta["run_id"]}


def stage_oscillate(out_dir: str | Path) -> dict:
    """Per-family oscillation statistics over the sentence scores."""
    out_dir = Path(out_dir)
    meta = read_meta(out_dir, "score")
    _, variants = _load_items(out_dir)
    scores = {
        row["item_id"]: SentenceScore(
            bleu=row["bleu"],
            meteor=row["meteor"],
            ter=row["ter"],
            length_ratio=row["length_ratio"],
        )
        for row in read_jsonl(out_dir / "scores.jsonl")
    }
    families = var_mod.group_families([v for v in variants if v.id in scores])
    rows = []
    for family in families:
        stats = metrics.oscillation(
            family.parent_id,
            family.kind,
            [scores[member.id] for member in family.members],
        )
        for metric in metrics.SCORE_METRICS:
            entry = stats.stats[metric]
            rows.append(
                {
                    "parent_id": family.parent_id,
                    "kind": family.kind,
                    "metric": metric,
                    "min": entry["min"],
                    "max": entry["max"],
                    "range": entry["range"],
                    "mean": entry["mean"],
                    "std": entry["std"],
                }
            )
    write_jsonl(out_dir / "oscillations.jsonl", rows)
    write_meta(out_dir, "oscillate", meta["run_id"], {})
    return {"families": len(families), "run_id": meta["run_id"]}


def load_measures(out_dir: Path) -> dict[str, ChangeMeasure]:
    return {
        row["variation_id"]: ChangeMeasure(
            levenshtein=row["levenshtein"],
            span=row["span"],
            change_class=ChangeClass(row["class"]),
        )
        for row in read_jsonl(out_dir / "measures.jsonl")
    }


def load_oscillations(out_dir: Path) -> list[OscillationStats]:
    grouped: dict[tuple[str, str], dict] = {}
    for row in read_jsonl(out_dir / "oscillations.jsonl"):
        grouped.setdefault((row["parent_id"], row["kind"]), {})[row["metric"]] = {
            "min": row["min"],
            "max": row["max"],
            "range": row["range"],
            "mean": row["mean"],
            "std": row["std"],
        }
    return [
        OscillationStats(parent_id=parent_id, kind=kind, stats=stats)
        for (parent_id, kind), stats in sorted(grouped.items())
    ]


def annotation_quadruplets(out_dir: Path) -> dict[str, dict]:
    """Assemble S/S_m/T/T_m/R/R_m payloads for every measurable variation."""
    pairs, variants = _load_items(out_dir)
    by_pair = {p.id: p for p in pairs}
    translations = {
        row["item_id"]: row["output_raw"]
        for row in read_jsonl(out_dir / "translations.jsonl")
    }
    measured = {row["variation_id"] for row in read_jsonl(out_dir / "measures.jsonl")}
    quadruplets = {}
    for variant in variants:
        if variant.id not in measured:
            continue
        if variant.id not in translations or variant.parent_id not in translations:
            continue
        parent = by_pair[variant.parent_id]
        quadruplets[variant.id] = {
            "source_original": corpus.detokenize(parent.source_tokens),
            "source_variant": corpus.detokenize(variant.source_tokens),
            "translation_original": translations[parent.id],
            "translation_variant": translations[variant.id],
            "reference_original": corpus.detokenize(parent.target_tokens),
            "reference_variant": corpus.detokenize(variant.target_tokens),
        }
    return quadruplets


def stage_report(out_dir: str | Path) -> Path:
    """Aggregate everything present in the run directory into report.json."""
    out_dir = Path(out_dir)
    run_ids = {}
    params = {}
    for stage in ("generate", "translate", "measure", "score", "oscillate"):
        meta = read_meta(out_dir, stage)
        run_ids[stage] = meta["run_id"]
        params[stage] = meta["params"]

    measures = load_measures(out_dir)
    oscillations = load_oscillations(out_dir)
    annotations_path = out_dir / "annotations.jsonl"
    if annotations_path.exists():
        log = AnnotationLog(annotations_path)
        classes = {vid: m.change_class for vid, m in measures.items()}
        stats: AnnotationStats | None = compute_stats(log.latest(), classes)
    else:
        stats = None

    metadata = {
        "run_id": run_ids["generate"],
        "stages": params,
    }
    report = report_mod.build_report(
        measures, oscillations, stats, metadata, source_run_ids=run_ids
    )
    report_path = out_dir / "report.json"
    report_mod.export_json(report, report_path)
    report_mod.export_csv(report, out_dir)
    return report_path
