"""Command-line entry point wiring the pipeline end to end.

Stages are file-checkpointed and independently re-runnable:

  mtvol counts --corpus train.de --out run/
  mtvol generate --pairs test.de test.en --langs de-en --kinds subnum --out run/
  mtvol translate --adapter cmd:my-nmt-system --out run/
  mtvol measure --bpe merges.txt --out run/
  mtvol score --out run/
  mtvol oscillate --out run/
  mtvol annotate serve --sample 400 --seed 1 --listen 127.0.0.1:8008 --out run/
  mtvol report --out run/
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .adapter import DEFAULT_BATCH_SIZE
from .annotation import AnnotationLog, sample_items
from .service import AnnotationService, serve
from .variations import DEFAULT_INS_THRESHOLD, KINDS, SUBNUM_MAX_OFFSET, SUBNUM_MIN_OFFSET


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtvol",
        description="Measure volatility of a black-box translation system "
        "under meaning-preserving sentence variations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counts", help="build the 5-gram cache for INS")
    p.add_argument("--corpus", nargs="+", required=True, metavar="FILE")
    p.add_argument("--out", required=True)
    p.add_argument("--dump", action="store_true", help="also write counts.tsv")

    p = sub.add_parser("generate", help="generate sentence variations")
    p.add_argument("--pairs", nargs=2, required=True, metavar=("SRC", "TGT"))
    p.add_argument("--langs", default="de-en", help="language pair, e.g. de-en")
    p.add_argument("--kinds", default=",".join(KINDS), help="comma-separated subset")
    p.add_argument("--threshold", type=float, default=DEFAULT_INS_THRESHOLD)
    p.add_argument("--k-min", type=int, default=SUBNUM_MIN_OFFSET)
    p.add_argument("--k-max", type=int, default=SUBNUM_MAX_OFFSET)
    p.add_argument("--counts", help="counts.bin cache from the counts stage")
    p.add_argument("--adverbs", help="replacement adverb lexicon TSV")
    p.add_argument("--genders", help="replacement gender pronoun TSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("translate", help="translate originals and variants")
    p.add_argument(
        "--adapter",
        required=True,
        help="cmd:<command> | file:<path> | http:<url> | mock:identity | "
        "mock:perturb:<seed>:<rate> | mock:scripted:<tsv>",
    )
    p.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    p.add_argument("--out", required=True)

    p = sub.add_parser("measure", help="edit distance/span/class per variation")
    p.add_argument("--bpe", help="BPE merges file; omit to measure on words")
    p.add_argument("--out", required=True)

    p = sub.add_parser("score", help="sentence BLEU/METEOR/TER/LengthRatio")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oscillate", help="per-family oscillation statistics")
    p.add_argument("--out", required=True)

    p = sub.add_parser("annotate", help="human annotation service")
    annotate_sub = p.add_subparsers(dest="annotate_command", required=True)
    p = annotate_sub.add_parser("serve", help="serve annotation tasks over HTTP")
    p.add_argument("--listen", default="127.0.0.1:8008", metavar="HOST:PORT")
    p.add_argument("--sample", type=int, required=True, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ui", help="directory with the built annotator UI")
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="aggregate a run into report.json + CSVs")
    p.add_argument("--out", required=True)

    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "counts":
        cache = pipeline.stage_counts(args.corpus, args.out, dump=args.dump)
        print(f"wrote {cache}")
    elif args.command == "generate":
        langs = tuple(args.langs.split("-"))
        if len(langs) != 2:
            raise ValueError(f"--langs must look like de-en, got {args.langs!r}")
        kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
        unknown = [k for k in kinds if k not in KINDS]
        if unknown:
            raise ValueError(f"unknown kinds {unknown}; valid: {', '.join(KINDS)}")
        result = pipeline.stage_generate(
            args.pairs[0],
            args.pairs[1],
            args.out,
            language_pair=langs,
            kinds=kinds,
            threshold=args.threshold,
            k_min=args.k_min,
            k_max=args.k_max,
            counts_path=args.counts,
            adverbs_path=args.adverbs,
            genders_path=args.genders,
            seed=args.seed,
        )
        print(
            f"run {result['run_id']}: {result['pairs']} pairs, "
            f"{result['variations']} variations"
        )
    elif args.command == "translate":
        result = pipeline.stage_translate(
            args.out, args.adapter, batch_size=args.batch_size
        )
        print(f"run {result['run_id']}: translated {result['translated']} items")
    elif args.command == "measure":
        result = pipeline.stage_measure(args.out, bpe_path=args.bpe)
        print(f"run {result['run_id']}: measured {result['measured']} variations")
    elif args.command == "score":
        result = pipeline.stage_score(args.out)
        print(f"run {result['run_id']}: scored {result['scored']} items")
    elif args.command == "oscillate":
        result = pipeline.stage_oscillate(args.out)
        print(f"run {result['run_id']}: {result['families']} families")
    elif args.command == "annotate":
        return _serve_annotations(args)
    elif args.command == "report":
        path = pipeline.stage_report(args.out)
        print(f"wrote {path}")
    return 0


def _serve_annotations(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    quadruplets = pipeline.annotation_quadruplets(out_dir)
    items = sample_items(quadruplets, args.sample, args.seed)
    classes = {
        vid: measure.change_class
        for vid, measure in pipeline.load_measures(out_dir).items()
    }
    log = AnnotationLog(out_dir / "annotations.jsonl")
    ui_dir = args.ui or _default_ui_dir()
    service = AnnotationService(items, log, classes=classes, ui_dir=ui_dir)
    host, _, port = args.listen.partition(":")
    server = serve(service, host, int(port or 0))
    actual = f"{server.server_address[0]}:{server.server_address[1]}"
    print(f"serving {len(items)} annotation tasks on http://{actual}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def _default_ui_dir() -> str | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except Exception as exc:  # surface stage failures as structured errors
        diagnostic = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(diagnostic), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
