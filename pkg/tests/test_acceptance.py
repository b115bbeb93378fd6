"""Acceptance suite: one test per release criterion.

Each criterion runs at its stated tolerance and time bound; the conftest
hook prints one PASS/FAIL line per criterion. The suite uses only mock
adapters and generated fixtures, so it runs anywhere.
"""

import json
import random
import time
from functools import lru_cache

import pytest

from mtvolatility import pipeline
from mtvolatility.adapter import mock_identity, translate_batch
from mtvolatility.cli import main
from mtvolatility.corpus import surfaces, tokenize
from mtvolatility.metrics import (
    ChangeClass,
    ChangeMeasure,
    classify,
    levenshtein,
    measure_pair,
    oscillation,
    score_sentence,
    sentence_bleu,
    sentence_meteor,
    sentence_ter,
)
from mtvolatility.ngram import count_lines
from mtvolatility.report import build_report
from mtvolatility.variations import generate_subnum, group_families, invert_subnum

from conftest import make_pair, write_parallel


def oracle_levenshtein(a, b):
    """Independent DP reference (recursive, memoized)."""

    @lru_cache(maxsize=None)
    def dist(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            dist(i - 1, j) + 1,
            dist(i, j - 1) + 1,
            dist(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return dist(len(a), len(b))


def test_levenshtein_oracle_equivalence():
    """1,000 seeded random pairs (len <= 12, alphabet 5) match the oracle."""
    rng = random.Random(1234)
    symbols = ["a", "b", "c", "d", "e"]
    started = time.perf_counter()
    for _ in range(1000):
        a = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 12)))
        b = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 12)))
        assert levenshtein(a, b) == oracle_levenshtein(a, b)
    assert time.perf_counter() - started < 5.0


def test_single_token_substitution_ideal_case():
    """500 substitution variants through the identity adapter: span 0, lev <= 2."""
    started = time.perf_counter()
    violations = 0
    cases = 0
    for i in range(100):
        number = str(17 + i)
        text = f"Messwert {number} wurde am Standort {i + 3000} Nord erfasst ."
        pair = make_pair(f"p{i}", text, text, langs=("de", "de"))
        variants = [v for v in generate_subnum(pair) if v.edit["number"] == number]
        assert len(variants) == 5
        items = [(pair.id, pair.source_raw)] + [
            (v.id, " ".join(surfaces(v.source_tokens))) for v in variants
        ]
        records = {r.item_id: r.output_raw for r in translate_batch(items, mock_identity())}
        original_units = surfaces(tokenize(records[pair.id]))
        for variant in variants:
            units = surfaces(tokenize(records[variant.id]))
            measure = measure_pair(original_units, units)
            cases += 1
            if measure.span != 0 or measure.levenshtein > 2:
                violations += 1
    assert cases == 500
    assert violations == 0
    assert time.perf_counter() - started < 5.0


def test_classification_table_exhaustive():
    """Thresholding over every (lev, span) in [0, 20]^2."""
    for lev in range(21):
        for span in range(21):
            expected = (
                ChangeClass.MAJOR
                if lev > 10 and span > 10
                else ChangeClass.MINOR
                if lev < 10 and span < 10
                else ChangeClass.BORDERLINE
            )
            assert classify(lev, span) is expected
    assert classify(11, 11) is ChangeClass.MAJOR
    assert classify(9, 9) is ChangeClass.MINOR
    assert classify(10, 10) is ChangeClass.BORDERLINE
    assert classify(11, 9) is ChangeClass.BORDERLINE


def test_insertion_probability_and_gapped_sums():
    """P(c | a b _ d e) = 2/3 on the 4-line corpus; invariant on 10k lines."""
    from mtvolatility.corpus import Token
    from mtvolatility.ngram import insertion_probability

    started = time.perf_counter()
    table = count_lines(["a b c d e", "a b c d e", "a b x d e", "a b c d f"])
    assert insertion_probability(table, *(Token(w) for w in "abcde")) == 2 / 3

    rng = random.Random(99)
    vocabulary = [f"w{i}" for i in range(30)]
    lines = [
        " ".join(rng.choice(vocabulary) for _ in range(rng.randint(5, 12)))
        for _ in range(10_000)
    ]
    big = count_lines(lines)
    resummed = {}
    for window, count in big.five_gram_counts.items():
        gap = (window[0], window[1], window[3], window[4])
        resummed[gap] = resummed.get(gap, 0) + count
    assert resummed == big.gapped_counts
    assert time.perf_counter() - started < 10.0


def test_subnum_generator_offsets_and_inversion():
    """200 single-number pairs: exactly 5 offsets, both sides, invertible."""
    violations = 0
    for i in range(200):
        number = str(3 + i)
        pair = make_pair(
            f"p{i}",
            f"Der Wert {number} steht im Bericht .",
            f"The value {number} appears in the report .",
        )
        variants = generate_subnum(pair)
        if len(variants) != 5:
            violations += 1
            continue
        for k, variant in zip(range(1, 6), variants):
            expected = str(int(number) + k)
            if variant.edit["offset"] != k:
                violations += 1
            if surfaces(variant.source_tokens).count(expected) != 1:
                violations += 1
            if surfaces(variant.target_tokens).count(expected) != 1:
                violations += 1
            source, target = invert_subnum(variant)
            if source != pair.source_tokens or target != pair.target_tokens:
                violations += 1
    assert violations == 0


def test_zero_oscillation_baseline():
    """Identity adapter on SUBNUM families: every metric range is exactly 0."""
    families_checked = 0
    for i in range(100):
        number = str(40 + i)
        text = f"Eintrag {number} besteht aus genau sieben Worten ."
        pair = make_pair(f"p{i}", text, text, langs=("xx", "xx"))
        variants = generate_subnum(pair)
        families = group_families(variants)
        assert len(families) == 1
        items = [(v.id, " ".join(surfaces(v.source_tokens))) for v in variants]
        outputs = {r.item_id: r.output_raw for r in translate_batch(items, mock_identity())}
        scores = []
        for variant in families[0].members:
            hypothesis = surfaces(tokenize(outputs[variant.id]))
            reference = surfaces(variant.target_tokens)  # modified reference
            scores.append(score_sentence(hypothesis, reference))
        stats = oscillation(pair.id, "subnum", scores)
        for metric in ("bleu", "meteor", "ter", "length_ratio"):
            assert stats.stats[metric]["range"] == 0.0
        families_checked += 1
    assert families_checked == 100


def test_ter_shift_and_shift_free_equality():
    """One shift scores 25.0; without shifts TER equals the Levenshtein rate."""
    assert sentence_ter("c d a b".split(), "a b c d".split()) == 25.0

    rng = random.Random(77)
    checked = 0
    for case in range(200):
        if case % 4 == 0:
            # identical pair
            ref = [f"t{rng.randint(0, 9)}" for _ in range(rng.randint(1, 10))]
            hyp = list(ref)
        elif case % 4 == 1:
            # unique-token reference with one out-of-vocabulary substitution
            length = rng.randint(2, 10)
            ref = [f"u{case}_{j}" for j in range(length)]
            hyp = list(ref)
            hyp[rng.randrange(length)] = "zzz"
        else:
            # disjoint vocabularies
            hyp = [f"h{rng.randint(0, 5)}" for _ in range(rng.randint(1, 10))]
            ref = [f"r{rng.randint(0, 5)}" for _ in range(rng.randint(1, 10))]
        assert sentence_ter(hyp, ref) == 100.0 * levenshtein(hyp, ref) / len(ref)
        checked += 1
    assert checked == 200


def test_sentence_metric_sanity():
    """Exact values for the identity case and the two-token swap."""
    reference = "the cat is on the mat".split()
    score = score_sentence(list(reference), list(reference))
    assert score.bleu == 100.0
    assert score.meteor == 100.0 * (1.0 - 0.5 * (1.0 / len(reference)) ** 3)
    assert score.ter == 0.0
    assert score.length_ratio == 100.0
    assert sentence_meteor(["b", "a"], ["a", "b"]) == 50.0
    assert sentence_bleu(list(reference), list(reference)) == 100.0


def test_end_to_end_determinism(tmp_path):
    """Two pipeline runs with the perturbing mock give byte-identical reports."""
    started = time.perf_counter()
    sources = [f"Der Bericht {i + 20} umfasst {i + 500} Seiten insgesamt ." for i in range(100)]
    targets = [f"The report {i + 20} spans {i + 500} pages in total ." for i in range(100)]
    src, tgt = write_parallel(tmp_path, "pairs100", sources, targets)

    blobs = []
    for run in ("run_a", "run_b"):
        out = tmp_path / run
        argv_base = ["--out", str(out)]
        assert main(["generate", "--pairs", str(src), str(tgt),
                     "--kinds", "subnum", "--seed", "7"] + argv_base) == 0
        assert main(["translate", "--adapter", "mock:perturb:7:0.1"] + argv_base) == 0
        assert main(["measure"] + argv_base) == 0
        assert main(["score"] + argv_base) == 0
        assert main(["oscillate"] + argv_base) == 0
        assert main(["report"] + argv_base) == 0
        blobs.append((out / "report.json").read_bytes())

    assert blobs[0] == blobs[1]
    report = json.loads(blobs[0])
    assert report["scatter"]
    assert time.perf_counter() - started < 60.0


def test_report_major_share_arithmetic():
    """18 Major out of 100 measures yields a major share of exactly 0.18."""
    measures = {}
    for i in range(82):
        measures[f"v{i:03}"] = ChangeMeasure(2, 0, ChangeClass.MINOR)
    for i in range(82, 100):
        measures[f"v{i:03}"] = ChangeMeasure(14, 12, ChangeClass.MAJOR)
    report = build_report(measures, [], None, {})
    assert report.class_shares["Major"] == 0.18
    assert report.class_shares["Minor"] == 0.82
    assert sum(report.class_shares.values()) == pytest.approx(1.0, abs=1e-9)
