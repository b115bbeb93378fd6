"""Edit-distance and sentence-level translation metrics.

Distances (levenshtein, change_span, minor/major classification) compare two
translations of a sentence variation on subword units. Sentence scores
(BLEU, METEOR, TER, LengthRatio) compare a translation against its reference
on full-word tokens. Oscillation statistics summarise score spread over a
family of variations of one parent sentence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from statistics import mean, pstdev
from typing import Sequence

CLASS_THRESHOLD = 10

# Reduced-METEOR parameters (the cited tool's defaults).
METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5

# Bounds on the TER greedy shift search.
TER_MAX_SHIFT_LENGTH = 10
TER_MAX_SHIFTS = 50

SCORE_METRICS = ("bleu", "meteor", "ter", "length_ratio")


class ChangeClass(str, Enum):
    MINOR = "Minor"
    MAJOR = "Major"
    BORDERLINE = "Borderline"


@dataclass(frozen=True)
class ChangeMeasure:
    levenshtein: int
    span: int
    change_class: ChangeClass


@dataclass(frozen=True)
class SentenceScore:
    bleu: float
    meteor: float
    ter: float
    length_ratio: float

    def get(self, metric: str) -> float:
        return getattr(self, metric)


@dataclass(frozen=True)
class OscillationStats:
    """Per-metric min/max/range/mean/std over one variation family."""

    parent_id: str
    kind: str
    stats: dict  # metric -> {"min", "max", "range", "mean", "std"}


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two token sequences."""
    n, m = len(a), len(b)
    if n > m:
        a, b, n, m = b, a, m, n
    previous = list(range(n + 1))
    for i in range(1, m + 1):
        current = [i] + [0] * n
        for j in range(1, n + 1):
            substitution = previous[j - 1] + (a[j - 1] != b[i - 1])
            current[j] = min(previous[j] + 1, current[j - 1] + 1, substitution)
        previous = current
    return previous[n]


def change_span(a: Sequence, b: Sequence) -> int:
    """Distance covered between the first and last differing positions.

    Computed from the longest common prefix p and the longest common suffix s
    of the remainders: span = max(0, max(|a|,|b|) - p - s - 1). A one-token
    substitution therefore spans 0; equal sequences span 0.
    """
    if list(a) == list(b):
        return 0
    p = 0
    limit = min(len(a), len(b))
    while p < limit and a[p] == b[p]:
        p += 1
    ra, rb = a[p:], b[p:]
    s = 0
    limit = min(len(ra), len(rb))
    while s < limit and ra[len(ra) - 1 - s] == rb[len(rb) - 1 - s]:
        s += 1
    return max(0, max(len(a), len(b)) - p - s - 1)


def classify(lev: int, span: int) -> ChangeClass:
    """Minor/major thresholding at 10, with an explicit Borderline class.

    Values where exactly one metric exceeds the threshold, or either sits
    exactly on it, fall into Borderline rather than being silently binned.
    """
    if lev > CLASS_THRESHOLD and span > CLASS_THRESHOLD:
        return ChangeClass.MAJOR
    if lev < CLASS_THRESHOLD and span < CLASS_THRESHOLD:
        return ChangeClass.MINOR
    return ChangeClass.BORDERLINE


def measure_pair(
    original_translation: Sequence, variant_translation: Sequence
) -> ChangeMeasure:
    """Bundle levenshtein, span, and class for a pair of translations."""
    lev = levenshtein(original_translation, variant_translation)
    span = change_span(original_translation, variant_translation)
    return ChangeMeasure(lev, span, classify(lev, span))


def _ngram_counts(tokens: Sequence, n: int) -> dict:
    counts: dict = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i : i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def sentence_bleu(hypothesis: Sequence, reference: Sequence) -> float:
    """Sentence-level BLEU-4 in [0, 100].

    Precisions for n >= 2 get add-one smoothing; the unigram precision is
    unsmoothed, so a hypothesis sharing no unigram with the reference
    scores 0. Standard brevity penalty.
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    if not hypothesis:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        hyp_counts = _ngram_counts(hypothesis, n)
        ref_counts = _ngram_counts(reference, n)
        matched = sum(min(c, ref_counts.get(g, 0)) for g, c in hyp_counts.items())
        total = max(0, len(hypothesis) - n + 1)
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_sum += 0.25 * math.log(precision)
    if len(hypothesis) >= len(reference):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(reference) / len(hypothesis))
    return 100.0 * brevity * math.exp(log_sum)


def _meteor_alignment(hypothesis: Sequence, reference: Sequence) -> list[tuple[int, int]]:
    """Greedy unigram alignment: exact-match stage, then lowercase stage."""
    hyp_free = list(range(len(hypothesis)))
    ref_free = list(range(len(reference)))
    pairs: list[tuple[int, int]] = []
    for exact in (True, False):
        for i in list(hyp_free):
            h = hypothesis[i] if exact else str(hypothesis[i]).lower()
            for j in ref_free:
                r = reference[j] if exact else str(reference[j]).lower()
                if h == r:
                    pairs.append((i, j))
                    hyp_free.remove(i)
                    ref_free.remove(j)
                    break
    pairs.sort()
    return pairs


def sentence_meteor(hypothesis: Sequence, reference: Sequence) -> float:
    """Reduced METEOR in [0, 100]: exact + lowercase unigram matching only.

    F-mean of precision and recall weighted by METEOR_ALPHA, discounted by a
    fragmentation penalty over chunks (maximal runs of matches contiguous in
    both sentences). No stemming, synonymy, or paraphrase stages.
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    pairs = _meteor_alignment(hypothesis, reference)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(hypothesis)
    recall = matches / len(reference)
    # Denominator written as a*(P-R)+R so that P == R gives F == P exactly.
    f_mean = (precision * recall) / (METEOR_ALPHA * (precision - recall) + recall)
    chunks = 1
    for (h1, r1), (h2, r2) in zip(pairs, pairs[1:]):
        if h2 != h1 + 1 or r2 != r1 + 1:
            chunks += 1
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    return 100.0 * f_mean * (1.0 - penalty)


def _matching_blocks(hyp: list, ref: Sequence):
    """Maximal equal runs (hyp_start, ref_start, length) at differing offsets."""
    for i in range(len(hyp)):
        for j in range(len(ref)):
            if i == j or hyp[i] != ref[j]:
                continue
            length = 1
            while (
                i + length < len(hyp)
                and j + length < len(ref)
                and hyp[i + length] == ref[j + length]
                and length < TER_MAX_SHIFT_LENGTH
            ):
                length += 1
            yield i, j, length


def _best_shift(hyp: list, ref: Sequence, current_distance: int):
    """The block move giving the largest edit-distance reduction, if any."""
    best_gain = 0
    best_result = None
    for i, j, length in _matching_blocks(hyp, ref):
        remainder = hyp[:i] + hyp[i + length :]
        shifted = remainder[:j] + hyp[i : i + length] + remainder[j:]
        gain = current_distance - levenshtein(shifted, ref)
        if gain > best_gain:
            best_gain = gain
            best_result = shifted
    return best_gain, best_result


def sentence_ter(hypothesis: Sequence, reference: Sequence) -> float:
    """Translation Edit Rate as a percentage of the reference length.

    Edits are insertions, deletions, substitutions, and block shifts; each
    shift costs 1. Shifts are found greedily: the move yielding the largest
    reduction in remaining edit distance is applied until no move helps,
    bounded by TER_MAX_SHIFTS iterations and TER_MAX_SHIFT_LENGTH tokens.
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    hyp = list(hypothesis)
    shifts = 0
    distance = levenshtein(hyp, reference)
    while shifts < TER_MAX_SHIFTS and distance > 0:
        gain, shifted = _best_shift(hyp, reference, distance)
        if gain <= 0:
            break
        hyp = shifted
        distance -= gain
        shifts += 1
    return 100.0 * (shifts + distance) / len(reference)


def length_ratio(hypothesis: Sequence, reference: Sequence) -> float:
    """Hypothesis length over reference length, as a percentage."""
    if not reference:
        raise ValueError("reference must be non-empty")
    return 100.0 * len(hypothesis) / len(reference)


def score_sentence(hypothesis: Sequence, reference: Sequence) -> SentenceScore:
    return SentenceScore(
        bleu=sentence_bleu(hypothesis, reference),
        meteor=sentence_meteor(hypothesis, reference),
        ter=sentence_ter(hypothesis, reference),
        length_ratio=length_ratio(hypothesis, reference),
    )


def oscillation(
    parent_id: str, kind: str, scores: Sequence[SentenceScore]
) -> OscillationStats:
    """Min/max/range/mean/std of each metric over one family's scores."""
    if not scores:
        raise ValueError(f"family {parent_id} has no scored members")
    stats = {}
    for metric in SCORE_METRICS:
        values = [s.get(metric) for s in scores]
        stats[metric] = {
            "min": min(values),
            "max": max(values),
            "range": max(values) - min(values),
            "mean": mean(values),
            "std": pstdev(values),
        }
    return OscillationStats(parent_id=parent_id, kind=kind, stats=stats)


def mean_oscillations(families: Sequence[OscillationStats]) -> dict:
    """Corpus-level mean of per-family ranges, per kind and metric."""
    by_kind: dict[str, list[OscillationStats]] = {}
    for fam in families:
        by_kind.setdefault(fam.kind, []).append(fam)
    result = {}
    for kind in sorted(by_kind):
        fams = by_kind[kind]
        result[kind] = {
            metric: {
                "mean_range": mean(f.stats[metric]["range"] for f in fams),
                "mean_std": mean(f.stats[metric]["std"] for f in fams),
                "families": len(fams),
            }
            for metric in SCORE_METRICS
        }
    return result
