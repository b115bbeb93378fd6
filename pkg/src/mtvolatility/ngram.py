"""5-gram statistics and the bidirectional insertion probability.

The probability of inserting word w3 between contexts (w1 w2) and (w4 w5)
is the ratio of the full 5-gram count to the gapped-context count:

    P(w3 | w1 w2 _ w4 w5) = C(w1 w2 w3 w4 w5) / C(w1 w2 . w4 w5)

Counting is word-level (pre-BPE) and never crosses sentence boundaries.
An unseen gapped context yields probability 0; no smoothing is applied.
"""

from __future__ import annotations

import hashlib
import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Token, tokenize

_MAGIC = b"MTVNGRAM"
_FORMAT_VERSION = 1

FiveGram = tuple[str, str, str, str, str]
GappedContext = tuple[str, str, str, str]


@dataclass
class NGramTable:
    """5-gram counts plus the gapped-context index derived from them."""

    five_gram_counts: dict[FiveGram, int] = field(default_factory=dict)
    gapped_counts: dict[GappedContext, int] = field(default_factory=dict)
    middle_index: dict[GappedContext, dict[str, int]] = field(default_factory=dict)
    total_windows: int = 0
    provenance: dict = field(default_factory=dict)

    def add_window(self, window: FiveGram, count: int = 1) -> None:
        gap = (window[0], window[1], window[3], window[4])
        self.five_gram_counts[window] = self.five_gram_counts.get(window, 0) + count
        self.gapped_counts[gap] = self.gapped_counts.get(gap, 0) + count
        middles = self.middle_index.setdefault(gap, {})
        middles[window[2]] = middles.get(window[2], 0) + count
        self.total_windows += count

    def merge(self, other: "NGramTable") -> None:
        """Fold another shard into this table (associative, commutative)."""
        for window, count in other.five_gram_counts.items():
            self.add_window(window, count)


@dataclass(frozen=True)
class InsertionCandidate:
    """A word whose insertion at ``position`` is supported by the counts."""

    position: int
    word: Token
    probability: float


def count_lines(lines) -> NGramTable:
    """Count 5-gram windows over an iterable of raw sentence lines."""
    table = NGramTable()
    for line in lines:
        words = [t.surface for t in tokenize(line)]
        for i in range(len(words) - 4):
            table.add_window(tuple(words[i : i + 5]))
    return table


def build_counts(corpus_paths: list[str | Path]) -> NGramTable:
    """Build 5-gram statistics over one or more plain-text corpus files."""
    table = NGramTable()
    hashes = {}
    for path in corpus_paths:
        path = Path(path)
        data = path.read_text(encoding="utf-8")
        hashes[path.name] = hashlib.sha256(data.encode("utf-8")).hexdigest()
        table.merge(count_lines(data.splitlines()))
    table.provenance = {"corpus_files": hashes}
    return table


def insertion_probability(
    table: NGramTable, w1: Token, w2: Token, w3: Token, w4: Token, w5: Token
) -> float:
    gap = (w1.surface, w2.surface, w4.surface, w5.surface)
    denominator = table.gapped_counts.get(gap, 0)
    if denominator == 0:
        return 0.0
    window = (w1.surface, w2.surface, w3.surface, w4.surface, w5.surface)
    return table.five_gram_counts.get(window, 0) / denominator


def candidate_insertions(
    table: NGramTable, tokens: list[Token] | tuple[Token, ...], threshold: float
) -> list[InsertionCandidate]:
    """All insertions with probability above ``threshold``.

    A gap position p is valid when two tokens precede and two follow the
    insertion point. Words identical to either adjacent token are excluded
    to avoid degenerate repetitions. The comparison is strictly greater,
    except that a fully deterministic middle (probability 1) always passes,
    so threshold 1.0 selects exactly the deterministic contexts.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    candidates: list[InsertionCandidate] = []
    for p in range(2, len(tokens) - 1):
        gap = (
            tokens[p - 2].surface,
            tokens[p - 1].surface,
            tokens[p].surface,
            tokens[p + 1].surface,
        )
        denominator = table.gapped_counts.get(gap, 0)
        if denominator == 0:
            continue
        found = []
        for middle, count in table.middle_index[gap].items():
            if middle in (tokens[p - 1].surface, tokens[p].surface):
                continue
            probability = count / denominator
            if probability > threshold or probability == 1.0:
                found.append(InsertionCandidate(p, Token(middle), probability))
        found.sort(key=lambda c: (-c.probability, c.word.surface))
        candidates.extend(found)
    return candidates


def save_table(table: NGramTable, path: str | Path) -> None:
    """Persist the table as a compact, versioned binary cache.

    Layout: magic, format version, header length, JSON header (provenance),
    then zlib-compressed ``w1 w2 w3 w4 w5\\tcount`` lines. Only the 5-gram
    counts are stored; the gapped index is rebuilt on load.
    """
    header = json.dumps(
        {"provenance": table.provenance, "total_windows": table.total_windows},
        sort_keys=True,
    ).encode("utf-8")
    lines = "".join(
        f"{' '.join(window)}\t{count}\n"
        for window, count in sorted(table.five_gram_counts.items())
    )
    payload = zlib.compress(lines.encode("utf-8"), level=9)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HI", _FORMAT_VERSION, len(header)))
        fh.write(header)
        fh.write(payload)


def load_table(path: str | Path) -> NGramTable:
    blob = Path(path).read_bytes()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not an n-gram cache file (bad magic)")
    offset = len(_MAGIC)
    version, header_len = struct.unpack_from("<HI", blob, offset)
    if version != _FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    offset += struct.calcsize("<HI")
    header = json.loads(blob[offset : offset + header_len].decode("utf-8"))
    table = NGramTable(provenance=header.get("provenance", {}))
    text = zlib.decompress(blob[offset + header_len :]).decode("utf-8")
    for line in text.splitlines():
        words, count = line.split("\t")
        table.add_window(tuple(words.split(" ")), int(count))
    return table


def dump_tsv(table: NGramTable, path: str | Path) -> None:
    """Plain-text debug dump: ``w1 w2 w3 w4 w5<TAB>count`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for window, count in sorted(table.five_gram_counts.items()):
            fh.write(f"{' '.join(window)}\t{count}\n")


def table_fingerprint(table: NGramTable) -> str:
    """Stable content hash used for run provenance."""
    digest = hashlib.sha256()
    for window, count in sorted(table.five_gram_counts.items()):
        digest.update(" ".join(window).encode("utf-8"))
        digest.update(str(count).encode("utf-8"))
    return digest.hexdigest()
