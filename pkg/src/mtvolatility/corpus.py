"""Parallel corpus loading, tokenization, and byte-pair-encoding segmentation.

All downstream edit distances operate on the subword units produced here.
Tokenization is deliberately simple (whitespace split plus detaching of
leading/trailing punctuation) and is applied identically to every text that
enters the harness, so distances and scores are internally consistent.
"intact modulo whitespace" in this module means: the non-whitespace
characters of the input are preserved exactly and in order.
"""

from __future__ import annotations

import unicodedata
import warnings
from dataclasses import dataclass, field
from pathlib import Path


class AlignmentError(Exception):
    """Source and target files have different line counts."""

    def __init__(self, source_lines: int, target_lines: int):
        super().__init__(
            f"parallel files are misaligned: {source_lines} source lines "
            f"vs {target_lines} target lines"
        )
        self.source_lines = source_lines
        self.target_lines = target_lines


class MergesParseError(Exception):
    """BPE merges file is malformed."""

    def __init__(self, path: str, line_number: int, reason: str):
        super().__init__(f"{path}:{line_number}: {reason}")
        self.path = path
        self.line_number = line_number
        self.reason = reason


@dataclass(frozen=True)
class Token:
    """One unit of text.

    ``is_subword_continuation`` is True when the unit continues the previous
    word under the BPE scheme (e.g. the ``er`` in ``low|er``). Word-level
    tokens always carry False.
    """

    surface: str
    is_subword_continuation: bool = False

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(c.isspace() for c in self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class SentencePair:
    """An aligned source/target sentence pair from a parallel test set."""

    id: str
    source_tokens: tuple[Token, ...]
    target_tokens: tuple[Token, ...]
    source_raw: str
    target_raw: str
    language_pair: tuple[str, str]

    def __post_init__(self):
        if not self.source_tokens or not self.target_tokens:
            raise ValueError(f"pair {self.id} has an empty token sequence")


@dataclass(frozen=True)
class BpeScheme:
    """An ordered list of learned symbol-pair merges.

    ``word_final_markers`` is True when the merges file used the
    end-of-word-marker style (symbols suffixed with ``</w>``); internally
    pieces are always marked with the continuation flag instead, so both
    merge-file styles load into the same representation.
    """

    merges: tuple[tuple[str, str], ...]
    word_final_markers: bool = False
    ranks: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.merges)) != len(self.merges):
            raise ValueError("duplicate merge pair in scheme")
        object.__setattr__(
            self, "ranks", {pair: i for i, pair in enumerate(self.merges)}
        )

    @property
    def merge_count(self) -> int:
        return len(self.merges)


_EOW = "</w>"


def _is_detachable(ch: str) -> bool:
    # Punctuation and symbol characters get split off word edges.
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(raw: str) -> list[Token]:
    """Split raw text into word-level tokens.

    Whitespace separates tokens; leading and trailing punctuation/symbol
    characters are detached as their own tokens ("relieved." -> relieved, .).
    Word-internal punctuation (hyphens, apostrophes) stays attached.
    """
    tokens: list[Token] = []
    for chunk in raw.split():
        lead: list[str] = []
        while len(chunk) > 1 and _is_detachable(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while len(chunk) > 1 and _is_detachable(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        for c in lead:
            tokens.append(Token(c))
        tokens.append(Token(chunk))
        for c in reversed(trail):
            tokens.append(Token(c))
    return tokens


def detokenize(tokens: list[Token] | tuple[Token, ...]) -> str:
    """Join tokens with single spaces, re-attaching subword continuations."""
    parts: list[str] = []
    for tok in tokens:
        if tok.is_subword_continuation and parts:
            parts[-1] += tok.surface
        else:
            parts.append(tok.surface)
    return " ".join(parts)


def load_parallel(
    source_path: str | Path,
    target_path: str | Path,
    language_pair: tuple[str, str],
) -> list[SentencePair]:
    """Load one SentencePair per aligned line of two plain-text files.

    Ids are stable: source file stem plus zero-based line index. Pairs where
    either side is empty are skipped with a warning.
    """
    source_path, target_path = Path(source_path), Path(target_path)
    src_lines = source_path.read_text(encoding="utf-8").splitlines()
    tgt_lines = target_path.read_text(encoding="utf-8").splitlines()
    if len(src_lines) != len(tgt_lines):
        raise AlignmentError(len(src_lines), len(tgt_lines))
    stem = source_path.stem
    pairs = []
    for i, (src, tgt) in enumerate(zip(src_lines, tgt_lines)):
        if not src.strip() or not tgt.strip():
            warnings.warn(f"skipping empty line {i} in {stem}", stacklevel=2)
            continue
        pairs.append(
            SentencePair(
                id=f"{stem}.{i}",
                source_tokens=tuple(tokenize(src)),
                target_tokens=tuple(tokenize(tgt)),
                source_raw=src,
                target_raw=tgt,
                language_pair=language_pair,
            )
        )
    return pairs


def load_bpe_scheme(path: str | Path) -> BpeScheme:
    """Read a learned-merges text file (one space-separated pair per line).

    A leading ``#version`` header line is tolerated. Both the plain style
    (``l o``) and the end-of-word-marker style (``e r</w>``) are accepted.
    """
    path = Path(path)
    merges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    has_markers = False
    for line_number, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if line_number == 1 and line.startswith("#"):
            continue
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MergesParseError(
                str(path), line_number, f"expected two space-separated symbols, got {line!r}"
            )
        pair = (parts[0], parts[1])
        if pair in seen:
            raise MergesParseError(str(path), line_number, f"duplicate merge pair {pair}")
        seen.add(pair)
        if parts[0].endswith(_EOW) or parts[1].endswith(_EOW):
            has_markers = True
        merges.append(pair)
    return BpeScheme(merges=tuple(merges), word_final_markers=has_markers)


def _segment_word(word: str, scheme: BpeScheme) -> list[str]:
    """Apply merge rules to one word, lowest-rank pair first."""
    if scheme.word_final_markers:
        symbols = list(word[:-1]) + [word[-1] + _EOW]
    else:
        symbols = list(word)
    while len(symbols) > 1:
        best_rank = None
        best_index = -1
        for i in range(len(symbols) - 1):
            rank = scheme.ranks.get((symbols[i], symbols[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_index = i
        if best_rank is None:
            break
        merged = symbols[best_index] + symbols[best_index + 1]
        # Merge every occurrence of the chosen pair in one pass.
        pair = (symbols[best_index], symbols[best_index + 1])
        out: list[str] = []
        i = 0
        while i < len(symbols):
            if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == pair:
                out.append(merged)
                i += 2
            else:
                out.append(symbols[i])
                i += 1
        symbols = out
    if scheme.word_final_markers:
        symbols[-1] = symbols[-1].removesuffix(_EOW)
    return symbols


def apply_bpe(tokens: list[Token] | tuple[Token, ...], scheme: BpeScheme) -> list[Token]:
    """Segment word-level tokens into subword units.

    Every piece after the first within a word carries the continuation flag,
    so ``merge_continuations`` restores the input exactly.
    """
    out: list[Token] = []
    for tok in tokens:
        pieces = _segment_word(tok.surface, scheme)
        for i, piece in enumerate(pieces):
            out.append(Token(piece, is_subword_continuation=(i > 0)))
    return out


def merge_continuations(tokens: list[Token] | tuple[Token, ...]) -> list[Token]:
    """Undo subword segmentation: inverse of apply_bpe."""
    out: list[Token] = []
    for tok in tokens:
        if tok.is_subword_continuation and out:
            out[-1] = Token(out[-1].surface + tok.surface)
        else:
            out.append(Token(tok.surface))
    return out


def render_units(tokens: list[Token] | tuple[Token, ...]) -> list[str]:
    """Render tokens as comparison units for edit-distance metrics.

    A piece that is continued by the next one gets the conventional ``@@``
    marker appended, so unit identity includes each piece's position within
    its word, not just its surface.
    """
    rendered: list[str] = []
    for i, tok in enumerate(tokens):
        continued = i + 1 < len(tokens) and tokens[i + 1].is_subword_continuation
        rendered.append(tok.surface + "@@" if continued else tok.surface)
    return rendered


def surfaces(tokens: list[Token] | tuple[Token, ...]) -> list[str]:
    return [t.surface for t in tokens]
