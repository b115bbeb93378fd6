"""Generation of meaning-preserving sentence variations.

Four kinds of local edits are produced from an aligned sentence pair:

  DEL    - remove an adverb and its translation from both sides
  SUBNUM - substitute an integer i appearing on both sides with i+k, k=1..5
  INS    - insert a corpus-supported common word into the source side only
  SUBGEN - swap the gendered subject pronoun on both sides

Every variation differs from its parent source by exactly one local edit.
DEL/SUBNUM/SUBGEN edit the reference consistently (reference_modified=True);
INS leaves the reference untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import SentencePair, Token
from .ngram import NGramTable, candidate_insertions

KINDS = ("del", "subnum", "ins", "subgen")

SUBNUM_MIN_OFFSET = 1
SUBNUM_MAX_OFFSET = 5
MAX_NUMBER_DIGITS = 9

DEFAULT_INS_THRESHOLD = 0.5


@dataclass(frozen=True)
class Lexicon:
    """Bilingual word list; source/target lookup is case-normalized."""

    entries: tuple[tuple[str, str], ...]
    name: str

    def __post_init__(self):
        for src, tgt in self.entries:
            if not src or not tgt:
                raise ValueError(f"empty member in lexicon entry ({src!r}, {tgt!r})")

    @classmethod
    def from_tsv(cls, path: str | Path, swap: bool = False) -> "Lexicon":
        """Load ``source_word<TAB>target_word`` lines; swap flips direction."""
        path = Path(path)
        entries = []
        for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(
                    f"{path.name}:{number}: expected two tab-separated words, got {line!r}"
                )
            a, b = fields
            entries.append((b, a) if swap else (a, b))
        return cls(entries=tuple(entries), name=path.name)


@dataclass(frozen=True)
class GenderLexicon:
    """Per-language pronoun swap pairs; swapping twice restores the word."""

    pairs: dict  # lang -> {word_lower: swap_word}

    def __post_init__(self):
        for lang, table in self.pairs.items():
            for word, swap in table.items():
                if table.get(swap) != word:
                    raise ValueError(
                        f"gender swap is not an involution for {lang}: "
                        f"{word} -> {swap} -> {table.get(swap)}"
                    )

    @classmethod
    def from_tsv(cls, path: str | Path) -> "GenderLexicon":
        """Load ``lang<TAB>word<TAB>swap`` lines; both directions are added."""
        path = Path(path)
        pairs: dict[str, dict[str, str]] = {}
        for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path.name}:{number}: expected lang<TAB>word<TAB>swap, got {line!r}"
                )
            lang, word, swap = fields
            table = pairs.setdefault(lang, {})
            table[word.lower()] = swap.lower()
            table[swap.lower()] = word.lower()
        return cls(pairs=pairs)

    def swap_for(self, lang: str, word: str) -> str | None:
        return self.pairs.get(lang, {}).get(word.lower())


@dataclass(frozen=True)
class Variation:
    """A locally edited derivative of a sentence pair."""

    id: str
    parent_id: str
    kind: str
    source_tokens: tuple[Token, ...]
    target_tokens: tuple[Token, ...]
    edit: dict
    reference_modified: bool


@dataclass(frozen=True)
class VariationFamily:
    """All variations of one parent sharing a kind."""

    parent_id: str
    kind: str
    members: tuple[Variation, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("family must have at least one member")


def default_adverb_lexicon(swap: bool = False) -> Lexicon:
    """The shipped 50-adverb English/German list (swap=True for de->en)."""
    path = resources.files("mtvolatility.data") / "adverbs_en_de.tsv"
    return Lexicon.from_tsv(path, swap=swap)


def default_gender_lexicon() -> GenderLexicon:
    path = resources.files("mtvolatility.data") / "gender_pronouns.tsv"
    return GenderLexicon.from_tsv(path)


def _match_case(template: str, word: str) -> str:
    if template.isupper():
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def _find(tokens: tuple[Token, ...], word: str) -> int | None:
    lowered = word.lower()
    for i, tok in enumerate(tokens):
        if tok.surface.lower() == lowered:
            return i
    return None


def generate_del(pair: SentencePair, lexicon: Lexicon) -> list[Variation]:
    """One variation per lexicon entry found on both sides of the pair.

    The first occurrence of the word is removed on each side, keeping the
    edit local even when an adverb repeats.
    """
    variations = []
    for src_word, tgt_word in lexicon.entries:
        i = _find(pair.source_tokens, src_word)
        j = _find(pair.target_tokens, tgt_word)
        if i is None or j is None:
            continue
        source = pair.source_tokens[:i] + pair.source_tokens[i + 1 :]
        target = pair.target_tokens[:j] + pair.target_tokens[j + 1 :]
        if not source or not target:
            continue
        variations.append(
            Variation(
                id=f"{pair.id}/del/{src_word.lower()}-{tgt_word.lower()}",
                parent_id=pair.id,
                kind="del",
                source_tokens=source,
                target_tokens=target,
                edit={
                    "source_word": pair.source_tokens[i].surface,
                    "target_word": pair.target_tokens[j].surface,
                    "source_pos": i,
                    "target_pos": j,
                },
                reference_modified=True,
            )
        )
    return variations


def _is_plain_integer(surface: str) -> bool:
    # Leading zeros are excluded so that offsetting stays invertible.
    return (
        surface.isdigit()
        and len(surface) <= MAX_NUMBER_DIGITS
        and str(int(surface)) == surface
    )


def _substitute(tokens: tuple[Token, ...], old: str, new: str) -> tuple[tuple[Token, ...], list[int]]:
    positions = [i for i, t in enumerate(tokens) if t.surface == old]
    replaced = tuple(
        Token(new) if t.surface == old else t for t in tokens
    )
    return replaced, positions


def generate_subnum(
    pair: SentencePair,
    k_min: int = SUBNUM_MIN_OFFSET,
    k_max: int = SUBNUM_MAX_OFFSET,
) -> list[Variation]:
    """Offset every number aligned across the pair by each k in [k_min, k_max].

    Each distinct aligned integer yields its own group of variations; all of
    its occurrences are replaced on both sides, but one variation never
    touches two distinct numbers.
    """
    source_numbers = {
        t.surface for t in pair.source_tokens if _is_plain_integer(t.surface)
    }
    target_numbers = {
        t.surface for t in pair.target_tokens if _is_plain_integer(t.surface)
    }
    variations = []
    for number in sorted(source_numbers & target_numbers, key=lambda s: (len(s), s)):
        for k in range(k_min, k_max + 1):
            replacement = str(int(number) + k)
            source, src_pos = _substitute(pair.source_tokens, number, replacement)
            target, tgt_pos = _substitute(pair.target_tokens, number, replacement)
            variations.append(
                Variation(
                    id=f"{pair.id}/subnum/{number}+{k}",
                    parent_id=pair.id,
                    kind="subnum",
                    source_tokens=source,
                    target_tokens=target,
                    edit={
                        "number": number,
                        "offset": k,
                        "replacement": replacement,
                        "source_positions": src_pos,
                        "target_positions": tgt_pos,
                    },
                    reference_modified=True,
                )
            )
    return variations


def invert_subnum(variation: Variation) -> tuple[tuple[Token, ...], tuple[Token, ...]]:
    """Apply the inverse offset; returns the restored source/target tokens."""
    if variation.kind != "subnum":
        raise ValueError(f"not a subnum variation: {variation.id}")
    original = variation.edit["number"]
    replacement = variation.edit["replacement"]
    source = tuple(
        Token(original) if i in variation.edit["source_positions"] else t
        for i, t in enumerate(variation.source_tokens)
    )
    target = tuple(
        Token(original) if i in variation.edit["target_positions"] else t
        for i, t in enumerate(variation.target_tokens)
    )
    assert all(
        variation.source_tokens[i].surface == replacement
        for i in variation.edit["source_positions"]
    )
    return source, target


def generate_ins(
    pair: SentencePair, table: NGramTable, threshold: float = DEFAULT_INS_THRESHOLD
) -> list[Variation]:
    """One variation per corpus-supported insertion into the source side.

    The reference is left unchanged, so INS items are excluded from
    reference-based quality metrics against a modified reference.
    """
    variations = []
    for cand in candidate_insertions(table, pair.source_tokens, threshold):
        source = (
            pair.source_tokens[: cand.position]
            + (cand.word,)
            + pair.source_tokens[cand.position :]
        )
        variations.append(
            Variation(
                id=f"{pair.id}/ins/{cand.position}/{cand.word.surface}",
                parent_id=pair.id,
                kind="ins",
                source_tokens=source,
                target_tokens=pair.target_tokens,
                edit={
                    "word": cand.word.surface,
                    "position": cand.position,
                    "probability": cand.probability,
                },
                reference_modified=False,
            )
        )
    return variations


def _single_gendered_pronoun(
    tokens: tuple[Token, ...], lang: str, genders: GenderLexicon
) -> int | None:
    """Index of the only gendered pronoun, or None when absent/ambiguous."""
    hits = [
        i for i, t in enumerate(tokens) if genders.swap_for(lang, t.surface) is not None
    ]
    return hits[0] if len(hits) == 1 else None


def generate_subgen(pair: SentencePair, genders: GenderLexicon) -> list[Variation]:
    """Swap the gender of the subject pronoun on both sides.

    Only unambiguous sentences are varied: exactly one gendered pronoun on
    each side, with the source one in sentence-initial subject position.
    Possessives and agreement repair are out of scope, which keeps the edited
    sentences grammatical.
    """
    src_lang, tgt_lang = pair.language_pair
    i = _single_gendered_pronoun(pair.source_tokens, src_lang, genders)
    j = _single_gendered_pronoun(pair.target_tokens, tgt_lang, genders)
    if i is None or j is None or i != 0:
        return []
    src_old = pair.source_tokens[i].surface
    tgt_old = pair.target_tokens[j].surface
    src_new = _match_case(src_old, genders.swap_for(src_lang, src_old))
    tgt_new = _match_case(tgt_old, genders.swap_for(tgt_lang, tgt_old))
    source = tuple(
        Token(src_new) if p == i else t for p, t in enumerate(pair.source_tokens)
    )
    target = tuple(
        Token(tgt_new) if p == j else t for p, t in enumerate(pair.target_tokens)
    )
    return [
        Variation(
            id=f"{pair.id}/subgen/{src_old.lower()}",
            parent_id=pair.id,
            kind="subgen",
            source_tokens=source,
            target_tokens=target,
            edit={
                "source_word": src_old,
                "source_swap": src_new,
                "target_word": tgt_old,
                "target_swap": tgt_new,
                "source_pos": i,
                "target_pos": j,
            },
            reference_modified=True,
        )
    ]


def generate_all(
    pair: SentencePair,
    kinds: tuple[str, ...] = KINDS,
    lexicon: Lexicon | None = None,
    genders: GenderLexicon | None = None,
    table: NGramTable | None = None,
    threshold: float = DEFAULT_INS_THRESHOLD,
    k_min: int = SUBNUM_MIN_OFFSET,
    k_max: int = SUBNUM_MAX_OFFSET,
) -> list[Variation]:
    """Run the requested generators over one pair, in a fixed kind order."""
    out: list[Variation] = []
    if "del" in kinds and lexicon is not None:
        out.extend(generate_del(pair, lexicon))
    if "subnum" in kinds:
        out.extend(generate_subnum(pair, k_min, k_max))
    if "ins" in kinds and table is not None:
        out.extend(generate_ins(pair, table, threshold))
    if "subgen" in kinds and genders is not None:
        out.extend(generate_subgen(pair, genders))
    return out


def group_families(variations) -> list[VariationFamily]:
    """Partition variations by (parent_id, kind), deterministically ordered."""
    grouped: dict[tuple[str, str], list[Variation]] = {}
    for var in variations:
        grouped.setdefault((var.parent_id, var.kind), []).append(var)
    families = []
    for (parent_id, kind) in sorted(grouped):
        members = tuple(sorted(grouped[(parent_id, kind)], key=lambda v: v.id))
        families.append(VariationFamily(parent_id=parent_id, kind=kind, members=members))
    return families
