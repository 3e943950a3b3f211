"""Arabic orthography: the diacritic label space, marked-text parsing, rendering.

Letters are the Arabic block U+0621..U+064A plus alef wasla (U+0671); combining
marks are the eight diacritics U+064B..U+0652. Every letter carries exactly one
of 15 labels: bare, one of the seven single marks, shadda alone, or shadda
fused with one of the six vowel marks. Fused labels always serialize
shadda-first; input is accepted in either order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum, unique
from typing import Iterator, Sequence


class OrthographyError(ValueError):
    """Base class for marked-text parsing and rendering errors."""


class DanglingDiacritic(OrthographyError):
    """A combining mark appeared with no Arabic letter to attach to."""


class ConflictingMarks(OrthographyError):
    """Two incompatible marks were placed on the same letter."""


class MaskLengthMismatch(OrthographyError):
    """A selection mask does not cover the sentence's letters exactly."""


@unique
class Label(IntEnum):
    """Per-letter diacritic label; the enum value is the class index."""

    NONE = 0
    FATHA = 1
    FATHATAIN = 2
    DAMMA = 3
    DAMMATAIN = 4
    KASRA = 5
    KASRATAIN = 6
    SUKUN = 7
    SHADDA = 8
    SHADDA_FATHA = 9
    SHADDA_FATHATAIN = 10
    SHADDA_DAMMA = 11
    SHADDA_DAMMATAIN = 12
    SHADDA_KASRA = 13
    SHADDA_KASRATAIN = 14

    @property
    def marks(self) -> str:
        """Canonical codepoint sequence; empty for NONE, shadda-first when fused."""
        return _MARKS[self]


N_LABELS = len(Label)

SHADDA_CP = "ّ"

# Single-mark codepoints (everything in U+064B..U+0652 except shadda).
_VOWEL_BY_CP = {
    "ً": Label.FATHATAIN,
    "ٌ": Label.DAMMATAIN,
    "ٍ": Label.KASRATAIN,
    "َ": Label.FATHA,
    "ُ": Label.DAMMA,
    "ِ": Label.KASRA,
    "ْ": Label.SUKUN,
}

# Fusable vowels; sukun cannot combine with shadda in the 15-label space.
_FUSE = {
    Label.FATHA: Label.SHADDA_FATHA,
    Label.FATHATAIN: Label.SHADDA_FATHATAIN,
    Label.DAMMA: Label.SHADDA_DAMMA,
    Label.DAMMATAIN: Label.SHADDA_DAMMATAIN,
    Label.KASRA: Label.SHADDA_KASRA,
    Label.KASRATAIN: Label.SHADDA_KASRATAIN,
}

_MARKS = {
    Label.NONE: "",
    Label.FATHA: "َ",
    Label.FATHATAIN: "ً",
    Label.DAMMA: "ُ",
    Label.DAMMATAIN: "ٌ",
    Label.KASRA: "ِ",
    Label.KASRATAIN: "ٍ",
    Label.SUKUN: "ْ",
    Label.SHADDA: SHADDA_CP,
}
_MARKS.update({fused: SHADDA_CP + _MARKS[v] for v, fused in _FUSE.items()})


class CharClass(Enum):
    ARABIC_LETTER = "letter"
    DIACRITIC_MARK = "mark"
    WHITESPACE = "whitespace"
    OTHER = "other"


def classify_codepoint(cp: str) -> CharClass:
    """Classify a single codepoint for parsing and cleaning purposes."""
    if len(cp) != 1:
        raise ValueError(f"expected one codepoint, got {cp!r}")
    o = ord(cp)
    if 0x0621 <= o <= 0x064A or o == 0x0671:
        return CharClass.ARABIC_LETTER
    if 0x064B <= o <= 0x0652:
        return CharClass.DIACRITIC_MARK
    if cp.isspace():
        return CharClass.WHITESPACE
    return CharClass.OTHER


@dataclass(frozen=True)
class MarkedLetter:
    """One Arabic base letter with its diacritic label."""

    base: str
    diac: Label = Label.NONE

    def __post_init__(self) -> None:
        if classify_codepoint(self.base) is not CharClass.ARABIC_LETTER:
            raise ValueError(f"{self.base!r} is not an Arabic letter")


@dataclass(frozen=True)
class Word:
    """A non-empty run of marked letters with no internal separators."""

    letters: tuple[MarkedLetter, ...]

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("a word needs at least one letter")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def plain(self) -> str:
        return "".join(ml.base for ml in self.letters)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(ml.diac for ml in self.letters)


@dataclass(frozen=True)
class Sentence:
    """Words plus the verbatim inter-word spans around them.

    separators[i] precedes words[i]; separators[-1] trails the last word, so
    there is always exactly one more separator than words. Rendering emits
    separators untouched, which keeps non-Arabic text (punctuation, digits)
    as passthrough.
    """

    words: tuple[Word, ...]
    separators: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.separators) != len(self.words) + 1:
            raise ValueError("need len(words) + 1 separator spans")

    @property
    def letter_count(self) -> int:
        return sum(len(w) for w in self.words)

    @property
    def plain_words(self) -> tuple[str, ...]:
        return tuple(w.plain for w in self.words)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(ml.diac for w in self.words for ml in w.letters)

    def iter_letters(self) -> Iterator[MarkedLetter]:
        for w in self.words:
            yield from w.letters


def _combine(vowel: Label | None, shadda: bool) -> Label:
    if shadda:
        return _FUSE[vowel] if vowel is not None else Label.SHADDA
    return vowel if vowel is not None else Label.NONE


def parse_marked_text(
    text: str,
    strict: bool = False,
    warnings: list[str] | None = None,
) -> Sentence:
    """Decode possibly-diacritized text into a Sentence.

    Each mark attaches to the letter run it directly follows; shadda and a
    vowel mark fuse regardless of their order; repeated identical marks
    collapse silently. A mark with no letter to sit on, or a second
    incompatible mark on one letter, raises in strict mode; in lenient mode
    the offending mark is dropped and a message is appended to ``warnings``
    when a list is supplied.
    """
    words: list[Word] = []
    separators: list[str] = []
    sep: list[str] = []
    pend: list[list] = []  # per pending letter: [base, vowel Label | None, shadda bool]
    in_word = False

    def warn(msg: str) -> None:
        if warnings is not None:
            warnings.append(msg)

    def close_word() -> None:
        nonlocal in_word
        words.append(Word(tuple(MarkedLetter(b, _combine(v, sh)) for b, v, sh in pend)))
        pend.clear()
        in_word = False

    def attach(ch: str, k: int) -> None:
        slot = pend[-1]
        if ch == SHADDA_CP:
            if slot[2]:
                return  # duplicate shadda
            if slot[1] is Label.SUKUN:
                clash(ch, k)
            else:
                slot[2] = True
            return
        v = _VOWEL_BY_CP[ch]
        if slot[1] is None:
            if v is Label.SUKUN and slot[2]:
                clash(ch, k)
            else:
                slot[1] = v
        elif slot[1] is not v:
            clash(ch, k)
        # identical repeated vowel: collapse silently

    def clash(ch: str, k: int) -> None:
        msg = f"conflicting mark U+{ord(ch):04X} at offset {k}"
        if strict:
            raise ConflictingMarks(msg)
        warn(msg + " (dropped)")

    for k, ch in enumerate(text):
        cls = classify_codepoint(ch)
        if cls is CharClass.ARABIC_LETTER:
            if not in_word:
                separators.append("".join(sep))
                sep.clear()
                in_word = True
            pend.append([ch, None, False])
        elif cls is CharClass.DIACRITIC_MARK:
            if not in_word:
                msg = f"dangling mark U+{ord(ch):04X} at offset {k}"
                if strict:
                    raise DanglingDiacritic(msg)
                warn(msg + " (dropped)")
                continue
            attach(ch, k)
        else:
            if in_word:
                close_word()
            sep.append(ch)

    if in_word:
        close_word()
    separators.append("".join(sep))
    return Sentence(tuple(words), tuple(separators))


def strip(s: Sentence) -> str:
    """Base letters and separators in order, with every diacritic removed."""
    out = []
    for i, w in enumerate(s.words):
        out.append(s.separators[i])
        out.append(w.plain)
    out.append(s.separators[-1])
    return "".join(out)


def render(s: Sentence, mask: Sequence[bool]) -> str:
    """Re-emit the sentence, marking letter j only where mask[j] is set.

    A masked letter whose label is NONE still emits no glyph.
    """
    if len(mask) != s.letter_count:
        raise MaskLengthMismatch(
            f"mask covers {len(mask)} letters, sentence has {s.letter_count}"
        )
    out = []
    j = 0
    for i, w in enumerate(s.words):
        out.append(s.separators[i])
        for ml in w.letters:
            out.append(ml.base)
            if mask[j] and ml.diac is not Label.NONE:
                out.append(ml.diac.marks)
            j += 1
    out.append(s.separators[-1])
    return "".join(out)


def clean_text(text: str) -> str:
    """Drop non-Arabic codepoints, collapse whitespace runs to single spaces."""
    out: list[str] = []
    ws = False
    for ch in text:
        cls = classify_codepoint(ch)
        if cls is CharClass.OTHER:
            continue
        if cls is CharClass.WHITESPACE:
            ws = True
            continue
        if ws and out:
            out.append(" ")
        ws = False
        out.append(ch)
    return "".join(out)


def canonicalize(text: str) -> str:
    """Normal form: cleaned text with marks re-serialized canonically.

    Unattachable or conflicting marks are dropped as in lenient parsing.
    Dropping a mark can expose stray whitespace, so the clean-parse-render
    pass repeats until the text stops changing; every pass only removes or
    reorders codepoints, so the fixpoint is reached in a couple of rounds.
    """
    prev = None
    while text != prev:
        prev = text
        s = parse_marked_text(clean_text(text))
        text = render(s, [True] * s.letter_count)
    return text
