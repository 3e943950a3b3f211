"""Line-oriented diacritized corpora and word-window segmentation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .orthography import OrthographyError, Sentence, clean_text, parse_marked_text, render


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    source_name: str
    warning_count: int = 0

    def __len__(self) -> int:
        return len(self.sentences)


class TokenCounts(NamedTuple):
    tokens: int
    letters: int
    marked_letters: int


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry in words."""

    width: int
    stride: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("window width must be >= 1")
        if not 1 <= self.stride <= self.width:
            raise ValueError("stride must satisfy 1 <= stride <= width")


def load_corpus(path: str | Path, strict: bool = False) -> Corpus:
    """Read one sentence per line, cleaning each line before parsing.

    Blank lines (and lines with no Arabic letters) are skipped. In lenient
    mode dropped marks are tallied into warning_count; in strict mode parse
    errors propagate, prefixed with the offending line number.
    """
    sentences: list[Sentence] = []
    warning_count = 0
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = clean_text(raw.rstrip("\n"))
            if not line:
                continue
            messages: list[str] = []
            try:
                s = parse_marked_text(line, strict=strict, warnings=messages)
            except OrthographyError as e:
                raise type(e)(f"{path}: line {ln}: {e}") from None
            warning_count += len(messages)
            if s.words:
                sentences.append(s)
    return Corpus(tuple(sentences), str(path), warning_count)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus back out, one canonically rendered sentence per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in corpus.sentences:
            fh.write(render(s, [True] * s.letter_count))
            fh.write("\n")


def token_counts(corpus: Corpus) -> TokenCounts:
    tokens = letters = marked = 0
    for s in corpus.sentences:
        tokens += len(s.words)
        for ml in s.iter_letters():
            letters += 1
            if ml.diac:
                marked += 1
    return TokenCounts(tokens, letters, marked)


def segment(sentence: Sentence, spec: WindowSpec) -> list[range]:
    """Overlapping word-index windows covering the whole sentence.

    Windows start at multiples of the stride and are clipped at the sentence
    end; enumeration stops with the first window that reaches the end, so a
    sentence shorter than the width yields exactly one full-sentence window.
    """
    n = len(sentence.words)
    if n == 0:
        return []
    windows: list[range] = []
    start = 0
    while True:
        windows.append(range(start, min(start + spec.width, n)))
        if start + spec.width >= n:
            return windows
        start += spec.stride
