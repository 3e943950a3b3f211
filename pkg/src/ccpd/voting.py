"""Sliding-window majority voting and single-pass contextual inference.

Majority voting presents each overlapping window to the predictor separately;
every window casts one argmax vote per letter it covers, and the plurality
label wins. Ties are broken uniformly among the leaders by a stream keyed on
(seed, sentence, letter), so the outcome does not depend on the order in
which windows are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .corpus import WindowSpec, segment
from .orthography import N_LABELS, Sentence
from .predictor import Predictor, make_hint
from .rng import keyed_index

_TIE_STREAM = 201


@dataclass(frozen=True, eq=False)
class VoteTally:
    """Per-letter vote counts over the label classes."""

    counts: np.ndarray
    rng_seed: int


def collect_votes(
    f: Predictor,
    s: Sentence,
    windows: Iterable[range],
    seed: int = 0,
    sentence_index: int = 0,
) -> VoteTally:
    """Accumulate one argmax vote per (window, covered letter)."""
    plains = list(s.plain_words)
    offsets = np.cumsum([0] + [len(w) for w in s.words])
    counts = np.zeros((s.letter_count, N_LABELS), dtype=np.int64)
    for win in windows:
        ctx = plains[win.start : win.stop]
        for i in win:
            dist = f(ctx, i - win.start, make_hint(s, i, sentence_index))
            for j, lab in enumerate(dist.argmax(axis=1)):
                counts[offsets[i] + j, lab] += 1
    return VoteTally(counts, seed)


def resolve_votes(tally: VoteTally, sentence_index: int = 0) -> np.ndarray:
    """One-hot winners; tied leaders are picked by the position-keyed stream."""
    out = np.zeros(tally.counts.shape, dtype=float)
    for letter, row in enumerate(tally.counts):
        top = row.max()
        if top == 0:
            raise ValueError(f"letter {letter} received no votes")
        leaders = np.flatnonzero(row == top)
        if len(leaders) == 1:
            winner = leaders[0]
        else:
            pick = keyed_index(
                tally.rng_seed, len(leaders), _TIE_STREAM, sentence_index, letter
            )
            winner = leaders[pick]
        out[letter, winner] = 1.0
    return out


def mv_infer(
    f: Predictor,
    s: Sentence,
    spec: WindowSpec,
    seed: int = 0,
    sentence_index: int = 0,
) -> np.ndarray:
    """Majority-vote contextual channel: one-hot plurality winners per letter."""
    if not s.words:
        return np.zeros((0, N_LABELS))
    tally = collect_votes(f, s, segment(s, spec), seed, sentence_index)
    return resolve_votes(tally, sentence_index)


def sp_infer(f: Predictor, s: Sentence, sentence_index: int = 0) -> np.ndarray:
    """Single-pass contextual channel: the whole sentence as context, raw
    distributions returned as-is."""
    if not s.words:
        return np.zeros((0, N_LABELS))
    plains = list(s.plain_words)
    rows = [
        f(plains, i, make_hint(s, i, sentence_index)) for i in range(len(plains))
    ]
    return np.concatenate(rows)
