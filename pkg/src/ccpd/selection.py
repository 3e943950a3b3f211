"""Context-contrastive letter selection and the end-to-end text pipeline.

The selection step decides, letter by letter, whether the contextual
prediction carries information the isolated prediction lacks. Hard mode
marks letters where the two channels' argmax labels disagree; soft mode
marks letters where the contextual channel's confidence exceeds the isolated
channel's by more than a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import WindowSpec
from .orthography import Label, MarkedLetter, Sentence, Word, parse_marked_text, render
from .predictor import (
    PredictionGrid,
    PredictorPair,
    ShapeMismatch,
    apply_contextual,
    apply_isolated,
)
from .voting import mv_infer, sp_infer

MODES = ("full", "hard", "soft")
INFERENCE_MODES = ("mv", "sp")


@dataclass(frozen=True, eq=False)
class SelectionMask:
    """Boolean per letter: receives the contextual prediction, or stays bare.

    A selected letter whose contextual argmax is the bare class renders no
    glyph, but it still belongs to the selected set for indicator purposes.
    """

    flags: np.ndarray
    mode: str
    theta: float | None = None

    def __len__(self) -> int:
        return len(self.flags)


@dataclass(frozen=True)
class CcpdConfig:
    """Pipeline configuration: selection mode plus contextual inference."""

    mode: str = "hard"
    theta: float | None = None
    inference: str = "mv"
    window: WindowSpec = WindowSpec(20, 2)
    T: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.inference not in INFERENCE_MODES:
            raise ValueError(f"inference must be one of {INFERENCE_MODES}")
        if self.mode == "soft":
            if self.theta is None:
                raise ValueError("soft mode needs a theta threshold")
            if self.inference != "sp":
                raise ValueError(
                    "soft mode needs sp inference; majority voting emits "
                    "one-hot winners with no usable confidence margin"
                )
        elif self.theta is not None:
            raise ValueError(f"theta only applies to soft mode, not {self.mode!r}")
        if self.T is not None and self.T < 0:
            raise ValueError("context radius T must be >= 0")


def full_mask(n: int) -> SelectionMask:
    return SelectionMask(np.ones(n, dtype=bool), "full")


def mark_hard(g: PredictionGrid) -> SelectionMask:
    """Select letters where the channels' argmax labels disagree."""
    return SelectionMask(g.sent_argmax != g.word_argmax, "hard")


def mark_soft(g: PredictionGrid, theta: float) -> SelectionMask:
    """Select letters where the contextual confidence leads by more than theta."""
    return SelectionMask(
        g.sent.max(axis=1) - g.word.max(axis=1) > theta, "soft", theta
    )


def make_mask(g: PredictionGrid, cfg: CcpdConfig) -> SelectionMask:
    if cfg.mode == "full":
        return full_mask(len(g))
    if cfg.mode == "hard":
        return mark_hard(g)
    return mark_soft(g, cfg.theta)


def ccpd_assign(g: PredictionGrid, m: SelectionMask, s: Sentence) -> Sentence:
    """Label selected letters with the contextual argmax, the rest with NONE."""
    if not (len(m) == len(g) == s.letter_count):
        raise ShapeMismatch(
            f"mask {len(m)}, grid {len(g)} and sentence {s.letter_count} disagree"
        )
    labels = np.where(m.flags, g.sent_argmax, int(Label.NONE))
    words = []
    j = 0
    for w in s.words:
        letters = tuple(
            MarkedLetter(ml.base, Label(int(labels[j + k])))
            for k, ml in enumerate(w.letters)
        )
        words.append(Word(letters))
        j += len(w)
    return Sentence(tuple(words), s.separators)


def build_grid(
    pair: PredictorPair, s: Sentence, cfg: CcpdConfig, sentence_index: int = 0
) -> PredictionGrid:
    """Run both channels for one sentence under the configured inference."""
    word_ch = apply_isolated(pair.word, s, sentence_index)
    if cfg.inference == "mv":
        sent_ch = mv_infer(pair.sent, s, cfg.window, cfg.seed, sentence_index)
    elif cfg.T is not None:
        sent_ch = apply_contextual(pair.sent, s, cfg.T, sentence_index)
    else:
        sent_ch = sp_infer(pair.sent, s, sentence_index)
    return PredictionGrid(sent_ch, word_ch)


def diacritize_sentence(
    s: Sentence, pair: PredictorPair, cfg: CcpdConfig, sentence_index: int = 0
) -> str:
    if not s.words:
        return render(s, [])
    g = build_grid(pair, s, cfg, sentence_index)
    m = make_mask(g, cfg)
    assigned = ccpd_assign(g, m, s)
    return render(assigned, np.ones(len(m), dtype=bool))


def partial_diacritize(text: str, pair: PredictorPair, cfg: CcpdConfig) -> str:
    """Parse, predict both channels, select, assign, and re-render one text."""
    return diacritize_sentence(parse_marked_text(text), pair, cfg)
