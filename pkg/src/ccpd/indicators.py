"""Quality indicators for partially diacritized output.

The battery reported per system row:

  sr      fraction of letters selected for marking
  p_der   contextual-channel error rate on the selected letters
  h_der   isolated-channel error rate on the letters left bare
  b_der   isolated-channel error rate over every letter (the no-marks baseline)
  r_der   sr * p_der + (1 - sr) * h_der, the expected reader error
  redri   1 - r_der / b_der, the relative improvement over the baseline
  der/wer conventional full-coverage letter and word error rates of the
          contextual channel, with and without each word's final letter
          (the case-ending position)

Error rates over an empty letter set are reported as 0 with an ``empty``
flag; redri is flagged undefined when b_der is 0 rather than collapsing to a
number.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus
from .orthography import Sentence
from .predictor import PredictionGrid, PredictorPair, ShapeMismatch, stack_grids
from .selection import CcpdConfig, SelectionMask, build_grid, make_mask

# Published coverage of deliberate partial marking clusters well inside this
# range; selection rates outside it are worth a second look.
SR_BAND = (0.01, 0.30)

REPORT_COLUMNS = (
    "system",
    "sr",
    "p_der",
    "h_der",
    "r_der",
    "redri",
    "der_ce",
    "wer_ce",
    "der_nce",
    "wer_nce",
)


class EmptyScope(ValueError):
    """An indicator was asked for on a corpus with no letters."""


@dataclass(frozen=True)
class EvalScope:
    """Which letters count: a mask-defined subset, with or without word-final
    positions."""

    subset: str = "all"
    ce: str = "include"

    def __post_init__(self) -> None:
        if self.subset not in ("all", "marked", "unmarked"):
            raise ValueError("subset must be all, marked, or unmarked")
        if self.ce not in ("include", "exclude"):
            raise ValueError("ce must be include or exclude")


@dataclass(frozen=True)
class MetricValue:
    value: float
    empty: bool = False
    undefined: bool = False


@dataclass(frozen=True, eq=False)
class LetterLayout:
    """Flat per-letter word ids and word-final flags for a sentence sequence."""

    word_id: np.ndarray
    word_final: np.ndarray

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sentence]) -> "LetterLayout":
        ids: list[int] = []
        final: list[bool] = []
        wid = 0
        for s in sentences:
            for w in s.words:
                n = len(w)
                ids.extend([wid] * n)
                final.extend([False] * (n - 1) + [True])
                wid += 1
        return cls(np.asarray(ids, dtype=np.int64), np.asarray(final, dtype=bool))

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> "LetterLayout":
        return cls.from_sentences(corpus.sentences)

    def __len__(self) -> int:
        return len(self.word_id)


def flat_labels(sentences: Sequence[Sentence]) -> np.ndarray:
    return np.asarray(
        [int(ml.diac) for s in sentences for ml in s.iter_letters()], dtype=np.int64
    )


def _mask_flags(mask: SelectionMask | np.ndarray) -> np.ndarray:
    flags = mask.flags if isinstance(mask, SelectionMask) else np.asarray(mask)
    return flags.astype(bool)


def sr(mask: SelectionMask | np.ndarray) -> float:
    """Fraction of eligible letters selected for marking."""
    flags = _mask_flags(mask)
    if flags.size == 0:
        raise EmptyScope("selection rate needs at least one letter")
    return int(flags.sum()) / flags.size


def sr_in_plausible_band(value: float) -> bool:
    return SR_BAND[0] <= value <= SR_BAND[1]


def der(
    pred: np.ndarray,
    truth: np.ndarray,
    scope: EvalScope = EvalScope(),
    mask: SelectionMask | np.ndarray | None = None,
    layout: LetterLayout | None = None,
) -> MetricValue:
    """Label mismatch rate over the letters the scope keeps."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ShapeMismatch(f"pred {pred.shape} vs truth {truth.shape}")
    keep = np.ones(pred.shape[0], dtype=bool)
    if scope.subset != "all":
        if mask is None:
            raise ValueError(f"scope {scope.subset!r} needs a selection mask")
        flags = _mask_flags(mask)
        if flags.shape != pred.shape:
            raise ShapeMismatch(f"mask {flags.shape} vs labels {pred.shape}")
        keep &= flags if scope.subset == "marked" else ~flags
    if scope.ce == "exclude":
        if layout is None:
            raise ValueError("excluding case endings needs a letter layout")
        if len(layout) != pred.shape[0]:
            raise ShapeMismatch(f"layout {len(layout)} vs labels {pred.shape}")
        keep &= ~layout.word_final
    n = int(keep.sum())
    if n == 0:
        return MetricValue(0.0, empty=True)
    return MetricValue(int((pred[keep] != truth[keep]).sum()) / n)


def wer(
    pred: np.ndarray,
    truth: np.ndarray,
    layout: LetterLayout,
    ce: str = "include",
) -> MetricValue:
    """Fraction of words with any in-scope letter mislabeled.

    With ce="exclude", word-final letters do not count and single-letter
    words drop out of the denominator entirely.
    """
    if ce not in ("include", "exclude"):
        raise ValueError("ce must be include or exclude")
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or len(layout) != pred.shape[0]:
        raise ShapeMismatch("labels and layout must share one letter count")
    if pred.size == 0:
        return MetricValue(0.0, empty=True)
    keep = np.ones(pred.shape[0], dtype=bool)
    if ce == "exclude":
        keep &= ~layout.word_final
    n_words = int(layout.word_id.max()) + 1
    scored = np.bincount(layout.word_id[keep], minlength=n_words) > 0
    wrong = np.bincount(layout.word_id[keep & (pred != truth)], minlength=n_words) > 0
    denom = int(scored.sum())
    if denom == 0:
        return MetricValue(0.0, empty=True)
    return MetricValue(int(wrong.sum()) / denom)


def p_der(g: PredictionGrid, truth: np.ndarray, mask: SelectionMask | np.ndarray) -> MetricValue:
    """Contextual-channel error rate on the selected letters."""
    return der(g.sent_argmax, truth, EvalScope(subset="marked"), mask=mask)


def b_der(g: PredictionGrid, truth: np.ndarray) -> MetricValue:
    """Isolated-channel error rate over all letters."""
    return der(g.word_argmax, truth)


def h_der(g: PredictionGrid, truth: np.ndarray, mask: SelectionMask | np.ndarray) -> MetricValue:
    """Isolated-channel error rate on the letters left bare."""
    return der(g.word_argmax, truth, EvalScope(subset="unmarked"), mask=mask)


def r_der(g: PredictionGrid, truth: np.ndarray, mask: SelectionMask | np.ndarray) -> MetricValue:
    """Selection-weighted reader error: sr * p_der + (1 - sr) * h_der."""
    rate = sr(mask)
    p = p_der(g, truth, mask)
    h = h_der(g, truth, mask)
    return MetricValue(rate * p.value + (1.0 - rate) * h.value)


def redri(g: PredictionGrid, truth: np.ndarray, mask: SelectionMask | np.ndarray) -> MetricValue:
    """Relative reader-error improvement over the isolated baseline."""
    base = b_der(g, truth)
    if base.value == 0.0:
        return MetricValue(math.nan, undefined=True)
    return MetricValue(1.0 - r_der(g, truth, mask).value / base.value)


@dataclass(frozen=True)
class IndicatorRow:
    system: str
    sr: float
    sr_in_band: bool
    p_der: MetricValue
    h_der: MetricValue
    b_der: MetricValue
    r_der: MetricValue
    redri: MetricValue
    der_ce: MetricValue
    wer_ce: MetricValue
    der_nce: MetricValue
    wer_nce: MetricValue


@dataclass(frozen=True)
class IndicatorReport:
    rows: tuple[IndicatorRow, ...]


def evaluate_system(
    name: str,
    pair: PredictorPair,
    cfg: CcpdConfig,
    sentences: Sequence[Sentence],
    truth: np.ndarray,
    layout: LetterLayout,
) -> IndicatorRow:
    grids = [build_grid(pair, s, cfg, i) for i, s in enumerate(sentences)]
    masks = [make_mask(g, cfg) for g in grids]
    g = stack_grids(grids)
    mask = SelectionMask(
        np.concatenate([m.flags for m in masks]) if masks else np.zeros(0, dtype=bool),
        cfg.mode,
        cfg.theta,
    )
    rate = sr(mask)
    sent_labels = g.sent_argmax
    return IndicatorRow(
        system=name,
        sr=rate,
        sr_in_band=sr_in_plausible_band(rate),
        p_der=p_der(g, truth, mask),
        h_der=h_der(g, truth, mask),
        b_der=b_der(g, truth),
        r_der=r_der(g, truth, mask),
        redri=redri(g, truth, mask),
        der_ce=der(sent_labels, truth),
        wer_ce=wer(sent_labels, truth, layout),
        der_nce=der(sent_labels, truth, EvalScope(ce="exclude"), layout=layout),
        wer_nce=wer(sent_labels, truth, layout, ce="exclude"),
    )


def report(
    corpus: Corpus,
    systems: Sequence[tuple[str, PredictorPair, CcpdConfig]],
) -> IndicatorReport:
    """One indicator row per (name, predictor pair, config) system."""
    if not systems:
        raise ValueError("need at least one system to report on")
    layout = LetterLayout.from_corpus(corpus)
    truth = flat_labels(corpus.sentences)
    if truth.size == 0:
        raise EmptyScope("the corpus has no letters to evaluate")
    rows = tuple(
        evaluate_system(name, pair, cfg, corpus.sentences, truth, layout)
        for name, pair, cfg in systems
    )
    return IndicatorReport(rows)


def _fmt(metric: MetricValue) -> str:
    if metric.undefined:
        return "NA"
    return f"{metric.value:.6f}"


def to_tsv(rep: IndicatorReport) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for row in rep.rows:
        lines.append(
            "\t".join(
                (
                    row.system,
                    f"{row.sr:.6f}",
                    _fmt(row.p_der),
                    _fmt(row.h_der),
                    _fmt(row.r_der),
                    _fmt(row.redri),
                    _fmt(row.der_ce),
                    _fmt(row.wer_ce),
                    _fmt(row.der_nce),
                    _fmt(row.wer_nce),
                )
            )
        )
    return "\n".join(lines) + "\n"


def to_json(rep: IndicatorReport) -> str:
    records = []
    for row in rep.rows:
        records.append(
            {
                "system": row.system,
                "sr": row.sr,
                "p_der": row.p_der.value,
                "h_der": row.h_der.value,
                "r_der": row.r_der.value,
                "redri": None if row.redri.undefined else row.redri.value,
                "der_ce": row.der_ce.value,
                "wer_ce": row.wer_ce.value,
                "der_nce": row.der_nce.value,
                "wer_nce": row.wer_nce.value,
                "flags": {
                    "sr_in_band": row.sr_in_band,
                    "p_der_empty": row.p_der.empty,
                    "h_der_empty": row.h_der.empty,
                    "wer_nce_empty": row.wer_nce.empty,
                    "redri_defined": not row.redri.undefined,
                },
            }
        )
    return json.dumps(records, ensure_ascii=False, indent=2) + "\n"


def report_warnings(rep: IndicatorReport) -> list[str]:
    """Human-readable notes surfaced next to the machine-readable report."""
    notes: list[str] = []
    for row in rep.rows:
        if not row.sr_in_band:
            notes.append(
                f"{row.system}: selection rate {row.sr:.4f} outside the "
                f"plausible band [{SR_BAND[0]:.2f}, {SR_BAND[1]:.2f}]"
            )
        for name in ("p_der", "h_der", "der_nce", "wer_nce"):
            if getattr(row, name).empty:
                notes.append(f"{row.system}: {name} computed over an empty scope")
        if row.redri.undefined:
            notes.append(f"{row.system}: redri undefined (baseline error rate is 0)")
    return notes
