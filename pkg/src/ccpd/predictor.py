"""Per-letter diacritic predictors and their two application modes.

A predictor maps (context words, target index) to one probability row per
letter of the target word over the 15 labels. The same predictor is applied
twice per sentence: once with surrounding words (the contextual channel) and
once with the bare word (the isolated channel); downstream selection
contrasts the two channels position by position.

Three predictor families are provided: a count-based word/bigram lexicon with
letter backoff, a ground-truth oracle with controllable per-channel error
rates (for exact-expectation testing), and a replay predictor fed from an
externally exported logits file.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Protocol, Sequence

import numpy as np

from .corpus import Corpus
from .orthography import N_LABELS, Sentence
from .rng import keyed_bernoulli, keyed_index


class EmptyCorpus(ValueError):
    """Training requires at least one word."""


class FormatError(ValueError):
    """A persisted model or logits file is malformed."""


class MissingPosition(LookupError):
    """A replay predictor was queried for a position it has no record of."""


class ShapeMismatch(ValueError):
    """Arrays that must share a letter layout do not."""


@dataclass(frozen=True)
class TruthHint:
    """Position (and optionally gold labels) of the word being predicted.

    Purely informational for the lexicon model; required by the oracle and
    replay predictors, whose outputs are keyed by corpus position.
    """

    sentence_index: int
    word_index: int
    labels: tuple[int, ...] | None = None


class Predictor(Protocol):
    def __call__(
        self,
        context: Sequence[str],
        target: int,
        hint: TruthHint | None = None,
    ) -> np.ndarray: ...


class PredictorPair(NamedTuple):
    """The predictors used for the contextual and isolated channels."""

    sent: Predictor
    word: Predictor


@dataclass(frozen=True, eq=False)
class PredictionGrid:
    """Per-letter label distributions for both channels of one letter layout."""

    sent: np.ndarray
    word: np.ndarray

    def __post_init__(self) -> None:
        if self.sent.shape != self.word.shape:
            raise ShapeMismatch(
                f"channel shapes differ: {self.sent.shape} vs {self.word.shape}"
            )
        if self.sent.ndim != 2 or self.sent.shape[1] != N_LABELS:
            raise ShapeMismatch(f"expected (letters, {N_LABELS}) channels")
        for name, arr in (("sent", self.sent), ("word", self.word)):
            if arr.size and ((arr < 0).any() or (np.abs(arr.sum(axis=1) - 1.0) > 1e-9).any()):
                raise ValueError(f"{name} channel rows are not probability vectors")

    def __len__(self) -> int:
        return self.sent.shape[0]

    @property
    def sent_argmax(self) -> np.ndarray:
        return self.sent.argmax(axis=1)

    @property
    def word_argmax(self) -> np.ndarray:
        return self.word.argmax(axis=1)


def stack_grids(grids: Sequence[PredictionGrid]) -> PredictionGrid:
    """Concatenate per-sentence grids into one corpus-level grid."""
    if not grids:
        return PredictionGrid(np.zeros((0, N_LABELS)), np.zeros((0, N_LABELS)))
    return PredictionGrid(
        np.concatenate([g.sent for g in grids]),
        np.concatenate([g.word for g in grids]),
    )


def make_hint(s: Sentence, word_index: int, sentence_index: int) -> TruthHint:
    return TruthHint(
        sentence_index,
        word_index,
        tuple(int(ml.diac) for ml in s.words[word_index].letters),
    )


def apply_isolated(f: Predictor, s: Sentence, sentence_index: int = 0) -> np.ndarray:
    """Predict every word with no neighbors at all (the isolated channel)."""
    if not s.words:
        return np.zeros((0, N_LABELS))
    rows = [
        f([w.plain], 0, make_hint(s, i, sentence_index))
        for i, w in enumerate(s.words)
    ]
    return np.concatenate(rows)


def apply_contextual(
    f: Predictor, s: Sentence, T: int, sentence_index: int = 0
) -> np.ndarray:
    """Predict each word with the words at distance <= T as context.

    T = 0 degenerates to the isolated application.
    """
    if T < 0:
        raise ValueError("context radius must be >= 0")
    if not s.words:
        return np.zeros((0, N_LABELS))
    plains = list(s.plain_words)
    rows = []
    for i in range(len(plains)):
        lo = max(0, i - T)
        hi = min(len(plains), i + T + 1)
        rows.append(f(plains[lo:hi], i - lo, make_hint(s, i, sentence_index)))
    return np.concatenate(rows)


# ---------------------------------------------------------------------------
# Count-based lexicon model


def _position_class(j: int, n: int) -> str:
    if n == 1:
        return "single"
    if j == 0:
        return "initial"
    if j == n - 1:
        return "final"
    return "medial"


def _form_marginal(forms: dict[tuple[int, ...], int], n: int) -> np.ndarray:
    counts = np.zeros((n, N_LABELS))
    for labels, c in forms.items():
        for j, lab in enumerate(labels):
            counts[j, lab] += c
    return counts / counts.sum(axis=1, keepdims=True)


_MODEL_MAGIC = b"CCPD1"


@dataclass(frozen=True)
class NgramModel:
    """Word and bigram lexicons of marked forms, with per-letter backoff.

    Prediction interpolates, with weight lam at each level: the bigram lexicon
    (previous plain word, word) over the unigram lexicon over an add-alpha
    smoothed per-letter label distribution conditioned on (letter, position
    class). Unseen keys simply fall through to the next level.
    """

    unigrams: dict[str, dict[tuple[int, ...], int]]
    bigrams: dict[tuple[str, str], dict[tuple[int, ...], int]]
    letter_counts: dict[tuple[str, str], tuple[int, ...]]
    alpha: float = 0.1
    lam: float = 0.7

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")

    def _backoff_rows(self, word: str) -> np.ndarray:
        rows = np.empty((len(word), N_LABELS))
        for j, letter in enumerate(word):
            stored = self.letter_counts.get((letter, _position_class(j, len(word))))
            c = np.asarray(stored, dtype=float) if stored else np.zeros(N_LABELS)
            rows[j] = (c + self.alpha) / (c.sum() + self.alpha * N_LABELS)
        return rows

    def predict(
        self,
        context: Sequence[str],
        target: int,
        hint: TruthHint | None = None,
    ) -> np.ndarray:
        word = context[target]
        p = self._backoff_rows(word)
        forms = self.unigrams.get(word)
        if forms:
            p = self.lam * _form_marginal(forms, len(word)) + (1.0 - self.lam) * p
        if target > 0:
            pair_forms = self.bigrams.get((context[target - 1], word))
            if pair_forms:
                p = self.lam * _form_marginal(pair_forms, len(word)) + (1.0 - self.lam) * p
        return p / p.sum(axis=1, keepdims=True)

    def save(self, path: str | Path) -> None:
        payload = {
            "alpha": self.alpha,
            "lambda": self.lam,
            "unigrams": {
                w: {_label_key(f): c for f, c in forms.items()}
                for w, forms in self.unigrams.items()
            },
            "bigrams": {
                f"{prev}\t{w}": {_label_key(f): c for f, c in forms.items()}
                for (prev, w), forms in self.bigrams.items()
            },
            "letters": {
                f"{letter}\t{pos}": list(counts)
                for (letter, pos), counts in self.letter_counts.items()
            },
        }
        blob = json.dumps(
            payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")
        )
        Path(path).write_bytes(_MODEL_MAGIC + b"\n" + blob.encode("utf-8") + b"\n")

    @classmethod
    def load(cls, path: str | Path) -> "NgramModel":
        data = Path(path).read_bytes()
        if not data.startswith(_MODEL_MAGIC + b"\n"):
            raise FormatError(f"{path}: not a CCPD1 model file")
        try:
            payload = json.loads(data[len(_MODEL_MAGIC) + 1 :].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise FormatError(f"{path}: corrupt model payload: {e}") from None
        unigrams = {
            w: {_parse_label_key(k): int(c) for k, c in forms.items()}
            for w, forms in payload["unigrams"].items()
        }
        bigrams = {}
        for key, forms in payload["bigrams"].items():
            prev, w = key.split("\t")
            bigrams[(prev, w)] = {_parse_label_key(k): int(c) for k, c in forms.items()}
        letters = {}
        for key, counts in payload["letters"].items():
            letter, pos = key.split("\t")
            letters[(letter, pos)] = tuple(int(c) for c in counts)
        return cls(unigrams, bigrams, letters, payload["alpha"], payload["lambda"])

    def as_pair(self) -> PredictorPair:
        return PredictorPair(self.predict, self.predict)


def _label_key(labels: tuple[int, ...]) -> str:
    return ",".join(map(str, labels))


def _parse_label_key(key: str) -> tuple[int, ...]:
    return tuple(int(x) for x in key.split(","))


def train_ngram(corpus: Corpus, alpha: float = 0.1, lam: float = 0.7) -> NgramModel:
    """Count marked forms and per-letter labels from a diacritized corpus."""
    unigrams: dict[str, dict[tuple[int, ...], int]] = defaultdict(lambda: defaultdict(int))
    bigrams: dict[tuple[str, str], dict[tuple[int, ...], int]] = defaultdict(
        lambda: defaultdict(int)
    )
    letters: dict[tuple[str, str], list[int]] = defaultdict(lambda: [0] * N_LABELS)
    n_words = 0
    for s in corpus.sentences:
        prev: str | None = None
        for w in s.words:
            plain = w.plain
            labels = tuple(int(ml.diac) for ml in w.letters)
            unigrams[plain][labels] += 1
            if prev is not None:
                bigrams[(prev, plain)][labels] += 1
            for j, ml in enumerate(w.letters):
                letters[(ml.base, _position_class(j, len(w)))][int(ml.diac)] += 1
            prev = plain
            n_words += 1
    if n_words == 0:
        raise EmptyCorpus("cannot train on a corpus with no words")
    return NgramModel(
        {w: dict(forms) for w, forms in unigrams.items()},
        {k: dict(forms) for k, forms in bigrams.items()},
        {k: tuple(c) for k, c in letters.items()},
        alpha,
        lam,
    )


# ---------------------------------------------------------------------------
# Ground-truth oracle

_FLIP_STREAM = 101
_ALT_STREAM = 102
SENT_CHANNEL = 0
WORD_CHANNEL = 1


@dataclass(frozen=True)
class OracleChannel:
    """One-hot gold labels, independently corrupted at a fixed rate.

    Each position flips to a uniformly chosen wrong label with probability
    flip_rate; both the decision and the replacement label are keyed by
    (seed, channel, sentence, word, letter), so the stream is independent of
    call order.
    """

    truth: tuple[tuple[tuple[int, ...], ...], ...]
    flip_rate: float
    seed: int
    channel: int

    def was_flipped(self, sentence_index: int, word_index: int, letter_index: int) -> bool:
        return keyed_bernoulli(
            self.seed,
            self.flip_rate,
            _FLIP_STREAM,
            self.channel,
            sentence_index,
            word_index,
            letter_index,
        )

    def __call__(
        self,
        context: Sequence[str],
        target: int,
        hint: TruthHint | None = None,
    ) -> np.ndarray:
        if hint is None:
            raise ValueError("the oracle predictor needs a position hint")
        labels = self.truth[hint.sentence_index][hint.word_index]
        out = np.zeros((len(labels), N_LABELS))
        for j, lab in enumerate(labels):
            if self.was_flipped(hint.sentence_index, hint.word_index, j):
                alt = keyed_index(
                    self.seed,
                    N_LABELS - 1,
                    _ALT_STREAM,
                    self.channel,
                    hint.sentence_index,
                    hint.word_index,
                    j,
                )
                lab = alt if alt < lab else alt + 1
            out[j, lab] = 1.0
        return out


def oracle_predictor(
    truth: Corpus,
    flip_rate_sent: float = 0.0,
    flip_rate_word: float = 0.0,
    seed: int = 0,
) -> PredictorPair:
    for name, rate in (("flip_rate_sent", flip_rate_sent), ("flip_rate_word", flip_rate_word)):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    table = tuple(
        tuple(tuple(int(ml.diac) for ml in w.letters) for w in s.words)
        for s in truth.sentences
    )
    return PredictorPair(
        OracleChannel(table, flip_rate_sent, seed, SENT_CHANNEL),
        OracleChannel(table, flip_rate_word, seed, WORD_CHANNEL),
    )


# ---------------------------------------------------------------------------
# Externally exported logits

_CHANNEL_NAMES = ("sent", "word")


@dataclass(frozen=True)
class LogitsChannel:
    """Replays stored distributions keyed by (sentence, word, letter)."""

    table: dict[tuple[int, int, int], np.ndarray]
    name: str

    def __call__(
        self,
        context: Sequence[str],
        target: int,
        hint: TruthHint | None = None,
    ) -> np.ndarray:
        if hint is None:
            raise ValueError("the logits predictor needs a position hint")
        n = len(context[target])
        out = np.empty((n, N_LABELS))
        for j in range(n):
            key = (hint.sentence_index, hint.word_index, j)
            row = self.table.get(key)
            if row is None:
                raise MissingPosition(
                    f"no '{self.name}' record for sentence {key[0]} "
                    f"word {key[1]} letter {key[2]}"
                )
            out[j] = row
        return out


def load_external_logits(path: str | Path) -> PredictorPair:
    """Load the tab-separated interchange format into a replay predictor pair.

    One record per line: ``sid<TAB>word<TAB>letter<TAB>channel<TAB>p0,...,p14``
    with channel in {sent, word} and the probabilities summing to 1 within
    1e-6 (re-normalized exactly on load). Blank lines are ignored.
    """
    tables: dict[str, dict[tuple[int, int, int], np.ndarray]] = {
        name: {} for name in _CHANNEL_NAMES
    }

    def bad(ln: int, msg: str) -> FormatError:
        return FormatError(f"{path}: line {ln}: {msg}")

    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise bad(ln, f"expected 5 tab-separated fields, got {len(parts)}")
            try:
                sid, w, c = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise bad(ln, "sentence/word/letter indices must be integers") from None
            if min(sid, w, c) < 0:
                raise bad(ln, "indices must be non-negative")
            channel = parts[3]
            if channel not in _CHANNEL_NAMES:
                raise bad(ln, f"channel must be one of {_CHANNEL_NAMES}, got {channel!r}")
            try:
                p = np.array([float(x) for x in parts[4].split(",")])
            except ValueError:
                raise bad(ln, "probabilities must be decimal floats") from None
            if p.size != N_LABELS:
                raise bad(ln, f"expected {N_LABELS} probabilities, got {p.size}")
            if (p < 0).any():
                raise bad(ln, "probabilities must be non-negative")
            total = p.sum()
            if abs(total - 1.0) > 1e-6:
                raise bad(ln, f"probabilities sum to {total!r}, not 1")
            key = (sid, w, c)
            if key in tables[channel]:
                raise bad(ln, f"duplicate record for {key} channel {channel}")
            tables[channel][key] = p / total
    return PredictorPair(
        LogitsChannel(tables["sent"], "sent"),
        LogitsChannel(tables["word"], "word"),
    )
