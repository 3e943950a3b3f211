"""Deterministic synthetic corpora with context-dependent word forms.

The generator builds a small vocabulary in which most plain forms carry one
fixed marking, while a designated set of ambiguous forms carry two markings
disambiguated by the immediately preceding trigger word. That gives desk-scale
corpora where contextual and isolated predictions genuinely diverge on the
ambiguous words and nowhere else.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Corpus
from .orthography import Label, MarkedLetter, N_LABELS, Sentence, Word

_ALPHABET = "بتثجحخدرزسشصضطعفقكلمنهوي"

# Bare letters are common but not dominant in naturalistic marked text.
_LABEL_WEIGHTS = [4] + [1] * (N_LABELS - 1)


@dataclass(frozen=True)
class SyntheticCorpus:
    corpus: Corpus
    ambiguous_forms: frozenset[str]


def _new_plain(rng: random.Random, taken: set[str]) -> str:
    while True:
        plain = "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(2, 5)))
        if plain not in taken:
            taken.add(plain)
            return plain


def _random_labels(rng: random.Random, n: int) -> tuple[int, ...]:
    return tuple(rng.choices(range(N_LABELS), weights=_LABEL_WEIGHTS)[0] for _ in range(n))


def _variant_labels(rng: random.Random, base: tuple[int, ...]) -> tuple[int, ...]:
    out = list(base)
    positions = rng.sample(range(len(base)), k=max(1, len(base) // 2))
    for j in positions:
        choices = [lab for lab in range(N_LABELS) if lab != base[j]]
        out[j] = rng.choice(choices)
    return tuple(out)


def _word(plain: str, labels: tuple[int, ...]) -> Word:
    return Word(tuple(MarkedLetter(b, Label(lab)) for b, lab in zip(plain, labels)))


def _sentence(words: list[Word]) -> Sentence:
    separators = ("",) + (" ",) * (len(words) - 1) + ("",)
    return Sentence(tuple(words), separators)


def make_synthetic_corpus(
    n_sentences: int = 500,
    seed: int = 0,
    n_fillers: int = 30,
    n_ambiguous: int = 8,
) -> SyntheticCorpus:
    rng = random.Random(seed)
    taken: set[str] = set()

    fillers = []
    for _ in range(n_fillers):
        plain = _new_plain(rng, taken)
        fillers.append((plain, _random_labels(rng, len(plain))))

    # Each ambiguous form comes with two dedicated trigger words; the trigger
    # fully determines which marking the ambiguous word carries.
    ambiguous = []
    for _ in range(n_ambiguous):
        plain = _new_plain(rng, taken)
        form_a = _random_labels(rng, len(plain))
        form_b = _variant_labels(rng, form_a)
        trig_a = _new_plain(rng, taken)
        trig_b = _new_plain(rng, taken)
        ambiguous.append(
            (
                plain,
                form_a,
                form_b,
                (trig_a, _random_labels(rng, len(trig_a))),
                (trig_b, _random_labels(rng, len(trig_b))),
            )
        )

    sentences = []
    for _ in range(n_sentences):
        words = [
            _word(*rng.choice(fillers)) for _ in range(rng.randint(4, 10))
        ]
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.3:
                continue
            plain, form_a, form_b, trig_a, trig_b = rng.choice(ambiguous)
            if rng.random() < 0.55:
                pair = [_word(*trig_a), _word(plain, form_a)]
            else:
                pair = [_word(*trig_b), _word(plain, form_b)]
            at = rng.randint(0, len(words))
            words[at:at] = pair
        sentences.append(_sentence(words))

    corpus = Corpus(tuple(sentences), f"synthetic(seed={seed})", 0)
    return SyntheticCorpus(corpus, frozenset(item[0] for item in ambiguous))
