import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccpd.corpus import WindowSpec
from ccpd.orthography import Label, canonicalize, parse_marked_text, render, strip
from ccpd.predictor import (
    PredictionGrid,
    ShapeMismatch,
    oracle_predictor,
    train_ngram,
)
from ccpd.selection import (
    CcpdConfig,
    SelectionMask,
    build_grid,
    ccpd_assign,
    full_mask,
    make_mask,
    mark_hard,
    mark_soft,
    partial_diacritize,
)
from ccpd.synthetic import make_synthetic_corpus

MARK_RANGE = set(range(0x064B, 0x0653))


def count_marks(text: str) -> int:
    return sum(1 for c in text if ord(c) in MARK_RANGE)


def random_grid(rng: np.random.Generator, n: int) -> PredictionGrid:
    def channel():
        raw = rng.random((n, 15)) + 1e-6
        return raw / raw.sum(axis=1, keepdims=True)

    return PredictionGrid(channel(), channel())


# --- hard selection ----------------------------------------------------------


def test_identical_channels_select_nothing():
    rows = np.eye(15)[np.array([1, 3, 0, 7])]
    g = PredictionGrid(rows, rows.copy())
    assert not mark_hard(g).flags.any()


def test_divergent_argmax_selects_the_letter():
    sent = np.eye(15)[np.array([1, 3])]
    word = np.eye(15)[np.array([1, 5])]
    g = PredictionGrid(sent, word)
    assert mark_hard(g).flags.tolist() == [False, True]


def test_hard_mask_equals_the_oracle_flip_log():
    corpus = make_synthetic_corpus(n_sentences=25, seed=13).corpus
    pair = oracle_predictor(corpus, flip_rate_word=0.3, seed=31)
    cfg = CcpdConfig(mode="hard", inference="sp")
    for i, s in enumerate(corpus.sentences):
        mask = make_mask(build_grid(pair, s, cfg, i), cfg)
        expected = [
            pair.word.was_flipped(i, w_idx, j)
            for w_idx, w in enumerate(s.words)
            for j in range(len(w))
        ]
        assert mask.flags.tolist() == expected


def test_hard_mask_is_invariant_under_monotone_rescaling():
    rng = np.random.default_rng(5)
    g = random_grid(rng, 40)

    def sharpen(p):  # strictly monotone per position, then renormalized
        q = p**3
        return q / q.sum(axis=1, keepdims=True)

    g2 = PredictionGrid(sharpen(g.sent), sharpen(g.word))
    assert np.array_equal(mark_hard(g).flags, mark_hard(g2).flags)


# --- soft selection ----------------------------------------------------------


def test_soft_margin_direct_evaluation():
    # dyadic values keep the confidences and the margin exact in binary
    sent = np.zeros((1, 15))
    sent[0, 2] = 0.875
    sent[0, 3] = 0.125
    word = np.zeros((1, 15))
    word[0, 2] = 0.625
    word[0, 4] = 0.375
    g = PredictionGrid(sent, word)
    assert mark_soft(g, 0.125).flags.tolist() == [True]  # 0.25 > 0.125
    assert mark_soft(g, 0.25).flags.tolist() == [False]  # the margin is strict


def test_soft_extreme_thresholds():
    rng = np.random.default_rng(6)
    g = random_grid(rng, 60)
    assert mark_soft(g, 1.0).flags.sum() == 0
    assert mark_soft(g, -1.0).flags.all()


@settings(max_examples=60, derandomize=True)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=50))
def test_soft_masks_nest_as_theta_grows(seed, n):
    g = random_grid(np.random.default_rng(seed), n)
    thetas = [-1.0, -0.5, 0.0, 0.01, 0.1, 0.2, 0.4, 1.0]
    masks = [mark_soft(g, t).flags for t in thetas]
    for narrow, wide in zip(masks[1:], masks):
        assert not (narrow & ~wide).any()  # narrow is a subset of wide
    rates = [m.mean() for m in masks]
    assert all(a >= b for a, b in zip(rates, rates[1:]))


# --- assignment --------------------------------------------------------------


def test_assign_full_mask_uses_contextual_argmax():
    s = parse_marked_text("ه نم")
    rng = np.random.default_rng(2)
    g = random_grid(rng, 3)
    out = ccpd_assign(g, full_mask(3), s)
    assert [int(l) for l in out.labels] == g.sent_argmax.tolist()


def test_assign_empty_mask_renders_plain():
    s = parse_marked_text("هَ نُم")
    g = random_grid(np.random.default_rng(3), 3)
    empty = SelectionMask(np.zeros(3, dtype=bool), "hard")
    out = ccpd_assign(g, empty, s)
    assert render(out, [True] * 3) == strip(s)


def test_assign_mixed_mask():
    s = parse_marked_text("هنم")
    g = random_grid(np.random.default_rng(4), 3)
    mask = SelectionMask(np.array([True, False, True]), "hard")
    out = ccpd_assign(g, mask, s)
    labels = [int(l) for l in out.labels]
    assert labels[0] == g.sent_argmax[0]
    assert labels[1] == int(Label.NONE)
    assert labels[2] == g.sent_argmax[2]


def test_assign_rejects_shape_mismatch():
    s = parse_marked_text("هن")
    g = random_grid(np.random.default_rng(5), 3)
    with pytest.raises(ShapeMismatch):
        ccpd_assign(g, full_mask(3), s)


# --- config ------------------------------------------------------------------


def test_soft_mode_requires_theta_and_sp():
    with pytest.raises(ValueError):
        CcpdConfig(mode="soft", inference="sp")
    with pytest.raises(ValueError):
        CcpdConfig(mode="soft", theta=0.1, inference="mv")
    CcpdConfig(mode="soft", theta=0.1, inference="sp")


def test_theta_is_rejected_outside_soft_mode():
    with pytest.raises(ValueError):
        CcpdConfig(mode="hard", theta=0.1)


def test_bad_mode_names():
    with pytest.raises(ValueError):
        CcpdConfig(mode="fuzzy")
    with pytest.raises(ValueError):
        CcpdConfig(inference="beam")


# --- end-to-end text pipeline ------------------------------------------------


def test_full_mode_with_perfect_oracle_restores_the_truth():
    truth_text = "هَبّ نُمْ"
    corpus_sentence = parse_marked_text(truth_text)
    from ccpd.corpus import Corpus

    corpus = Corpus((corpus_sentence,), "truth")
    pair = oracle_predictor(corpus)
    cfg = CcpdConfig(mode="full", inference="sp")
    out = partial_diacritize(strip(corpus_sentence), pair, cfg)
    assert out == canonicalize(truth_text)


def test_hard_mode_with_identical_channels_changes_nothing():
    plain_text = "هب نم"
    from ccpd.corpus import Corpus

    corpus = Corpus((parse_marked_text(plain_text),), "plain")
    pair = oracle_predictor(corpus)  # both channels identical, zero flips
    out = partial_diacritize(plain_text, pair, CcpdConfig(mode="hard", inference="sp"))
    assert out == plain_text


def test_soft_theta_sweep_marks_monotonically_more():
    synth = make_synthetic_corpus(n_sentences=60, seed=23)
    model = train_ngram(synth.corpus)
    pair = model.as_pair()
    counts = []
    for theta in (0.4, 0.2, 0.1, 0.01):
        cfg = CcpdConfig(mode="soft", theta=theta, inference="sp")
        marks = 0
        for i, s in enumerate(synth.corpus.sentences):
            text = strip(s)
            marks += count_marks(partial_diacritize(text, pair, cfg))
        counts.append(marks)
    assert counts == sorted(counts)  # non-decreasing as theta shrinks
    assert counts[-1] > 0


def test_hard_mode_output_marks_a_subset_with_contextual_labels():
    synth = make_synthetic_corpus(n_sentences=40, seed=29)
    model = train_ngram(synth.corpus)
    cfg = CcpdConfig(mode="hard", inference="mv", window=WindowSpec(20, 2))
    total_marked = 0
    for i, s in enumerate(synth.corpus.sentences):
        g = build_grid(model.as_pair(), s, cfg, i)
        mask = make_mask(g, cfg)
        assigned = ccpd_assign(g, mask, s)
        labels = np.array([int(l) for l in assigned.labels])
        assert (labels[~mask.flags] == int(Label.NONE)).all()
        assert (labels[mask.flags] == g.sent_argmax[mask.flags]).all()
        total_marked += int(mask.flags.sum())
    assert 0 < total_marked < sum(s.letter_count for s in synth.corpus.sentences)


def test_empty_text_passes_through():
    corpus_pair = train_ngram(make_synthetic_corpus(n_sentences=5, seed=1).corpus).as_pair()
    assert partial_diacritize("", corpus_pair, CcpdConfig()) == ""
    assert partial_diacritize(" .. ", corpus_pair, CcpdConfig()) == " .. "
