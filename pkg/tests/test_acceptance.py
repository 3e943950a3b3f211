"""Acceptance gate: every release criterion at its stated tolerance.

Run under pytest as usual, or directly (``python tests/test_acceptance.py``)
to get one PASS/FAIL line per criterion on stdout.
"""

import math
import os
import random
import re
import sys
import time

import numpy as np

from ccpd.corpus import WindowSpec, load_corpus, segment
from ccpd.indicators import (
    EvalScope,
    LetterLayout,
    b_der,
    der,
    flat_labels,
    h_der,
    p_der,
    r_der,
    redri,
    report,
    sr,
    sr_in_plausible_band,
    wer,
)
from ccpd.orthography import canonicalize, parse_marked_text, render, strip
from ccpd.predictor import (
    PredictionGrid,
    load_external_logits,
    oracle_predictor,
    stack_grids,
    train_ngram,
)
from ccpd.selection import CcpdConfig, SelectionMask, build_grid, make_mask, mark_hard, mark_soft
from ccpd.synthetic import make_synthetic_corpus
from ccpd.voting import collect_votes, mv_infer, resolve_votes, sp_infer

from bruteforce import (
    bf_b_der,
    bf_der,
    bf_h_der,
    bf_p_der,
    bf_r_der,
    bf_redri,
    bf_sr,
    bf_wer,
    random_instance,
)

TOL = 1e-12
LETTERS = "".join(chr(c) for c in range(0x0621, 0x064B)) + "ٱ"
MARKS = [chr(c) for c in range(0x064B, 0x0653)]
_MARK_RE = re.compile("[ً-ْ]")

CRITERIA = []


def criterion(name):
    def register(fn):
        CRITERIA.append((name, fn))
        return fn

    return register


def instance_to_arrays(inst):
    letters = [l for s in inst for w in s for l in w]
    grid = PredictionGrid(
        np.array([l["sent"] for l in letters]),
        np.array([l["word"] for l in letters]),
    )
    truth = np.array([l["truth"] for l in letters])
    mask = SelectionMask(np.array([l["mask"] for l in letters], dtype=bool), "hard")
    ids, final = [], []
    wid = 0
    for s in inst:
        for w in s:
            ids.extend([wid] * len(w))
            final.extend([False] * (len(w) - 1) + [True])
            wid += 1
    layout = LetterLayout(np.array(ids), np.array(final))
    return grid, truth, mask, layout


def _battery_matches_brute_force(inst, grid, truth, mask, layout):
    assert sr(mask) == bf_sr(inst)
    for channel, labels in (("sent", grid.sent_argmax), ("word", grid.word_argmax)):
        for subset in ("all", "marked", "unmarked"):
            for ce in ("include", "exclude"):
                got = der(labels, truth, EvalScope(subset, ce), mask=mask, layout=layout)
                want, want_empty = bf_der(inst, channel, subset, ce)
                assert got.empty == want_empty and abs(got.value - want) <= TOL
        for ce in ("include", "exclude"):
            got = wer(labels, truth, layout, ce=ce)
            want, want_empty = bf_wer(inst, channel, ce)
            assert got.empty == want_empty and abs(got.value - want) <= TOL
    assert abs(p_der(grid, truth, mask).value - bf_p_der(inst)[0]) <= TOL
    assert abs(b_der(grid, truth).value - bf_b_der(inst)[0]) <= TOL
    assert abs(h_der(grid, truth, mask).value - bf_h_der(inst)[0]) <= TOL
    assert abs(r_der(grid, truth, mask).value - bf_r_der(inst)) <= TOL
    want_redri = bf_redri(inst)
    got_redri = redri(grid, truth, mask)
    if want_redri is None:
        assert got_redri.undefined
    else:
        assert abs(got_redri.value - want_redri) <= TOL


@criterion("metric-oracle-equivalence")
def check_metric_oracle_equivalence():
    start = time.monotonic()
    rng = random.Random(1)
    for _ in range(100):
        inst = random_instance(rng, max_letters=200)
        grid, truth, mask, layout = instance_to_arrays(inst)
        assert len(truth) <= 200
        _battery_matches_brute_force(inst, grid, truth, mask, layout)
    assert time.monotonic() - start < 10.0


@criterion("hard-mode-identity")
def check_hard_mode_identity():
    rng = random.Random(1)
    for _ in range(100):
        inst = random_instance(rng, max_letters=200)
        grid, truth, _, layout = instance_to_arrays(inst)
        mask = mark_hard(grid)
        lhs = r_der(grid, truth, mask).value
        rhs = der(grid.sent_argmax, truth).value
        assert abs(lhs - rhs) <= TOL
        # the brute-force twin agrees under the derived mask too
        flat = [letter for s in inst for w in s for letter in w]
        for letter, flag in zip(flat, mask.flags):
            letter["mask"] = bool(flag)
        _battery_matches_brute_force(inst, grid, truth, mask, layout)


@criterion("soft-mode-monotonicity")
def check_soft_mode_monotonicity():
    rng = random.Random(7)
    thetas = [-1.0, -0.5, 0.0, 0.01, 0.1, 0.2, 0.4, 1.0]
    for _ in range(60):
        inst = random_instance(rng, max_letters=120)
        grid, _, _, _ = instance_to_arrays(inst)
        masks = [mark_soft(grid, t).flags for t in thetas]
        for narrow, wide in zip(masks[1:], masks):
            assert not (narrow & ~wide).any()
        rates = [m.mean() for m in masks]
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert rates[0] == 1.0  # theta = -1 selects everything
        assert rates[-1] == 0.0  # theta = 1 selects nothing


@criterion("oracle-calibration")
def check_oracle_calibration():
    corpus = make_synthetic_corpus(n_sentences=500, seed=1105).corpus
    truth = flat_labels(corpus.sentences)
    assert len(truth) >= 10_000
    for q in (0.1, 0.3, 0.5):
        pair = oracle_predictor(corpus, flip_rate_word=q, seed=2203)
        cfg = CcpdConfig(mode="hard", inference="sp")
        grids = [build_grid(pair, s, cfg, i) for i, s in enumerate(corpus.sentences)]
        g = stack_grids(grids)
        mask = mark_hard(g)
        assert abs(sr(mask) - q) <= 0.02
        assert p_der(g, truth, mask).value == 0.0
        assert h_der(g, truth, mask).value == 0.0
        assert r_der(g, truth, mask).value == 0.0
        improvement = redri(g, truth, mask)
        assert not improvement.undefined and improvement.value == 1.0


def _fuzz_marked_string(rng):
    words = []
    for _ in range(rng.randint(1, 6)):
        parts = []
        for _ in range(rng.randint(1, 5)):
            parts.append(rng.choice(LETTERS))
            for _ in range(rng.randint(0, 3)):
                parts.append(rng.choice(MARKS))
        words.append("".join(parts))
    return " ".join(words)


@criterion("parse-render-round-trip")
def check_parse_render_round_trip():
    rng = random.Random(905)
    for _ in range(1000):
        t = _fuzz_marked_string(rng)
        s = parse_marked_text(t)
        assert render(s, [True] * s.letter_count) == canonicalize(t)
        assert strip(s) == _MARK_RE.sub("", t)


@criterion("voting-determinism-and-degeneracy")
def check_voting_determinism():
    synth = make_synthetic_corpus(n_sentences=15, seed=61)
    model = train_ngram(synth.corpus)
    pair = oracle_predictor(synth.corpus, flip_rate_sent=0.4, seed=5)

    wide = WindowSpec(50, 2)  # wider than every sentence
    for i, s in enumerate(synth.corpus.sentences):
        assert len(segment(s, wide)) == 1
        mv = mv_infer(model.predict, s, wide, seed=0, sentence_index=i)
        sp = sp_infer(model.predict, s, sentence_index=i)
        assert np.array_equal(mv.argmax(axis=1), sp.argmax(axis=1))
        # with a one-hot predictor the two are identical arrays
        assert np.array_equal(
            mv_infer(pair.sent, s, wide, seed=0, sentence_index=i),
            sp_infer(pair.sent, s, sentence_index=i),
        )

    narrow = WindowSpec(4, 2)
    rng = random.Random(3)
    for i, s in enumerate(synth.corpus.sentences):
        windows = segment(s, narrow)
        reference = resolve_votes(
            collect_votes(model.predict, s, windows, seed=9, sentence_index=i), i
        )
        for _ in range(3):
            shuffled = list(windows)
            rng.shuffle(shuffled)
            rerun = resolve_votes(
                collect_votes(model.predict, s, shuffled, seed=9, sentence_index=i), i
            )
            assert np.array_equal(reference, rerun)
        for _ in range(3):
            assert np.array_equal(
                reference, mv_infer(model.predict, s, narrow, seed=9, sentence_index=i)
            )


@criterion("end-to-end-desk-run")
def check_end_to_end_desk_run():
    start = time.monotonic()
    synth = make_synthetic_corpus(n_sentences=500, seed=3)
    model = train_ngram(synth.corpus)
    cfg = CcpdConfig(mode="hard", inference="mv", window=WindowSpec(20, 2))
    pair = model.as_pair()

    marked = {True: 0, False: 0}
    total = {True: 0, False: 0}
    for i, s in enumerate(synth.corpus.sentences):
        mask = make_mask(build_grid(pair, s, cfg, i), cfg)
        j = 0
        for w in s.words:
            ambiguous = w.plain in synth.ambiguous_forms
            for _ in range(len(w)):
                total[ambiguous] += 1
                marked[ambiguous] += bool(mask.flags[j])
                j += 1
    rate_ambiguous = marked[True] / total[True]
    rate_plain = marked[False] / total[False]
    assert rate_ambiguous > rate_plain

    rep = report(synth.corpus, [("lexicon[mv,hard]", pair, cfg)])
    (row,) = rep.rows
    assert not row.redri.undefined and row.redri.value > 0.0
    assert time.monotonic() - start < 60.0


@criterion("sr-plausibility-band")
def check_sr_band_flag_logic():
    assert sr_in_plausible_band(0.01)
    assert sr_in_plausible_band(0.30)
    assert not sr_in_plausible_band(math.nextafter(0.01, 0.0))
    assert not sr_in_plausible_band(math.nextafter(0.30, 1.0))
    corpus = make_synthetic_corpus(n_sentences=20, seed=77).corpus
    pair = oracle_predictor(corpus)
    rep = report(corpus, [("full", pair, CcpdConfig(mode="full", inference="sp"))])
    assert not rep.rows[0].sr_in_band
    rep = report(corpus, [("hard", pair, CcpdConfig(mode="hard", inference="sp"))])
    assert not rep.rows[0].sr_in_band  # a perfect predictor selects nothing


def _d2_environment():
    logits = os.environ.get("CCPD_D2_LOGITS")
    test_split = os.environ.get("CCPD_TASHKEELA_TEST")
    return logits, test_split


@criterion("d2-logits-integration (optional)")
def check_d2_logits_integration():
    logits, test_split = _d2_environment()
    if not (logits and test_split):
        raise EnvironmentError(
            "set CCPD_D2_LOGITS and CCPD_TASHKEELA_TEST to run the integration row"
        )
    corpus = load_corpus(test_split)
    pair = load_external_logits(logits)
    rep = report(corpus, [("D2", pair, CcpdConfig(mode="hard", inference="sp"))])
    (row,) = rep.rows
    pp = 0.001  # one tenth of a percentage point
    assert abs(row.sr - 0.065) <= pp
    assert abs(row.p_der.value - 0.112) <= pp
    assert abs(row.r_der.value - 0.018) <= pp
    assert abs(row.der_ce.value - 0.0185) <= pp
    assert abs(row.wer_ce.value - 0.0553) <= pp


# --- pytest wrappers ---------------------------------------------------------

import pytest


def test_metric_oracle_equivalence():
    check_metric_oracle_equivalence()


def test_hard_mode_identity():
    check_hard_mode_identity()


def test_soft_mode_monotonicity():
    check_soft_mode_monotonicity()


def test_oracle_calibration():
    check_oracle_calibration()


def test_parse_render_round_trip():
    check_parse_render_round_trip()


def test_voting_determinism_and_degeneracy():
    check_voting_determinism()


def test_end_to_end_desk_run():
    check_end_to_end_desk_run()


def test_sr_plausibility_band():
    check_sr_band_flag_logic()


@pytest.mark.skipif(
    not all(_d2_environment()),
    reason="set CCPD_D2_LOGITS and CCPD_TASHKEELA_TEST for the integration row",
)
def test_d2_logits_integration():
    check_d2_logits_integration()


def main() -> int:
    failures = 0
    for name, fn in CRITERIA:
        try:
            fn()
        except EnvironmentError as e:
            print(f"SKIP  {name}: {e}")
        except AssertionError as e:
            failures += 1
            print(f"FAIL  {name}: {e}")
        else:
            print(f"PASS  {name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
