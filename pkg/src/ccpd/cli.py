"""Command-line front end: clean, train, diacritize, eval, logits-check.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 model/position
mismatch (a replay predictor missing a queried key).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .corpus import Corpus, WindowSpec, load_corpus, save_corpus, token_counts
from .indicators import EmptyScope, report, report_warnings, to_json, to_tsv
from .orthography import OrthographyError, Sentence, parse_marked_text
from .predictor import (
    EmptyCorpus,
    FormatError,
    MissingPosition,
    NgramModel,
    PredictorPair,
    load_external_logits,
    oracle_predictor,
    train_ngram,
)
from .selection import CcpdConfig, diacritize_sentence


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccpd",
        description="Partial diacritization of Arabic text by contrasting "
        "contextual and isolated predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_clean = sub.add_parser("clean", help="canonicalize a corpus file")
    p_clean.add_argument("input")
    p_clean.add_argument("output")
    p_clean.add_argument("--strict", action="store_true")
    p_clean.set_defaults(func=cmd_clean)

    p_train = sub.add_parser("train", help="train the lexicon baseline")
    p_train.add_argument("corpus")
    p_train.add_argument("output")
    p_train.add_argument("--alpha", type=float, default=0.1)
    p_train.add_argument("--lambda", dest="lambda_weight", type=float, default=0.7)
    p_train.add_argument("--strict", action="store_true")
    p_train.set_defaults(func=cmd_train)

    p_diac = sub.add_parser(
        "diacritize", help="partially diacritize stdin text to stdout"
    )
    _add_model_flags(p_diac)
    p_diac.set_defaults(func=cmd_diacritize)

    p_eval = sub.add_parser("eval", help="run the indicator battery on a test corpus")
    p_eval.add_argument("test")
    _add_model_flags(p_eval)
    p_eval.add_argument("--report", choices=("tsv", "json"), default="tsv")
    p_eval.add_argument("--name", help="system name for the report row")
    p_eval.set_defaults(func=cmd_eval)

    p_check = sub.add_parser("logits-check", help="validate a logits export file")
    p_check.add_argument("file")
    p_check.set_defaults(func=cmd_logits_check)

    return parser


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--model",
        required=True,
        help="ngram model file, 'oracle', or 'logits:FILE'",
    )
    p.add_argument(
        "--mode",
        choices=("full", "hard", "soft"),
        default="hard",
        help="mark everything, channel disagreements, or margin exceedances",
    )
    p.add_argument("--theta", type=float, help="soft-mode confidence margin in [-1, 1]")
    p.add_argument(
        "--inference",
        choices=("mv", "sp"),
        default="mv",
        help="majority voting over windows, or one full-sentence pass",
    )
    p.add_argument("--window", type=int, help="voting window width in words (default 20)")
    p.add_argument("--stride", type=int, help="voting window stride in words (default 2)")
    p.add_argument(
        "--T",
        type=int,
        dest="t_radius",
        help="cap the context radius for sp inference (default: whole sentence)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flip-sent", type=float, default=0.0, help="oracle noise rate, contextual channel")
    p.add_argument("--flip-word", type=float, default=0.0, help="oracle noise rate, isolated channel")
    p.add_argument("--strict", action="store_true")


def build_config(args: argparse.Namespace) -> CcpdConfig:
    if args.theta is not None and not -1.0 <= args.theta <= 1.0:
        raise UsageError("--theta must lie in [-1, 1]")
    if args.model.startswith("logits:") and (
        args.window is not None or args.stride is not None or args.t_radius is not None
    ):
        raise UsageError(
            "logits models replay pre-bound positions; "
            "--window/--stride/--T do not apply"
        )
    try:
        window = WindowSpec(
            args.window if args.window is not None else 20,
            args.stride if args.stride is not None else 2,
        )
        return CcpdConfig(
            mode=args.mode,
            theta=args.theta,
            inference=args.inference,
            window=window,
            T=args.t_radius,
            seed=args.seed,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def resolve_model(args: argparse.Namespace, oracle_source: Corpus) -> PredictorPair:
    if args.model == "oracle":
        for name, rate in (("--flip-sent", args.flip_sent), ("--flip-word", args.flip_word)):
            if not 0.0 <= rate <= 1.0:
                raise UsageError(f"{name} must lie in [0, 1]")
        return oracle_predictor(oracle_source, args.flip_sent, args.flip_word, args.seed)
    if args.model.startswith("logits:"):
        return load_external_logits(args.model[len("logits:") :])
    return NgramModel.load(args.model).as_pair()


def _print_counts(corpus: Corpus) -> None:
    counts = token_counts(corpus)
    print(f"{'tokens':>10} {'letters':>10} {'marked':>10}")
    print(f"{counts.tokens:>10} {counts.letters:>10} {counts.marked_letters:>10}")


def cmd_clean(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.input, strict=args.strict)
    save_corpus(corpus, args.output)
    _print_counts(corpus)
    if corpus.warning_count:
        print(f"warnings: {corpus.warning_count} mark(s) dropped", file=sys.stderr)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    if args.alpha <= 0:
        raise UsageError("--alpha must be > 0")
    if not 0.0 <= args.lambda_weight <= 1.0:
        raise UsageError("--lambda must lie in [0, 1]")
    corpus = load_corpus(args.corpus, strict=args.strict)
    model = train_ngram(corpus, args.alpha, args.lambda_weight)
    model.save(args.output)
    print(
        f"unigram forms: {len(model.unigrams)}  "
        f"bigram contexts: {len(model.bigrams)}  "
        f"letter contexts: {len(model.letter_counts)}"
    )
    return 0


def _parse_lines(text: str, strict: bool) -> list[Sentence]:
    sentences = []
    for ln, line in enumerate(text.split("\n"), start=1):
        try:
            sentences.append(parse_marked_text(line, strict=strict))
        except OrthographyError as e:
            raise type(e)(f"<stdin>: line {ln}: {e}") from None
    return sentences


def cmd_diacritize(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    text = sys.stdin.read()
    trailing_newline = text.endswith("\n")
    if trailing_newline:
        text = text[:-1]
    sentences = _parse_lines(text, args.strict)
    pair = resolve_model(args, Corpus(tuple(sentences), "<stdin>", 0))
    out = [
        diacritize_sentence(s, pair, cfg, sentence_index=i)
        for i, s in enumerate(sentences)
    ]
    sys.stdout.write("\n".join(out) + ("\n" if trailing_newline else ""))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    corpus = load_corpus(args.test, strict=args.strict)
    pair = resolve_model(args, corpus)
    if args.name:
        name = args.name
    else:
        mode = f"soft>{args.theta:g}" if cfg.mode == "soft" else cfg.mode
        name = f"{args.model}[{cfg.inference},{mode}]"
    rep = report(corpus, [(name, pair, cfg)])
    sys.stdout.write(to_tsv(rep) if args.report == "tsv" else to_json(rep))
    for note in report_warnings(rep):
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_logits_check(args: argparse.Namespace) -> int:
    pair = load_external_logits(args.file)
    sent, word = pair.sent.table, pair.word.table
    sentence_ids = {k[0] for k in sent} | {k[0] for k in word}
    print(
        f"sent records: {len(sent)}  word records: {len(word)}  "
        f"sentences: {len(sentence_ids)}"
    )
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage; remap (2 is reserved for data errors)
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except MissingPosition as e:
        print(f"model/position mismatch: {e}", file=sys.stderr)
        return 3
    except (OrthographyError, FormatError, EmptyCorpus, EmptyScope, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
