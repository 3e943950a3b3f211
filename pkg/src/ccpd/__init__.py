"""Context-contrastive partial diacritization of Arabic text.

Apply any per-letter diacritic predictor twice per sentence, with and without
word context, mark only the letters where the two applications diverge, and
measure the result with a battery of selection and error-rate indicators.
"""

from .orthography import (
    CharClass,
    ConflictingMarks,
    DanglingDiacritic,
    Label,
    MarkedLetter,
    MaskLengthMismatch,
    OrthographyError,
    Sentence,
    Word,
    canonicalize,
    classify_codepoint,
    clean_text,
    parse_marked_text,
    render,
    strip,
)
from .corpus import (
    Corpus,
    TokenCounts,
    WindowSpec,
    load_corpus,
    save_corpus,
    segment,
    token_counts,
)
from .predictor import (
    EmptyCorpus,
    FormatError,
    MissingPosition,
    NgramModel,
    PredictionGrid,
    PredictorPair,
    ShapeMismatch,
    TruthHint,
    apply_contextual,
    apply_isolated,
    load_external_logits,
    oracle_predictor,
    stack_grids,
    train_ngram,
)
from .voting import VoteTally, collect_votes, mv_infer, resolve_votes, sp_infer
from .selection import (
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
from .indicators import (
    EmptyScope,
    EvalScope,
    IndicatorReport,
    IndicatorRow,
    LetterLayout,
    MetricValue,
    SR_BAND,
    b_der,
    der,
    h_der,
    p_der,
    r_der,
    redri,
    report,
    report_warnings,
    sr,
    sr_in_plausible_band,
    to_json,
    to_tsv,
    wer,
)
from .synthetic import SyntheticCorpus, make_synthetic_corpus

__version__ = "0.1.0"

__all__ = [
    "CharClass",
    "ConflictingMarks",
    "DanglingDiacritic",
    "Label",
    "MarkedLetter",
    "MaskLengthMismatch",
    "OrthographyError",
    "Sentence",
    "Word",
    "canonicalize",
    "classify_codepoint",
    "clean_text",
    "parse_marked_text",
    "render",
    "strip",
    "Corpus",
    "TokenCounts",
    "WindowSpec",
    "load_corpus",
    "save_corpus",
    "segment",
    "token_counts",
    "EmptyCorpus",
    "FormatError",
    "MissingPosition",
    "NgramModel",
    "PredictionGrid",
    "PredictorPair",
    "ShapeMismatch",
    "TruthHint",
    "apply_contextual",
    "apply_isolated",
    "load_external_logits",
    "oracle_predictor",
    "stack_grids",
    "train_ngram",
    "VoteTally",
    "collect_votes",
    "mv_infer",
    "resolve_votes",
    "sp_infer",
    "CcpdConfig",
    "SelectionMask",
    "build_grid",
    "ccpd_assign",
    "full_mask",
    "make_mask",
    "mark_hard",
    "mark_soft",
    "partial_diacritize",
    "EmptyScope",
    "EvalScope",
    "IndicatorReport",
    "IndicatorRow",
    "LetterLayout",
    "MetricValue",
    "SR_BAND",
    "b_der",
    "der",
    "h_der",
    "p_der",
    "r_der",
    "redri",
    "report",
    "report_warnings",
    "sr",
    "sr_in_plausible_band",
    "to_json",
    "to_tsv",
    "wer",
    "SyntheticCorpus",
    "make_synthetic_corpus",
]
