"""Biomedical entity-mention toolkit: corpus model with per-field and
combined coordinate spaces, dictionary-based prediction post-processing,
exact-match micro/macro scoring, and a from-scratch linear-chain CRF
tagger."""

from .corpus import (
    LABELS,
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    LabelError,
    Location,
    OffsetError,
    Violation,
    assign_tag,
    combine_text,
    to_combined_document,
    to_combined_offsets,
    to_local_offsets,
    to_per_field_document,
    validate_document,
)
from .evaluation import (
    EvalReport,
    EvaluationError,
    MacroPolicy,
    MatchCounts,
    PrfScores,
    evaluate_corpus,
    invert_micro_counts,
    macro_scores,
    match_entities,
    micro_scores,
)
from .io import (
    CorpusFile,
    CorpusFormatError,
    LabelCountReport,
    Provenance,
    label_counts,
    parse_corpus,
    parse_lexicon,
    read_corpus,
    read_lexicon,
    save_corpus,
    write_corpus,
    write_predictions,
)
from .postprocess import (
    Lexicon,
    LexiconSet,
    MergeConfig,
    PipelineConfigError,
    PipelineResult,
    ProvenanceError,
    ReplayError,
    RulePipeline,
    TraceEntry,
    default_lexicon_set,
    is_trivial,
    lexicon_correct,
    merge_adjacent_mentions,
    parse_trace,
    replay_trace,
    run_pipeline,
    strip_scores,
    write_trace,
)

__version__ = "0.1.0"
