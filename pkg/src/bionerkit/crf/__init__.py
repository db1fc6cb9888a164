"""Linear-chain CRF tagger: text processing, features, BIO encoding,
inference, and training."""

from .bio import (
    BIO_TAGS,
    EncodingReport,
    O_TAG,
    bio_to_spans,
    parse_tag,
    resolve_overlaps,
    spans_to_bio,
    tag_index,
)
from .features import sentence_features, token_features
from .model import (
    CrfModel,
    ModelFormatError,
    TrainConfig,
    TrainingDivergedError,
    TrainingSequence,
    build_training_sequences,
    load_model,
    log_backward,
    log_forward,
    log_likelihood_and_gradient,
    marginals,
    model_to_json,
    parse_model,
    path_score,
    predict_spans,
    save_model,
    train,
    train_sequences,
    viterbi_decode,
)
from .text import (
    DEFAULT_TAGGER,
    PosTagger,
    RulePosTagger,
    Token,
    pos_tag,
    sentence_tokens,
    split_sentences,
    tokenize,
)

__all__ = [
    "BIO_TAGS",
    "O_TAG",
    "CrfModel",
    "DEFAULT_TAGGER",
    "EncodingReport",
    "ModelFormatError",
    "PosTagger",
    "RulePosTagger",
    "Token",
    "TrainConfig",
    "TrainingDivergedError",
    "TrainingSequence",
    "bio_to_spans",
    "build_training_sequences",
    "load_model",
    "log_backward",
    "log_forward",
    "log_likelihood_and_gradient",
    "marginals",
    "model_to_json",
    "parse_model",
    "parse_tag",
    "path_score",
    "pos_tag",
    "predict_spans",
    "resolve_overlaps",
    "save_model",
    "sentence_features",
    "sentence_tokens",
    "spans_to_bio",
    "split_sentences",
    "tag_index",
    "token_features",
    "tokenize",
    "train",
    "train_sequences",
    "viterbi_decode",
]
