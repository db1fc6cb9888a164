"""Linear-chain CRF: inference, training, and model persistence.

The model scores a tag sequence y for a sentence x as

    score(y|x) = sum_t  W[f, y_t]  (f over active features at t)
               + sum_t  T[y_{t-1}, y_t]

with p(y|x) = exp(score) / Z(x). There are no dedicated start/stop
transitions; BOS/EOS are ordinary emission features. All inference runs
in log space with log-sum-exp, so no probability ever underflows.

Training maximizes sum_i log p(y_i|x_i) - (l2/2)||w||^2 by full-batch
adaptive gradient ascent with backtracking, which keeps the objective
non-decreasing across accepted steps and makes runs bit-reproducible:
no shuffling, no random init, no data-dependent thread order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from ..corpus import AnnotatedDocument, CoordinateSpace, Document, combine_text, to_combined_document
from .bio import BIO_TAGS, EncodingReport, bio_to_spans, spans_to_bio, tag_index
from .features import sentence_features
from .text import PosTagger, sentence_tokens

MODEL_FORMAT = "bionerkit-crf"
MODEL_VERSION = 1


class TrainingDivergedError(RuntimeError):
    """Objective became non-finite during training."""


class ModelFormatError(ValueError):
    """Model file is not something this code can load."""


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters; defaults suit small corpora.

    The optimizer is deterministic (full batch, zero init), so the seed
    changes nothing; it is recorded in model metadata for provenance.
    """

    l2_strength: float = 1.0
    max_iterations: int = 100
    tolerance: float = 1e-4
    learning_rate: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.l2_strength < 0:
            raise ValueError("l2_strength must be >= 0")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1 or self.learning_rate <= 0:
            raise ValueError("max_iterations and learning_rate must be positive")


# -- inference on raw score matrices ---------------------------------------
#
# emissions: (T, L) per-position label scores; transitions: (L, L) with
# [i, j] scoring label i followed by label j.


def log_forward(emissions: np.ndarray, transitions: np.ndarray) -> tuple[np.ndarray, float]:
    """Forward recursion; returns (alpha, logZ). alpha[t, j] is the
    log-sum over all length-t+1 prefixes ending in label j."""
    T = emissions.shape[0]
    alpha = np.empty_like(emissions)
    alpha[0] = emissions[0]
    for t in range(1, T):
        alpha[t] = emissions[t] + logsumexp(alpha[t - 1][:, None] + transitions, axis=0)
    return alpha, float(logsumexp(alpha[-1]))


def log_backward(emissions: np.ndarray, transitions: np.ndarray) -> tuple[np.ndarray, float]:
    """Backward recursion; returns (beta, logZ). beta[t, i] is the
    log-sum over all suffixes after position t given label i there."""
    T = emissions.shape[0]
    beta = np.zeros_like(emissions)
    for t in range(T - 2, -1, -1):
        beta[t] = logsumexp(transitions + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta, float(logsumexp(emissions[0] + beta[0]))


def marginals(
    emissions: np.ndarray, transitions: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Posterior node marginals (T, L), edge marginals (T-1, L, L), and
    logZ, from one forward and one backward pass."""
    T = emissions.shape[0]
    alpha, log_z = log_forward(emissions, transitions)
    beta, _ = log_backward(emissions, transitions)
    node = np.exp(alpha + beta - log_z)
    edge = np.empty((max(T - 1, 0), emissions.shape[1], emissions.shape[1]))
    for t in range(T - 1):
        edge[t] = np.exp(
            alpha[t][:, None]
            + transitions
            + (emissions[t + 1] + beta[t + 1])[None, :]
            - log_z
        )
    return node, edge, log_z


def viterbi_decode(emissions: np.ndarray, transitions: np.ndarray) -> list[int]:
    """Highest-scoring label path; ties broken toward the lowest label
    index (np.argmax returns the first maximum)."""
    T = emissions.shape[0]
    delta = emissions[0].copy()
    back = np.empty((T, emissions.shape[1]), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + transitions
        back[t] = np.argmax(cand, axis=0)
        delta = emissions[t] + np.take_along_axis(cand, back[t][None, :], axis=0)[0]
    path = [int(np.argmax(delta))]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return path


def path_score(emissions: np.ndarray, transitions: np.ndarray, path: Sequence[int]) -> float:
    y = np.asarray(path)
    score = float(emissions[np.arange(len(y)), y].sum())
    if len(y) > 1:
        score += float(transitions[y[:-1], y[1:]].sum())
    return score


# -- the model --------------------------------------------------------------


@dataclass(eq=False)
class CrfModel:
    """Frozen feature index plus weights. labels is the BIO tag list in
    index order; emission_weights is (features, labels), transition_weights
    (labels, labels)."""

    labels: tuple[str, ...]
    feature_index: dict[str, int]
    emission_weights: np.ndarray
    transition_weights: np.ndarray
    meta: dict[str, object]

    def __post_init__(self) -> None:
        n_feat, n_lab = self.emission_weights.shape
        if n_lab != len(self.labels) or n_feat != len(self.feature_index):
            raise ValueError("weight dimensions disagree with label/feature counts")
        if self.transition_weights.shape != (n_lab, n_lab):
            raise ValueError("transition matrix shape disagrees with label count")
        if not (
            np.all(np.isfinite(self.emission_weights))
            and np.all(np.isfinite(self.transition_weights))
        ):
            raise ValueError("non-finite weights")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrfModel):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.feature_index == other.feature_index
            and np.array_equal(self.emission_weights, other.emission_weights)
            and np.array_equal(self.transition_weights, other.transition_weights)
            and self.meta == other.meta
        )

    def encode(self, feats: Sequence[Sequence[str]]) -> list[np.ndarray]:
        """Map feature strings to index arrays; unseen features are
        dropped (the standard frozen-index contract)."""
        return [
            np.array(
                [self.feature_index[f] for f in row if f in self.feature_index],
                dtype=np.int64,
            )
            for row in feats
        ]

    def emissions(self, encoded: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros((len(encoded), len(self.labels)))
        for t, ids in enumerate(encoded):
            if len(ids):
                out[t] = self.emission_weights[ids].sum(axis=0)
        return out


# -- training ---------------------------------------------------------------


@dataclass(frozen=True)
class TrainingSequence:
    feature_ids: tuple[np.ndarray, ...]
    gold: np.ndarray  # label indices, shape (T,)


def build_training_sequences(
    corpus_docs: Iterable[AnnotatedDocument],
    joiner: str = "",
    tagger: PosTagger | None = None,
) -> tuple[list[TrainingSequence], dict[str, int], EncodingReport]:
    """Turn annotated documents into encoded sentences, growing the
    feature index as features are first seen (insertion order makes the
    index, and therefore training, deterministic)."""
    feature_index: dict[str, int] = {}
    sequences: list[TrainingSequence] = []
    dropped: list = []
    clipped: list = []
    unaligned: list = []
    for doc in corpus_docs:
        cdoc = to_combined_document(doc, joiner)
        combined, _, _ = combine_text(doc.document, joiner)
        for toks in sentence_tokens(combined, tagger):
            s, e = toks[0].start_idx, toks[-1].end_idx
            in_sentence = [m for m in cdoc.mentions if m.start_idx < e and s < m.end_idx]
            tags, report = spans_to_bio(in_sentence, toks)
            dropped += report.dropped_overlaps
            clipped += report.clipped
            unaligned += report.unaligned
            rows = []
            for feats in sentence_features(toks):
                ids = [feature_index.setdefault(f, len(feature_index)) for f in feats]
                rows.append(np.array(ids, dtype=np.int64))
            gold = np.array([tag_index(t) for t in tags], dtype=np.int64)
            sequences.append(TrainingSequence(tuple(rows), gold))
    report = EncodingReport(tuple(dropped), tuple(clipped), tuple(unaligned))
    return sequences, feature_index, report


def _emissions_from(weights: np.ndarray, seq: TrainingSequence) -> np.ndarray:
    out = np.zeros((len(seq.feature_ids), weights.shape[1]))
    for t, ids in enumerate(seq.feature_ids):
        if len(ids):
            out[t] = weights[ids].sum(axis=0)
    return out


def log_likelihood_and_gradient(
    emission_w: np.ndarray,
    transition_w: np.ndarray,
    batch: Sequence[TrainingSequence],
    l2_strength: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """L2-penalized conditional log-likelihood and its gradient.

    gradient = empirical feature counts - expected counts - l2 * w.
    Raises TrainingDivergedError on any non-finite intermediate.
    """
    value = 0.0
    grad_w = np.zeros_like(emission_w)
    grad_t = np.zeros_like(transition_w)
    for seq in batch:
        emissions = _emissions_from(emission_w, seq)
        node, edge, log_z = marginals(emissions, transition_w)
        y = seq.gold
        gold_score = path_score(emissions, transition_w, y)
        value += gold_score - log_z
        for t, ids in enumerate(seq.feature_ids):
            if len(ids):
                grad_w[ids, y[t]] += 1.0
                grad_w[ids] -= node[t]
        if len(y) > 1:
            np.add.at(grad_t, (y[:-1], y[1:]), 1.0)
            grad_t -= edge.sum(axis=0)
    if l2_strength:
        value -= 0.5 * l2_strength * (
            float(np.sum(emission_w**2)) + float(np.sum(transition_w**2))
        )
        grad_w -= l2_strength * emission_w
        grad_t -= l2_strength * transition_w
    if not np.isfinite(value):
        raise TrainingDivergedError(f"objective is {value}")
    return value, grad_w, grad_t


def train_sequences(
    sequences: Sequence[TrainingSequence],
    feature_index: dict[str, int],
    config: TrainConfig = TrainConfig(),
) -> CrfModel:
    """Fit weights on pre-encoded sentences (see ``train`` for the
    document-level entry point)."""
    if not sequences:
        raise ValueError("empty training set: no sentences to train on")
    n_labels = len(BIO_TAGS)
    W = np.zeros((len(feature_index), n_labels))
    T = np.zeros((n_labels, n_labels))
    acc_w = np.zeros_like(W)
    acc_t = np.zeros_like(T)
    eps = 1e-8

    value, grad_w, grad_t = log_likelihood_and_gradient(W, T, sequences, config.l2_strength)
    iterations = 0
    converged = False
    for _ in range(config.max_iterations):
        grad_norm = max(
            float(np.max(np.abs(grad_w))) if grad_w.size else 0.0,
            float(np.max(np.abs(grad_t))),
        )
        if grad_norm <= config.tolerance:
            converged = True
            break
        # Backtracking on the Adagrad-scaled step: halve until the
        # objective does not decrease, so accepted steps are monotone.
        scale = config.learning_rate
        accepted = False
        while scale >= 1e-12:
            step_w = scale * grad_w / np.sqrt(acc_w + grad_w**2 + eps)
            step_t = scale * grad_t / np.sqrt(acc_t + grad_t**2 + eps)
            try:
                new_value, new_gw, new_gt = log_likelihood_and_gradient(
                    W + step_w, T + step_t, sequences, config.l2_strength
                )
            except TrainingDivergedError:
                scale *= 0.5
                continue
            if new_value >= value:
                acc_w += grad_w**2
                acc_t += grad_t**2
                W = W + step_w
                T = T + step_t
                value, grad_w, grad_t = new_value, new_gw, new_gt
                accepted = True
                break
            scale *= 0.5
        iterations += 1
        if not accepted:
            # No step improves the objective: numerically at an optimum.
            converged = True
            break

    meta = {
        "l2_strength": config.l2_strength,
        "iterations": iterations,
        "converged": converged,
        "objective": value,
        "seed": config.seed,
        "sentences": len(sequences),
    }
    return CrfModel(BIO_TAGS, dict(feature_index), W, T, meta)


def train(
    corpus_docs: Iterable[AnnotatedDocument],
    config: TrainConfig = TrainConfig(),
    *,
    joiner: str = "",
    tagger: PosTagger | None = None,
) -> CrfModel:
    """Train on annotated documents; deterministic for fixed inputs."""
    sequences, feature_index, _ = build_training_sequences(corpus_docs, joiner, tagger)
    return train_sequences(sequences, feature_index, config)


def predict_spans(
    model: CrfModel,
    doc: Document,
    *,
    joiner: str = "",
    tagger: PosTagger | None = None,
) -> AnnotatedDocument:
    """Tag one document; mentions come back in combined space, in
    reading order, without scores."""
    combined, title_len, _ = combine_text(doc, joiner)
    mentions = []
    for toks in sentence_tokens(combined, tagger):
        encoded = model.encode(sentence_features(toks))
        path = viterbi_decode(model.emissions(encoded), model.transition_weights)
        tags = [model.labels[i] for i in path]
        mentions.extend(bio_to_spans(toks, tags, combined, title_len))
    return AnnotatedDocument(doc, tuple(mentions), CoordinateSpace.COMBINED)


# -- persistence ------------------------------------------------------------


def model_to_json(model: CrfModel) -> dict[str, object]:
    features = [""] * len(model.feature_index)
    for name, idx in model.feature_index.items():
        features[idx] = name
    return {
        "format": MODEL_FORMAT,
        "format_version": MODEL_VERSION,
        "labels": list(model.labels),
        "features": features,
        "emission_weights": model.emission_weights.tolist(),
        "transition_weights": model.transition_weights.tolist(),
        "meta": model.meta,
    }


def save_model(model: CrfModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def parse_model(data: str | bytes) -> CrfModel:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or raw.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a CRF model file (missing format marker)")
    if raw.get("format_version") != MODEL_VERSION:
        raise ModelFormatError(
            f"model format version {raw.get('format_version')!r} is not supported"
            f" (this build reads version {MODEL_VERSION})"
        )
    features = raw["features"]
    return CrfModel(
        tuple(raw["labels"]),
        {name: i for i, name in enumerate(features)},
        np.array(raw["emission_weights"], dtype=np.float64).reshape(
            len(features), len(raw["labels"])
        ),
        np.array(raw["transition_weights"], dtype=np.float64),
        raw["meta"],
    )


def load_model(path: str) -> CrfModel:
    with open(path, "rb") as fh:
        return parse_model(fh.read())
