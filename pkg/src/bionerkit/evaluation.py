"""Exact-match scoring of predicted mentions against gold annotations.

A prediction is a true positive only when some gold mention in the same
document and field has the identical half-open span and the identical
label. Matching is one-to-one: duplicate predictions beyond the gold
multiplicity count as false positives, so tp never exceeds the gold
count.

Micro scores pool tp/fp/fn over all documents and labels; macro scores
are the unweighted mean of the 13 per-label score triples (so macro F1
is the mean of per-label F1s, not the harmonic mean of macro P and R).
Zero denominators score 0 by convention. Both conventions, plus the
policy for labels absent from gold and predictions, are echoed in the
report because they materially move macro numbers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

from .corpus import LABELS, AnnotatedDocument, EntityLabel, EntityMention
from .io import CorpusFile


class EvaluationError(ValueError):
    """Gold and predictions do not line up (doc ids, coordinate space)."""


class MacroPolicy(str, Enum):
    """What to do with labels that have no gold and no predicted
    mentions: average them in as zeros, or leave them out."""

    ALL_13 = "all_13"
    PRESENT_ONLY = "present_only"


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("negative match counts")

    def __add__(self, other: MatchCounts) -> MatchCounts:
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def gold_total(self) -> int:
        return self.tp + self.fn

    @property
    def predicted_total(self) -> int:
        return self.tp + self.fp

    @property
    def empty(self) -> bool:
        return self.tp == self.fp == self.fn == 0


@dataclass(frozen=True)
class PrfScores:
    precision: float
    recall: float
    f1: float


def micro_scores(counts: MatchCounts) -> PrfScores:
    """Precision, recall, F1 from pooled counts; 0/0 scores 0."""
    p = counts.tp / counts.predicted_total if counts.predicted_total else 0.0
    r = counts.tp / counts.gold_total if counts.gold_total else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return PrfScores(p, r, f1)


def macro_scores(
    per_label: Mapping[EntityLabel, MatchCounts],
    policy: MacroPolicy = MacroPolicy.ALL_13,
) -> PrfScores:
    """Unweighted mean of per-label score triples.

    Requires an entry for every label (zero counts allowed). Under
    PRESENT_ONLY, labels with tp=fp=fn=0 are excluded from the mean.
    """
    missing = [lab.value for lab in LABELS if lab not in per_label]
    if missing:
        raise EvaluationError(f"per-label counts missing labels: {missing}")
    included = [
        micro_scores(per_label[lab])
        for lab in LABELS
        if policy is MacroPolicy.ALL_13 or not per_label[lab].empty
    ]
    if not included:
        return PrfScores(0.0, 0.0, 0.0)
    n = len(included)
    return PrfScores(
        sum(s.precision for s in included) / n,
        sum(s.recall for s in included) / n,
        sum(s.f1 for s in included) / n,
    )


def _match_key(m: EntityMention) -> tuple[str, int, int, EntityLabel]:
    # The field tag is part of span identity: in per-field space, title
    # and abstract offsets overlap numerically. In combined space the
    # tag is derived from the offsets, so including it changes nothing.
    return (m.location.value, m.start_idx, m.end_idx, m.label)


@dataclass(frozen=True)
class MatchResult:
    tp_pairs: tuple[tuple[EntityMention, EntityMention], ...]
    fp_mentions: tuple[EntityMention, ...]
    fn_mentions: tuple[EntityMention, ...]

    @property
    def counts(self) -> MatchCounts:
        return MatchCounts(len(self.tp_pairs), len(self.fp_mentions), len(self.fn_mentions))


def match_entities(gold: AnnotatedDocument, pred: AnnotatedDocument) -> MatchResult:
    """One-to-one exact matching within a single document."""
    if gold.doc_id != pred.doc_id:
        raise EvaluationError(f"doc_id mismatch: {gold.doc_id!r} vs {pred.doc_id!r}")
    if gold.coordinate_space is not pred.coordinate_space:
        raise EvaluationError(
            f"coordinate-space mismatch on doc {gold.doc_id}:"
            f" {gold.coordinate_space.value} vs {pred.coordinate_space.value}"
        )
    remaining: dict[tuple, list[EntityMention]] = {}
    for g in gold.mentions:
        remaining.setdefault(_match_key(g), []).append(g)
    tp_pairs = []
    fps = []
    for p in pred.mentions:
        bucket = remaining.get(_match_key(p))
        if bucket:
            tp_pairs.append((bucket.pop(0), p))
        else:
            fps.append(p)
    fns = [g for bucket in remaining.values() for g in bucket]
    fns.sort(key=lambda m: (m.location.value, m.start_idx, m.end_idx, m.label.value))
    return MatchResult(tuple(tp_pairs), tuple(fps), tuple(fns))


@dataclass(frozen=True)
class LabelEval:
    counts: MatchCounts
    scores: PrfScores


@dataclass(frozen=True)
class EvalReport:
    per_label: dict[EntityLabel, LabelEval]
    micro_counts: MatchCounts
    micro: PrfScores
    macro: PrfScores
    document_count: int
    macro_policy: MacroPolicy


def evaluate_corpus(
    gold: CorpusFile,
    pred: CorpusFile,
    policy: MacroPolicy = MacroPolicy.ALL_13,
) -> EvalReport:
    """Corpus-level pooled scoring.

    Every predicted doc_id must exist in gold; gold documents without
    predictions contribute false negatives. Counts are pooled over
    documents (never averaged per document).
    """
    if gold.coordinate_space is not pred.coordinate_space:
        raise EvaluationError(
            "corpora are in different coordinate spaces:"
            f" {gold.coordinate_space.value} vs {pred.coordinate_space.value}"
        )
    unknown = sorted(set(pred.documents) - set(gold.documents))
    if unknown:
        raise EvaluationError(f"predictions for doc_ids not in gold: {unknown}")

    per_label: dict[EntityLabel, MatchCounts] = {lab: MatchCounts() for lab in LABELS}
    empty_mentions: tuple[EntityMention, ...] = ()
    for doc_id, gold_doc in gold.documents.items():
        pred_doc = pred.documents.get(doc_id)
        if pred_doc is None:
            pred_doc = AnnotatedDocument(
                gold_doc.document, empty_mentions, gold_doc.coordinate_space
            )
        result = match_entities(gold_doc, pred_doc)
        label_counter: Counter[tuple[EntityLabel, str]] = Counter()
        for g, _ in result.tp_pairs:
            label_counter[(g.label, "tp")] += 1
        for m in result.fp_mentions:
            label_counter[(m.label, "fp")] += 1
        for m in result.fn_mentions:
            label_counter[(m.label, "fn")] += 1
        for lab in LABELS:
            delta = MatchCounts(
                label_counter.get((lab, "tp"), 0),
                label_counter.get((lab, "fp"), 0),
                label_counter.get((lab, "fn"), 0),
            )
            if not delta.empty:
                per_label[lab] = per_label[lab] + delta

    micro_counts = MatchCounts()
    for counts in per_label.values():
        micro_counts = micro_counts + counts
    return EvalReport(
        per_label={lab: LabelEval(c, micro_scores(c)) for lab, c in per_label.items()},
        micro_counts=micro_counts,
        micro=micro_scores(micro_counts),
        macro=macro_scores(per_label, policy),
        document_count=len(gold.documents),
        macro_policy=policy,
    )


def invert_micro_counts(precision: float, recall: float, gold_total: int) -> MatchCounts:
    """Recover integer tp/fp/fn from rounded micro precision/recall and
    a known gold mention total.

    tp = round(recall * gold_total); the predicted total is the nearest
    integer to tp / precision. Exact when the published rounding kept
    enough digits to pin the integers, which a 4-decimal report does at
    these corpus sizes.
    """
    if not (0 < precision <= 1 and 0 < recall <= 1):
        raise ValueError("precision and recall must be in (0, 1]")
    tp = round(recall * gold_total)
    predicted_total = round(tp / precision)
    return MatchCounts(tp, predicted_total - tp, gold_total - tp)


def format_report(report: EvalReport) -> str:
    """Fixed-width table, one row per label plus micro/macro footers;
    scores to 4 decimal places."""
    name_width = max(len(lab.value) for lab in LABELS)
    name_width = max(name_width, len("micro"), len(f"macro[{report.macro_policy.value}]"))
    header = (
        f"{'label':<{name_width}}  {'gold':>6}  {'pred':>6}  {'tp':>6}  {'fp':>6}  {'fn':>6}"
        f"  {'precision':>9}  {'recall':>9}  {'f1':>9}"
    )
    lines = [header]
    for lab in LABELS:
        ev = report.per_label[lab]
        c, s = ev.counts, ev.scores
        lines.append(
            f"{lab.value:<{name_width}}  {c.gold_total:>6}  {c.predicted_total:>6}"
            f"  {c.tp:>6}  {c.fp:>6}  {c.fn:>6}"
            f"  {s.precision:>9.4f}  {s.recall:>9.4f}  {s.f1:>9.4f}"
        )
    c, s = report.micro_counts, report.micro
    lines.append(
        f"{'micro':<{name_width}}  {c.gold_total:>6}  {c.predicted_total:>6}"
        f"  {c.tp:>6}  {c.fp:>6}  {c.fn:>6}"
        f"  {s.precision:>9.4f}  {s.recall:>9.4f}  {s.f1:>9.4f}"
    )
    m = report.macro
    macro_name = f"macro[{report.macro_policy.value}]"
    pad = " " * (6 + 2) * 5
    lines.append(
        f"{macro_name:<{name_width}}{pad}"
        f"  {m.precision:>9.4f}  {m.recall:>9.4f}  {m.f1:>9.4f}"
    )
    return "\n".join(lines)


def _scores_json(counts: MatchCounts | None, scores: PrfScores) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if counts is not None:
        out.update(tp=counts.tp, fp=counts.fp, fn=counts.fn)
    out.update(
        precision=round(scores.precision, 4),
        recall=round(scores.recall, 4),
        f1=round(scores.f1, 4),
    )
    return out


def report_to_json(report: EvalReport) -> dict[str, Any]:
    """Machine-readable form with the same numbers as the table."""
    return {
        "document_count": report.document_count,
        "macro_policy": report.macro_policy.value,
        "per_label": {
            lab.value: _scores_json(ev.counts, ev.scores)
            for lab, ev in report.per_label.items()
        },
        "micro": _scores_json(report.micro_counts, report.micro),
        "macro": _scores_json(None, report.macro),
    }
