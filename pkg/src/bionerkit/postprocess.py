"""Dictionary-based correction of predicted entity mentions.

Rules, applied as an ordered pipeline over every mention of every
document:

* ``remove_trivial``: drop predictions whose text is just their own
  label name ("bacteria" labeled bacteria);
* ``lexicon_correct``: re-label whole-span, case-insensitive matches
  against curated term lists (e.g. chemical -> gene for "IL-6");
* ``merge_adjacent`` (off by default): fuse same-label fragments
  separated by whitespace/hyphen or a single connecting word;
* ``strip_scores``: remove model confidence scores;
* ``localize``: convert combined offsets to per-field offsets and
  assign 't'/'a' tags.

Every drop, relabel, and merge is recorded in a trace (one JSON object
per line) precise enough to replay: ``replay_trace`` applied to the
input reproduces the output exactly. Score stripping and localization
are deterministic finalization steps re-derived from the pipeline
configuration rather than traced per mention.

The default pipeline is idempotent with the shipped lexicons. That is a
property of the data too, not just the code: a term list that contains
a label name, or two lexicons routing a shared term in a cycle
(A->B then B->A), would break it, so loading warns about the former and
rejects ambiguous routing outright.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from .corpus import (
    AnnotatedDocument,
    CoordinateSpace,
    EntityLabel,
    EntityMention,
    LabelError,
    Location,
    combine_text,
    to_per_field_document,
)
from .io import CorpusFile, Provenance, read_lexicon
from .crf.text import DEFAULT_TAGGER, pos_tag, tokenize

logger = logging.getLogger(__name__)

RULE_REMOVE_TRIVIAL = "remove_trivial"
RULE_LEXICON_CORRECT = "lexicon_correct"
RULE_MERGE_ADJACENT = "merge_adjacent"
RULE_STRIP_SCORES = "strip_scores"
RULE_LOCALIZE = "localize"

KNOWN_RULES = (
    RULE_REMOVE_TRIVIAL,
    RULE_LEXICON_CORRECT,
    RULE_MERGE_ADJACENT,
    RULE_STRIP_SCORES,
    RULE_LOCALIZE,
)

DEFAULT_RULES = (
    RULE_REMOVE_TRIVIAL,
    RULE_LEXICON_CORRECT,
    RULE_STRIP_SCORES,
    RULE_LOCALIZE,
)


class PipelineConfigError(ValueError):
    """Bad pipeline configuration (unknown rule, unreadable lexicon,
    ambiguous routing, ...)."""


class ProvenanceError(ValueError):
    """Ground-truth corpus fed to the prediction pipeline."""


class ReplayError(ValueError):
    """Trace does not fit the corpus it is being replayed onto."""


def _normalize(text: str) -> str:
    # Label names use underscores where natural text has spaces.
    return re.sub(r"_+", " ", text.strip().lower())


def is_trivial(m: EntityMention) -> bool:
    """True when the span text is just the label's own name."""
    return _normalize(m.text_span) == _normalize(m.label.value)


@dataclass(frozen=True)
class Lexicon:
    """Lowercased term list routing source labels to a target label."""

    name: str
    terms: frozenset[str]
    target_label: EntityLabel
    source_labels: frozenset[EntityLabel]

    def __post_init__(self) -> None:
        if self.target_label in self.source_labels:
            raise PipelineConfigError(
                f"lexicon {self.name}: target {self.target_label.value} is also a source"
            )
        if not self.source_labels:
            raise PipelineConfigError(f"lexicon {self.name}: no source labels")
        for term in self.terms:
            if not term or term != term.lower():
                raise PipelineConfigError(f"lexicon {self.name}: bad term {term!r}")

    def corrects(self, m: EntityMention) -> bool:
        return m.label in self.source_labels and m.text_span.lower() in self.terms


@dataclass(frozen=True)
class LexiconSet:
    lexicons: tuple[Lexicon, ...]

    def __post_init__(self) -> None:
        routes: dict[tuple[str, EntityLabel], tuple[str, EntityLabel]] = {}
        label_names = {_normalize(lab.value) for lab in EntityLabel}
        for lex in self.lexicons:
            for term in lex.terms:
                if _normalize(term) in label_names:
                    logger.warning(
                        "lexicon %s: term %r is a label name; corrections can"
                        " create trivial mentions and break idempotence",
                        lex.name,
                        term,
                    )
                for source in lex.source_labels:
                    prior = routes.get((term, source))
                    if prior is not None and prior[1] is not lex.target_label:
                        raise PipelineConfigError(
                            f"ambiguous routing: {term!r} from {source.value} maps to"
                            f" {prior[1].value} (lexicon {prior[0]}) and"
                            f" {lex.target_label.value} (lexicon {lex.name})"
                        )
                    routes[(term, source)] = (lex.name, lex.target_label)

    def correct(self, m: EntityMention) -> EntityMention:
        """Return the mention, re-labeled by the first lexicon that
        claims it (at most one correction; load-time checks make the
        outcome order-independent)."""
        for lex in self.lexicons:
            if lex.corrects(m):
                return replace(m, label=lex.target_label)
        return m


def lexicon_correct(m: EntityMention, lexicons: LexiconSet) -> EntityMention:
    return lexicons.correct(m)


def load_lexicon(
    path: str | Path,
    target_label: EntityLabel,
    source_labels: Iterable[EntityLabel],
    name: str | None = None,
) -> Lexicon:
    try:
        terms = read_lexicon(str(path))
    except OSError as exc:
        raise PipelineConfigError(f"cannot read lexicon {path}: {exc}") from None
    return Lexicon(
        name or Path(path).stem, frozenset(terms), target_label, frozenset(source_labels)
    )


_SEED_LEXICONS: tuple[tuple[str, EntityLabel, tuple[EntityLabel, ...]], ...] = (
    ("known_genes", EntityLabel.GENE, (EntityLabel.CHEMICAL,)),
    ("known_chemicals", EntityLabel.CHEMICAL, (EntityLabel.GENE,)),
    ("known_food", EntityLabel.FOOD, (EntityLabel.DIETARY_SUPPLEMENT,)),
    (
        "known_dietary_supplements",
        EntityLabel.DIETARY_SUPPLEMENT,
        (EntityLabel.FOOD, EntityLabel.DRUG),
    ),
)


def default_lexicon_set() -> LexiconSet:
    """The shipped seed lexicons with their default routing."""
    from .io import parse_lexicon as _parse_terms

    lexicons = []
    for name, target, sources in _SEED_LEXICONS:
        data = resources.files("bionerkit").joinpath(f"data/{name}.txt").read_bytes()
        lexicons.append(Lexicon(name, frozenset(_parse_terms(data)), target, frozenset(sources)))
    return LexiconSet(tuple(lexicons))


@dataclass(frozen=True)
class MergeConfig:
    """Connecting coarse POS tags for merge_adjacent (the gap may also
    be pure whitespace/hyphen)."""

    connector_pos: tuple[str, ...] = ("IN", "CC", "DT")


@dataclass(frozen=True)
class TraceEntry:
    """One mention-level change: action is drop, relabel, or merge."""

    doc_id: str
    rule: str
    action: str
    tag: str
    start_idx: int
    end_idx: int
    text_span: str
    before_label: str
    after_label: str | None = None
    merged_from: tuple[tuple[int, int], ...] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "doc_id": self.doc_id,
            "rule": self.rule,
            "action": self.action,
            "tag": self.tag,
            "start_idx": self.start_idx,
            "end_idx": self.end_idx,
            "text_span": self.text_span,
            "before_label": self.before_label,
        }
        if self.after_label is not None:
            out["after_label"] = self.after_label
        if self.merged_from is not None:
            out["merged_from"] = [list(pair) for pair in self.merged_from]
        return out

    @classmethod
    def from_json(cls, raw: dict[str, Any]) -> TraceEntry:
        if raw.get("action") not in ("drop", "relabel", "merge"):
            raise ValueError(f"unknown trace action {raw.get('action')!r}")
        merged = raw.get("merged_from")
        return cls(
            raw["doc_id"],
            raw["rule"],
            raw["action"],
            raw["tag"],
            raw["start_idx"],
            raw["end_idx"],
            raw["text_span"],
            raw["before_label"],
            raw.get("after_label"),
            tuple((s, e) for s, e in merged) if merged is not None else None,
        )


def write_trace(trace: Sequence[TraceEntry]) -> bytes:
    lines = [json.dumps(e.to_json(), ensure_ascii=False) for e in trace]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def parse_trace(data: str | bytes) -> tuple[TraceEntry, ...]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return tuple(
        TraceEntry.from_json(json.loads(line)) for line in data.splitlines() if line.strip()
    )


@dataclass(frozen=True)
class RulePipeline:
    """Ordered rule list plus everything the rules need.

    joiner=None means "use the corpus's own joiner"; a non-None value
    must agree with the corpus, since reinterpreting combined offsets
    under a different joiner would silently corrupt every span.
    """

    rules: tuple[str, ...] = DEFAULT_RULES
    lexicons: LexiconSet | None = None
    merge: MergeConfig = MergeConfig()
    joiner: str | None = None

    def __post_init__(self) -> None:
        seen = set()
        for rule in self.rules:
            if rule not in KNOWN_RULES:
                raise PipelineConfigError(f"unknown rule {rule!r}")
            if rule in seen:
                raise PipelineConfigError(f"duplicate rule {rule!r}")
            seen.add(rule)
        if RULE_LEXICON_CORRECT in self.rules and self.lexicons is None:
            object.__setattr__(self, "lexicons", default_lexicon_set())

    @classmethod
    def default(cls, enable_merge: bool = False) -> RulePipeline:
        return cls(rules=_with_merge(DEFAULT_RULES, enable_merge))

    @classmethod
    def from_config(
        cls, config: dict[str, Any], base_dir: str | Path = ".", enable_merge: bool = False
    ) -> RulePipeline:
        """Build from a parsed configuration object.

        Shape: {"rules": [...], "joiner": str|null, "merge":
        {"connector_pos": [...]}, "lexicons": [{"name", "path",
        "target_label", "source_labels"}, ...]}; every key optional;
        lexicon paths resolve relative to base_dir.
        """
        unknown = set(config) - {"rules", "joiner", "merge", "lexicons"}
        if unknown:
            raise PipelineConfigError(f"unknown pipeline config keys {sorted(unknown)}")
        rules = tuple(config.get("rules", DEFAULT_RULES))
        rules = _with_merge(rules, enable_merge)
        joiner = config.get("joiner")
        if joiner is not None and not isinstance(joiner, str):
            raise PipelineConfigError("joiner must be a string")
        merge_cfg = MergeConfig()
        if "merge" in config:
            raw_merge = config["merge"]
            if not isinstance(raw_merge, dict) or set(raw_merge) - {"connector_pos"}:
                raise PipelineConfigError("merge config supports only connector_pos")
            merge_cfg = MergeConfig(tuple(raw_merge.get("connector_pos", ("IN", "CC", "DT"))))
        lexicons = None
        if "lexicons" in config:
            loaded = []
            for i, raw in enumerate(config["lexicons"]):
                try:
                    target = EntityLabel.parse(raw["target_label"])
                    sources = [EntityLabel.parse(s) for s in raw["source_labels"]]
                    path = Path(base_dir) / raw["path"]
                except (KeyError, TypeError) as exc:
                    raise PipelineConfigError(f"lexicon #{i}: bad entry ({exc})") from None
                except LabelError as exc:
                    raise PipelineConfigError(f"lexicon #{i}: {exc}") from None
                loaded.append(load_lexicon(path, target, sources, raw.get("name")))
            lexicons = LexiconSet(tuple(loaded))
        return cls(rules=rules, lexicons=lexicons, merge=merge_cfg, joiner=joiner)


def _with_merge(rules: tuple[str, ...], enable_merge: bool) -> tuple[str, ...]:
    if not enable_merge or RULE_MERGE_ADJACENT in rules:
        return tuple(rules)
    out = list(rules)
    # After label corrections, before finalization.
    anchor = RULE_STRIP_SCORES if RULE_STRIP_SCORES in out else RULE_LOCALIZE
    idx = out.index(anchor) if anchor in out else len(out)
    out.insert(idx, RULE_MERGE_ADJACENT)
    return tuple(out)


@dataclass(frozen=True)
class PipelineResult:
    corpus: CorpusFile
    trace: tuple[TraceEntry, ...]


def strip_scores(doc: AnnotatedDocument) -> AnnotatedDocument:
    if all(m.score is None for m in doc.mentions):
        return doc
    return replace(
        doc, mentions=tuple(replace(m, score=None) for m in doc.mentions)
    )


def _entry(doc_id: str, rule: str, action: str, m: EntityMention, **kw: Any) -> TraceEntry:
    return TraceEntry(
        doc_id,
        rule,
        action,
        m.location.value,
        m.start_idx,
        m.end_idx,
        m.text_span,
        m.label.value,
        **kw,
    )


def _gap_is_connector(gap: str, config: MergeConfig) -> bool:
    if all(ch.isspace() or ch == "-" for ch in gap):
        return True
    toks = pos_tag(tokenize(gap.strip()), DEFAULT_TAGGER)
    return len(toks) == 1 and str(toks[0].pos)[:2] in config.connector_pos


def merge_adjacent_mentions(
    doc: AnnotatedDocument,
    config: MergeConfig,
    joiner: str = "",
) -> tuple[AnnotatedDocument, list[TraceEntry]]:
    """Fuse adjacent same-label mentions (see the module docstring).

    Mentions are first sorted by offset. Pairs never merge across the
    title/abstract boundary: the fused span could not be localized.
    Merged mentions drop their scores; the fragments' scores described
    the fragments. Repeats until no pair merges.
    """
    combined, title_len, joiner_len = combine_text(doc.document, joiner)

    def field_text(loc: Location) -> str:
        return doc.document.title if loc is Location.TITLE else doc.document.abstract

    def group_key(m: EntityMention) -> int:
        if doc.coordinate_space is CoordinateSpace.PER_FIELD:
            return 0 if m.location is Location.TITLE else 1
        return 0

    mentions = sorted(doc.mentions, key=lambda m: (group_key(m), m.start_idx, m.end_idx))
    entries: list[TraceEntry] = []
    changed = True
    while changed:
        changed = False
        for i in range(len(mentions) - 1):
            a, b = mentions[i], mentions[i + 1]
            if a.label is not b.label or group_key(a) != group_key(b):
                continue
            if a.end_idx > b.start_idx:
                continue
            if doc.coordinate_space is CoordinateSpace.COMBINED:
                text = combined
                # The fused span must stay localizable: entirely inside
                # the title, or entirely at/after the abstract lead-in.
                if not (b.end_idx <= title_len or a.start_idx >= title_len + joiner_len):
                    continue
            else:
                text = field_text(a.location)
            gap = text[a.end_idx : b.start_idx]
            if not _gap_is_connector(gap, config):
                continue
            merged = EntityMention(
                a.start_idx,
                b.end_idx,
                text[a.start_idx : b.end_idx],
                a.label,
                a.location,
                None,
            )
            entries.append(
                _entry(
                    doc.doc_id,
                    RULE_MERGE_ADJACENT,
                    "merge",
                    merged,
                    after_label=merged.label.value,
                    merged_from=(
                        (a.start_idx, a.end_idx),
                        (b.start_idx, b.end_idx),
                    ),
                )
            )
            mentions[i : i + 2] = [merged]
            changed = True
            break
    return replace(doc, mentions=tuple(mentions)), entries


def run_pipeline(corpus: CorpusFile, pipeline: RulePipeline) -> PipelineResult:
    """Apply the pipeline to a prediction corpus.

    Refuses ground-truth corpora: post-processing gold, platinum, or
    silver annotations is always a mistake. Accepts combined or
    per-field input; localization is a no-op on the latter, which is
    what makes the pipeline idempotent end to end.
    """
    if corpus.provenance.is_ground_truth:
        raise ProvenanceError(
            f"refusing to post-process a {corpus.provenance.value} corpus;"
            " the pipeline is for predictions"
        )
    if pipeline.joiner is not None and pipeline.joiner != corpus.joiner:
        raise PipelineConfigError(
            f"pipeline joiner {pipeline.joiner!r} disagrees with corpus joiner"
            f" {corpus.joiner!r}"
        )
    joiner = corpus.joiner
    docs = dict(corpus.documents)
    trace: list[TraceEntry] = []
    space = corpus.coordinate_space

    for rule in pipeline.rules:
        if rule == RULE_REMOVE_TRIVIAL:
            for doc_id, doc in docs.items():
                kept = []
                for m in doc.mentions:
                    if is_trivial(m):
                        trace.append(_entry(doc_id, rule, "drop", m))
                    else:
                        kept.append(m)
                if len(kept) != len(doc.mentions):
                    docs[doc_id] = replace(doc, mentions=tuple(kept))
        elif rule == RULE_LEXICON_CORRECT:
            assert pipeline.lexicons is not None
            for doc_id, doc in docs.items():
                out = []
                for m in doc.mentions:
                    fixed = pipeline.lexicons.correct(m)
                    if fixed.label is not m.label:
                        trace.append(
                            _entry(doc_id, rule, "relabel", m, after_label=fixed.label.value)
                        )
                    out.append(fixed)
                docs[doc_id] = replace(doc, mentions=tuple(out))
        elif rule == RULE_MERGE_ADJACENT:
            for doc_id, doc in docs.items():
                merged_doc, entries = merge_adjacent_mentions(doc, pipeline.merge, joiner)
                docs[doc_id] = merged_doc
                trace.extend(entries)
        elif rule == RULE_STRIP_SCORES:
            for doc_id, doc in docs.items():
                docs[doc_id] = strip_scores(doc)
        elif rule == RULE_LOCALIZE:
            for doc_id, doc in docs.items():
                docs[doc_id] = to_per_field_document(doc, joiner)
            space = CoordinateSpace.PER_FIELD

    out_corpus = CorpusFile(docs, corpus.provenance, space, joiner)
    return PipelineResult(out_corpus, tuple(trace))


def _find_first(
    mentions: list[EntityMention],
    *,
    start: int,
    end: int,
    tag: str,
    label: str,
    context: str,
) -> int:
    for i, m in enumerate(mentions):
        if (
            m.start_idx == start
            and m.end_idx == end
            and m.location.value == tag
            and m.label.value == label
        ):
            return i
    raise ReplayError(f"{context}: no mention ({start}, {end}, {tag}, {label}) to apply it to")


def replay_trace(
    corpus: CorpusFile, trace: Sequence[TraceEntry], pipeline: RulePipeline
) -> CorpusFile:
    """Re-derive run_pipeline's output from its input plus its trace.

    Mention edits come from the trace; score stripping, localization,
    and merge's re-sort come from the pipeline configuration (they are
    deterministic, mention-independent finalization).
    """
    joiner = corpus.joiner
    docs = {doc_id: list(doc.mentions) for doc_id, doc in corpus.documents.items()}
    for n, e in enumerate(trace):
        if e.doc_id not in docs:
            raise ReplayError(f"trace entry #{n}: unknown doc_id {e.doc_id!r}")
        mentions = docs[e.doc_id]
        ctx = f"trace entry #{n} ({e.action})"
        if e.action == "drop":
            del mentions[
                _find_first(
                    mentions,
                    start=e.start_idx,
                    end=e.end_idx,
                    tag=e.tag,
                    label=e.before_label,
                    context=ctx,
                )
            ]
        elif e.action == "relabel":
            if e.after_label is None:
                raise ReplayError(f"{ctx}: relabel without after_label")
            i = _find_first(
                mentions,
                start=e.start_idx,
                end=e.end_idx,
                tag=e.tag,
                label=e.before_label,
                context=ctx,
            )
            # In place: relabeling never moves a mention.
            mentions[i] = replace(mentions[i], label=EntityLabel.parse(e.after_label))
        elif e.action == "merge":
            if not e.merged_from:
                raise ReplayError(f"{ctx}: merge without merged_from")
            for s, en in e.merged_from:
                del mentions[
                    _find_first(
                        mentions, start=s, end=en, tag=e.tag, label=e.before_label, context=ctx
                    )
                ]
            # Position is restored by the merge-stage re-sort below.
            mentions.append(
                EntityMention(
                    e.start_idx,
                    e.end_idx,
                    e.text_span,
                    EntityLabel.parse(e.before_label),
                    Location(e.tag),
                    None,
                )
            )

    out_docs: dict[str, AnnotatedDocument] = {}
    space = corpus.coordinate_space
    sort_all = RULE_MERGE_ADJACENT in pipeline.rules
    for doc_id, doc in corpus.documents.items():
        mentions = docs[doc_id]
        if sort_all:
            if corpus.coordinate_space is CoordinateSpace.PER_FIELD:
                mentions.sort(
                    key=lambda m: (m.location is not Location.TITLE, m.start_idx, m.end_idx)
                )
            else:
                mentions.sort(key=lambda m: (m.start_idx, m.end_idx))
        new_doc = replace(doc, mentions=tuple(mentions))
        if RULE_STRIP_SCORES in pipeline.rules:
            new_doc = strip_scores(new_doc)
        if RULE_LOCALIZE in pipeline.rules:
            new_doc = to_per_field_document(new_doc, joiner)
        out_docs[doc_id] = new_doc
    if RULE_LOCALIZE in pipeline.rules:
        space = CoordinateSpace.PER_FIELD
    return CorpusFile(out_docs, corpus.provenance, space, joiner)
