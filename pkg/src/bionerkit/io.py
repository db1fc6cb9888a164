"""Reading and writing annotation corpora and term lexicons.

Corpus file format (JSON, UTF-8)
--------------------------------

::

    {
      "offset_convention": "half_open",          # or "inclusive"
      "provenance": "gold",                      # gold | platinum | silver | prediction
      "coordinate_space": "per_field",           # per_field | combined
      "joiner": "",                              # text between title and abstract (combined space)
      "documents": [
        {
          "doc_id": "38790173",
          "title": "...",
          "abstract": "...",
          "entities": [                          # "pred_entities" when provenance is prediction
            {
              "start_idx": 0,                    # code-point offset, half-open span
              "end_idx": 10,
              "tag": "t",                        # 't' = title, 'a' = abstract
              "text_span": "Firmicutes",
              "label": "bacteria",
              "score": 0.93                      # predictions only, optional, in [0, 1]
            }
          ]
        }
      ]
    }

Rules the parser enforces:

* ``offset_convention`` declares how ``end_idx`` was recorded. Internally
  spans are always half-open; ``inclusive`` input is converted by adding
  one to each ``end_idx`` at parse time. The header defaults to
  ``half_open``; an explicit ``convention`` argument (the importer flag)
  wins over the header.
* Gold-quality provenances use the ``entities`` key and must not carry
  scores; ``prediction`` files use ``pred_entities``. Either key is
  accepted on input, but a file may not mix them.
* ``tag`` is required in per-field space, where offsets are meaningless
  without it. In combined space it may be omitted (it is derived from
  the offsets) but must agree with them when present.
* Every document is validated after parsing; any violation is a parse
  error naming the document and mention.

Writers emit documents sorted by doc_id, mentions in stored order, keys
in the order above, two-space indentation, and a trailing newline, so
equal corpora serialize to identical bytes.

Lexicon file format: UTF-8 text, one term per line; ``#`` starts a
comment; blank lines ignored; terms are lowercased and de-duplicated.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .corpus import (
    LABELS,
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    LabelError,
    Location,
    validate_document,
)

logger = logging.getLogger(__name__)

OFFSET_CONVENTIONS = ("half_open", "inclusive")


class CorpusFormatError(ValueError):
    """Raised for structurally bad corpus files."""


class Provenance(str, Enum):
    GOLD = "gold"
    PLATINUM = "platinum"
    SILVER = "silver"
    PREDICTION = "prediction"

    @property
    def is_ground_truth(self) -> bool:
        return self is not Provenance.PREDICTION


@dataclass(frozen=True)
class CorpusFile:
    """A parsed corpus: documents keyed by doc_id plus file-level facts.

    Equality is structural and ignores document order, which is what the
    round-trip guarantees are stated against.
    """

    documents: dict[str, AnnotatedDocument]
    provenance: Provenance
    coordinate_space: CoordinateSpace
    joiner: str = ""

    def __post_init__(self) -> None:
        for doc_id, doc in self.documents.items():
            if doc.doc_id != doc_id:
                raise ValueError(f"document keyed {doc_id!r} has doc_id {doc.doc_id!r}")
            if doc.coordinate_space is not self.coordinate_space:
                raise ValueError(f"document {doc_id} not in corpus coordinate space")

    def mention_count(self) -> int:
        return sum(len(d.mentions) for d in self.documents.values())


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CorpusFormatError(message)


def _parse_mention(
    raw: Any,
    *,
    doc: Document,
    index: int,
    space: CoordinateSpace,
    provenance: Provenance,
    inclusive: bool,
    joiner: str,
) -> EntityMention:
    where = f"doc {doc.doc_id} entity #{index}"
    _require(isinstance(raw, dict), f"{where}: entity is not an object")
    for key in ("start_idx", "end_idx", "text_span", "label"):
        _require(key in raw, f"{where}: missing field {key!r}")
    start, end = raw["start_idx"], raw["end_idx"]
    _require(isinstance(start, int) and not isinstance(start, bool), f"{where}: start_idx not an integer")
    _require(isinstance(end, int) and not isinstance(end, bool), f"{where}: end_idx not an integer")
    if inclusive:
        end += 1
    _require(isinstance(raw["text_span"], str), f"{where}: text_span not a string")
    try:
        label = EntityLabel.parse(raw["label"])
    except LabelError as exc:
        raise CorpusFormatError(f"{where}: {exc}") from None

    score = raw.get("score")
    if score is not None:
        _require(
            provenance is Provenance.PREDICTION,
            f"{where}: score present in a {provenance.value} file (scores are for predictions)",
        )
        _require(
            isinstance(score, (int, float)) and not isinstance(score, bool),
            f"{where}: score not a number",
        )
        score = float(score)

    tag = raw.get("tag")
    if tag is not None:
        _require(tag in ("t", "a"), f"{where}: tag must be 't' or 'a', got {tag!r}")
    if space is CoordinateSpace.PER_FIELD:
        _require(tag is not None, f"{where}: per-field mention has no 't'/'a' tag")
        location = Location(tag)
    else:
        # In combined space the tag is determined by the offsets, so it
        # may be omitted; when present it must agree.
        derived = Location.TITLE if start < len(doc.title) else Location.ABSTRACT
        if tag is not None:
            _require(
                Location(tag) is derived,
                f"{where}: tag {tag!r} disagrees with combined offset {start}"
                f" (title length {len(doc.title)})",
            )
        location = derived

    unknown = set(raw) - {"start_idx", "end_idx", "tag", "text_span", "label", "score"}
    _require(not unknown, f"{where}: unknown fields {sorted(unknown)}")
    return EntityMention(start, end, raw["text_span"], label, location, score)


def parse_corpus(
    data: str | bytes,
    *,
    convention: str | None = None,
    default_joiner: str = "",
    validate: bool = True,
) -> CorpusFile:
    """Parse a corpus file's contents.

    ``convention`` overrides the file's offset_convention header (this is
    what the CLI's --offset-convention flag feeds). Raises
    CorpusFormatError for malformed structure, unknown labels, mixed
    entity keys, or documents failing validation. ``validate=False``
    defers per-document validation to the caller (the validate command
    reports violations itself instead of dying on the first bad doc).
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusFormatError(f"not valid UTF-8: {exc}") from None
    try:
        root = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"not valid JSON: {exc}") from None
    _require(isinstance(root, dict), "top level is not an object")

    conv = convention if convention is not None else root.get("offset_convention", "half_open")
    _require(conv in OFFSET_CONVENTIONS, f"unknown offset_convention {conv!r}")
    inclusive = conv == "inclusive"

    _require("provenance" in root, "missing provenance header")
    try:
        provenance = Provenance(root["provenance"])
    except ValueError:
        raise CorpusFormatError(f"unknown provenance {root['provenance']!r}") from None

    raw_space = root.get("coordinate_space", CoordinateSpace.PER_FIELD.value)
    try:
        space = CoordinateSpace(raw_space)
    except ValueError:
        raise CorpusFormatError(f"unknown coordinate_space {raw_space!r}") from None

    joiner = root.get("joiner", default_joiner)
    _require(isinstance(joiner, str), "joiner is not a string")
    _require(isinstance(root.get("documents"), list), "documents is not a list")

    entity_key = "pred_entities" if provenance is Provenance.PREDICTION else "entities"
    documents: dict[str, AnnotatedDocument] = {}
    for raw_doc in root["documents"]:
        _require(isinstance(raw_doc, dict), "document is not an object")
        doc_id = raw_doc.get("doc_id")
        _require(isinstance(doc_id, str) and doc_id != "", f"document with bad doc_id {doc_id!r}")
        _require(doc_id not in documents, f"duplicate doc_id {doc_id!r}")
        title = raw_doc.get("title", "")
        abstract = raw_doc.get("abstract", "")
        _require(isinstance(title, str), f"doc {doc_id}: title not a string")
        _require(isinstance(abstract, str), f"doc {doc_id}: abstract not a string")
        doc = Document(doc_id, title, abstract)

        present = [k for k in ("entities", "pred_entities") if k in raw_doc]
        _require(len(present) <= 1, f"doc {doc_id}: both entities and pred_entities present")
        if present and present[0] != entity_key:
            raise CorpusFormatError(
                f"doc {doc_id}: {present[0]!r} key in a {provenance.value} file"
                f" (expected {entity_key!r})"
            )
        raw_mentions = raw_doc.get(entity_key, [])
        _require(isinstance(raw_mentions, list), f"doc {doc_id}: {entity_key} is not a list")
        mentions = tuple(
            _parse_mention(
                raw,
                doc=doc,
                index=i,
                space=space,
                provenance=provenance,
                inclusive=inclusive,
                joiner=joiner,
            )
            for i, raw in enumerate(raw_mentions)
        )
        annotated = AnnotatedDocument(doc, mentions, space)
        if validate:
            problems = validate_document(annotated, joiner)
            if problems:
                details = "; ".join(str(v) for v in problems[:5])
                raise CorpusFormatError(
                    f"doc {doc_id}: {len(problems)} validation violation(s): {details}"
                )
        documents[doc_id] = annotated

    return CorpusFile(documents, provenance, space, joiner)


def read_corpus(
    path: str,
    *,
    convention: str | None = None,
    default_joiner: str = "",
    validate: bool = True,
) -> CorpusFile:
    with open(path, "rb") as fh:
        return parse_corpus(
            fh.read(), convention=convention, default_joiner=default_joiner, validate=validate
        )


def _mention_to_json(m: EntityMention, *, include_scores: bool) -> dict[str, Any]:
    out: dict[str, Any] = {
        "start_idx": m.start_idx,
        "end_idx": m.end_idx,
        "tag": m.location.value,
        "text_span": m.text_span,
        "label": m.label.value,
    }
    if include_scores and m.score is not None:
        out["score"] = m.score
    return out


def corpus_to_json(corpus: CorpusFile, *, include_scores: bool = True) -> dict[str, Any]:
    entity_key = "pred_entities" if corpus.provenance is Provenance.PREDICTION else "entities"
    docs = []
    for doc_id in sorted(corpus.documents):
        doc = corpus.documents[doc_id]
        docs.append(
            {
                "doc_id": doc_id,
                "title": doc.document.title,
                "abstract": doc.document.abstract,
                entity_key: [
                    _mention_to_json(m, include_scores=include_scores) for m in doc.mentions
                ],
            }
        )
    return {
        "offset_convention": "half_open",
        "provenance": corpus.provenance.value,
        "coordinate_space": corpus.coordinate_space.value,
        "joiner": corpus.joiner,
        "documents": docs,
    }


def write_corpus(corpus: CorpusFile, *, include_scores: bool = True) -> bytes:
    """Serialize a corpus deterministically (see the module docstring)."""
    payload = corpus_to_json(corpus, include_scores=include_scores)
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def write_predictions(corpus: CorpusFile) -> bytes:
    """Serialize finalized predictions: per-field offsets, 't'/'a' tags,
    scores stripped. Refuses combined-space input; localize first."""
    if corpus.provenance is not Provenance.PREDICTION:
        raise CorpusFormatError(f"write_predictions on {corpus.provenance.value} corpus")
    if corpus.coordinate_space is not CoordinateSpace.PER_FIELD:
        raise CorpusFormatError("write_predictions requires per-field offsets; localize first")
    return write_corpus(corpus, include_scores=False)


def save_corpus(corpus: CorpusFile, path: str, *, include_scores: bool = True) -> None:
    with open(path, "wb") as fh:
        fh.write(write_corpus(corpus, include_scores=include_scores))


def parse_lexicon(data: str | bytes) -> tuple[str, ...]:
    """Parse a term-per-line lexicon.

    Terms are stripped, lowercased, and de-duplicated keeping first
    occurrence; '#' starts a comment (whole-line or trailing). An empty
    result is legal but logged, since an empty dictionary corrects
    nothing.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    seen: dict[str, None] = {}
    for line in data.splitlines():
        term = line.split("#", 1)[0].strip().lower()
        if term:
            seen.setdefault(term, None)
    if not seen:
        logger.warning("lexicon contains no terms")
    return tuple(seen)


def read_lexicon(path: str) -> tuple[str, ...]:
    with open(path, "rb") as fh:
        return parse_lexicon(fh.read())


@dataclass(frozen=True)
class LabelCountReport:
    """Mention counts per label over a corpus."""

    counts: dict[EntityLabel, int]
    total: int
    shares: dict[EntityLabel, float]

    @classmethod
    def from_corpus(cls, corpus: CorpusFile) -> LabelCountReport:
        counter: Counter[EntityLabel] = Counter()
        for doc in corpus.documents.values():
            counter.update(m.label for m in doc.mentions)
        counts = {label: counter.get(label, 0) for label in LABELS}
        total = sum(counts.values())
        shares = {label: (n / total if total else 0.0) for label, n in counts.items()}
        return cls(counts, total, shares)


def label_counts(corpus: CorpusFile) -> LabelCountReport:
    return LabelCountReport.from_corpus(corpus)


def format_label_counts(report: LabelCountReport) -> str:
    """Two-column label/count table, descending count then label name."""
    order = sorted(report.counts, key=lambda lab: (-report.counts[lab], lab.value))
    width = max(len(lab.value) for lab in order)
    lines = [f"{lab.value:<{width}}  {report.counts[lab]:>6}" for lab in order]
    lines.append(f"{'total':<{width}}  {report.total:>6}")
    return "\n".join(lines)
