"""Domain types for annotated biomedical abstracts.

A document is a title plus an abstract, keyed by an opaque identifier.
Entity mentions are labeled character spans, half-open ``[start_idx,
end_idx)``, counted in Unicode code points (never bytes, never UTF-16
units). A mention's offsets are expressed in one of two coordinate
spaces:

* per-field: offsets index into the title or the abstract, selected by
  the mention's location tag (``'t'`` / ``'a'``);
* combined: offsets index into ``title + joiner + abstract``.

All types here are immutable values and the offset transforms are pure
functions. Validation never raises on bad annotations: violations are
returned as data so callers can report every problem in a file at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum


class LabelError(ValueError):
    """Raised for a string outside the closed label set."""


class OffsetError(ValueError):
    """Raised when a span cannot be mapped between coordinate spaces."""


class EntityLabel(str, Enum):
    """The closed set of thirteen entity categories."""

    BACTERIA = "bacteria"
    BIOMEDICAL_TECHNIQUE = "biomedical_technique"
    CHEMICAL = "chemical"
    DDF = "DDF"
    DIETARY_SUPPLEMENT = "dietary_supplement"
    DRUG = "drug"
    FOOD = "food"
    GENE = "gene"
    HUMAN = "human"
    ANIMAL = "animal"
    ANATOMICAL_LOCATION = "anatomical_location"
    MICROBIOME = "microbiome"
    STATISTICAL_TECHNIQUE = "statistical_technique"

    @classmethod
    def parse(cls, raw: str) -> EntityLabel:
        """Resolve a raw label string, ignoring case and space/underscore
        differences. Raises LabelError for anything outside the set."""
        try:
            return _LABEL_BY_KEY[_label_key(raw)]
        except KeyError:
            raise LabelError(f"unknown entity label: {raw!r}") from None


def _label_key(raw: str) -> str:
    return re.sub(r"[\s_]+", "_", raw.strip()).lower()


_LABEL_BY_KEY: dict[str, EntityLabel] = {_label_key(lab.value): lab for lab in EntityLabel}

LABELS: tuple[EntityLabel, ...] = tuple(EntityLabel)


class Location(str, Enum):
    """Which field a per-field mention indexes into."""

    TITLE = "t"
    ABSTRACT = "a"


class CoordinateSpace(str, Enum):
    PER_FIELD = "per_field"
    COMBINED = "combined"


@dataclass(frozen=True, slots=True)
class EntityMention:
    """One labeled span.

    Offsets are half-open and counted in code points. ``score`` is the
    tagger's confidence and is only present on predictions. Invalid
    states (empty span, out-of-bounds offsets) are representable on
    purpose; ``validate_document`` reports them instead of refusing to
    construct them.
    """

    start_idx: int
    end_idx: int
    text_span: str
    label: EntityLabel
    location: Location
    score: float | None = None


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    title: str
    abstract: str


@dataclass(frozen=True, slots=True)
class AnnotatedDocument:
    """A document plus its mentions, all in one coordinate space."""

    document: Document
    mentions: tuple[EntityMention, ...]
    coordinate_space: CoordinateSpace

    def __post_init__(self) -> None:
        object.__setattr__(self, "mentions", tuple(self.mentions))

    @property
    def doc_id(self) -> str:
        return self.document.doc_id


@dataclass(frozen=True, slots=True)
class Violation:
    """One broken invariant, reported as data."""

    doc_id: str
    kind: str
    message: str
    mention_index: int | None = None

    def __str__(self) -> str:
        where = self.doc_id if self.mention_index is None else f"{self.doc_id}#{self.mention_index}"
        return f"[{self.kind}] {where}: {self.message}"


def combine_text(doc: Document, joiner: str = "") -> tuple[str, int, int]:
    """Concatenate title and abstract.

    Returns (combined_text, title_len, joiner_len); the lengths are what
    the offset transforms below need, so compute them once here.
    """
    return doc.title + joiner + doc.abstract, len(doc.title), len(joiner)


def to_combined_offsets(m: EntityMention, title_len: int, joiner_len: int = 0) -> EntityMention:
    """Map a per-field mention into combined coordinates.

    Title offsets are unchanged; abstract offsets shift right by
    title_len + joiner_len. The location tag is kept as-is: it still
    records which field the span came from.
    """
    if m.start_idx < 0 or m.start_idx >= m.end_idx:
        raise OffsetError(f"degenerate span [{m.start_idx}, {m.end_idx})")
    if m.location is Location.TITLE:
        if m.end_idx > title_len:
            raise OffsetError(
                f"title span [{m.start_idx}, {m.end_idx}) exceeds title length {title_len}"
            )
        return m
    shift = title_len + joiner_len
    return replace(m, start_idx=m.start_idx + shift, end_idx=m.end_idx + shift)


def to_local_offsets(m: EntityMention, title_len: int, joiner_len: int = 0) -> EntityMention:
    """Map a combined-space mention back into its field's coordinates.

    A span that ends inside the title stays put and is tagged 't'; one
    that starts at or after the abstract lead-in shifts left and is
    tagged 'a'. Anything else straddles the field boundary, which valid
    per-field annotations cannot produce, so it is an error rather than
    something to truncate.
    """
    if m.start_idx < 0 or m.start_idx >= m.end_idx:
        raise OffsetError(f"degenerate span [{m.start_idx}, {m.end_idx})")
    if m.end_idx <= title_len:
        return replace(m, location=Location.TITLE)
    boundary = title_len + joiner_len
    if m.start_idx >= boundary:
        return replace(
            m,
            start_idx=m.start_idx - boundary,
            end_idx=m.end_idx - boundary,
            location=Location.ABSTRACT,
        )
    raise OffsetError(
        f"span [{m.start_idx}, {m.end_idx}) straddles the title/abstract boundary at {title_len}"
    )


def assign_tag(m: EntityMention, title_len: int) -> Location:
    """Tag a combined-space mention: 't' iff it starts inside the title.

    The boundary case start_idx == title_len is the first abstract
    position (offsets are half-open), so it tags 'a'.
    """
    return Location.TITLE if m.start_idx < title_len else Location.ABSTRACT


def to_combined_document(doc: AnnotatedDocument, joiner: str = "") -> AnnotatedDocument:
    """Re-express a whole document in combined coordinates.

    Verifies every re-sliced span on the way; a mismatch means the
    annotation was corrupt, which must not propagate silently.
    """
    if doc.coordinate_space is CoordinateSpace.COMBINED:
        return doc
    combined, title_len, joiner_len = combine_text(doc.document, joiner)
    out = []
    for m in doc.mentions:
        moved = to_combined_offsets(m, title_len, joiner_len)
        got = combined[moved.start_idx : moved.end_idx]
        if got != moved.text_span:
            raise OffsetError(
                f"doc {doc.doc_id}: combined slice {got!r} != text_span {moved.text_span!r}"
            )
        out.append(moved)
    return AnnotatedDocument(doc.document, tuple(out), CoordinateSpace.COMBINED)


def to_per_field_document(doc: AnnotatedDocument, joiner: str = "") -> AnnotatedDocument:
    """Re-express a whole document in per-field coordinates, assigning
    location tags from the combined offsets."""
    if doc.coordinate_space is CoordinateSpace.PER_FIELD:
        return doc
    _, title_len, joiner_len = combine_text(doc.document, joiner)
    out = []
    for m in doc.mentions:
        moved = to_local_offsets(m, title_len, joiner_len)
        field = doc.document.title if moved.location is Location.TITLE else doc.document.abstract
        got = field[moved.start_idx : moved.end_idx]
        if got != moved.text_span:
            raise OffsetError(
                f"doc {doc.doc_id}: field slice {got!r} != text_span {moved.text_span!r}"
            )
        out.append(moved)
    return AnnotatedDocument(doc.document, tuple(out), CoordinateSpace.PER_FIELD)


def validate_document(doc: AnnotatedDocument, joiner: str = "") -> list[Violation]:
    """Check every invariant and return every violation found.

    Checked per mention: label in the closed set, start < end, offsets in
    bounds for the declared space (and field, when per-field), the
    recorded text_span equal to the actual slice, and score in [0, 1]
    when present. Also checks the doc_id is non-empty.
    """
    violations: list[Violation] = []
    d = doc.document
    if not d.doc_id:
        violations.append(Violation(d.doc_id, "empty-doc-id", "document has no identifier"))
    combined, _, _ = combine_text(d, joiner)

    for i, m in enumerate(doc.mentions):
        if not isinstance(m.label, EntityLabel):
            violations.append(
                Violation(d.doc_id, "bad-label", f"label {m.label!r} outside the closed set", i)
            )
        if m.score is not None and not (0.0 <= m.score <= 1.0):
            violations.append(
                Violation(d.doc_id, "bad-score", f"score {m.score!r} outside [0, 1]", i)
            )
        if m.start_idx >= m.end_idx:
            violations.append(
                Violation(
                    d.doc_id, "empty-span", f"span [{m.start_idx}, {m.end_idx}) is empty", i
                )
            )
            continue
        if doc.coordinate_space is CoordinateSpace.PER_FIELD:
            target = d.title if m.location is Location.TITLE else d.abstract
            field_name = "title" if m.location is Location.TITLE else "abstract"
        else:
            target = combined
            field_name = "combined text"
        if m.start_idx < 0 or m.end_idx > len(target):
            violations.append(
                Violation(
                    d.doc_id,
                    "out-of-bounds",
                    f"span [{m.start_idx}, {m.end_idx}) outside {field_name} of length {len(target)}",
                    i,
                )
            )
            continue
        got = target[m.start_idx : m.end_idx]
        if got != m.text_span:
            violations.append(
                Violation(
                    d.doc_id,
                    "span-mismatch",
                    f"slice {got!r} != recorded text_span {m.text_span!r}",
                    i,
                )
            )
    return violations
