"""Conversion between entity spans and token-level BIO tags.

The tag set is "O" plus B-/I- per entity label: 27 tags, in a fixed
order with "O" first so that index 0 is the harmless default under
tie-breaking. Encoding resolves overlapping mentions by keeping the
longer span, then the earlier; mentions whose boundaries don't land on
token boundaries are clipped to the tokens they overlap and reported.
Decoding is relaxed: an I- tag without a compatible predecessor opens a
new mention, so any tag sequence decodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..corpus import LABELS, EntityLabel, EntityMention, Location
from .text import Token

O_TAG = "O"

BIO_TAGS: tuple[str, ...] = (O_TAG,) + tuple(
    f"{prefix}-{label.value}" for label in LABELS for prefix in ("B", "I")
)

_TAG_INDEX: dict[str, int] = {tag: i for i, tag in enumerate(BIO_TAGS)}


def tag_index(tag: str) -> int:
    return _TAG_INDEX[tag]


def parse_tag(tag: str) -> tuple[str, EntityLabel | None]:
    """Split a BIO tag into (prefix, label); ("O", None) for outside."""
    if tag == O_TAG:
        return O_TAG, None
    prefix, _, raw = tag.partition("-")
    if prefix not in ("B", "I") or not raw:
        raise ValueError(f"not a BIO tag: {tag!r}")
    return prefix, EntityLabel.parse(raw)


@dataclass(frozen=True)
class EncodingReport:
    """Mentions the encoder could not represent faithfully."""

    dropped_overlaps: tuple[EntityMention, ...] = ()
    clipped: tuple[EntityMention, ...] = ()
    unaligned: tuple[EntityMention, ...] = ()

    @property
    def clean(self) -> bool:
        return not (self.dropped_overlaps or self.clipped or self.unaligned)


def resolve_overlaps(
    mentions: Sequence[EntityMention],
) -> tuple[tuple[EntityMention, ...], tuple[EntityMention, ...]]:
    """Greedily keep a non-overlapping subset: longer spans first, then
    earlier ones. Returns (kept sorted by start, dropped)."""
    order = sorted(
        mentions,
        key=lambda m: (-(m.end_idx - m.start_idx), m.start_idx, m.end_idx, m.label.value),
    )
    kept: list[EntityMention] = []
    dropped: list[EntityMention] = []
    for m in order:
        if any(m.start_idx < k.end_idx and k.start_idx < m.end_idx for k in kept):
            dropped.append(m)
        else:
            kept.append(m)
    kept.sort(key=lambda m: (m.start_idx, m.end_idx))
    return tuple(kept), tuple(dropped)


def spans_to_bio(
    mentions: Sequence[EntityMention], tokens: Sequence[Token]
) -> tuple[list[str], EncodingReport]:
    """Encode mentions as one BIO tag per token.

    Mentions and token offsets must be in the same coordinate space.
    The first token overlapping a mention gets B-label, later ones
    I-label. A mention overlapping no token is lost (reported as
    unaligned); one whose edges fall inside tokens is clipped to the
    overlapping tokens (reported as clipped).
    """
    kept, dropped = resolve_overlaps(mentions)
    tags = [O_TAG] * len(tokens)
    clipped: list[EntityMention] = []
    unaligned: list[EntityMention] = []
    for m in kept:
        hit = [
            k
            for k, t in enumerate(tokens)
            if t.start_idx < m.end_idx and m.start_idx < t.end_idx
        ]
        if not hit:
            unaligned.append(m)
            continue
        if tokens[hit[0]].start_idx != m.start_idx or tokens[hit[-1]].end_idx != m.end_idx:
            clipped.append(m)
        tags[hit[0]] = f"B-{m.label.value}"
        for k in hit[1:]:
            tags[k] = f"I-{m.label.value}"
    return tags, EncodingReport(tuple(dropped), tuple(clipped), tuple(unaligned))


def bio_to_spans(
    tokens: Sequence[Token],
    tags: Sequence[str],
    text: str,
    title_len: int = 0,
) -> list[EntityMention]:
    """Decode BIO tags back into mentions.

    Offsets come from the first/last token of each maximal B,I* run;
    text_span is re-sliced from ``text`` (the same text the token
    offsets index). ``title_len`` sets each mention's location tag:
    't' iff it starts before title_len.
    """
    if len(tokens) != len(tags):
        raise ValueError(f"{len(tokens)} tokens vs {len(tags)} tags")
    spans: list[tuple[int, int, EntityLabel]] = []
    open_label: EntityLabel | None = None
    open_start = open_end = 0
    for tok, tag in zip(tokens, tags):
        prefix, label = parse_tag(tag)
        if prefix == "I" and label is open_label and open_label is not None:
            open_end = tok.end_idx
            continue
        if open_label is not None:
            spans.append((open_start, open_end, open_label))
            open_label = None
        if prefix != O_TAG:
            # B opens a mention; a dangling I does too (relaxed decoding).
            open_label = label
            open_start, open_end = tok.start_idx, tok.end_idx
    if open_label is not None:
        spans.append((open_start, open_end, open_label))
    return [
        EntityMention(
            s,
            e,
            text[s:e],
            label,
            Location.TITLE if s < title_len else Location.ABSTRACT,
        )
        for s, e, label in spans
    ]
