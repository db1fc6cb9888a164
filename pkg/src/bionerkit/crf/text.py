"""Sentence splitting, tokenization, and part-of-speech tagging.

The tokenizer keeps internal hyphens, so "IL-6" and "TNF-α" are single
tokens; everything else splits into alphanumeric runs and single
punctuation marks. Offsets always index the text the tokens came from,
in code points, so slices reconstruct token text exactly.

POS tagging is pluggable. The built-in tagger is a deterministic
closed-class/suffix rule tagger over a Penn-style tagset: crude as
linguistics, but reproducible anywhere, which matters more here. Tokens
that already carry a tag (e.g. supplied in a sidecar file) pass through
untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Protocol, Sequence

# Words are alphanumeric runs, optionally chaining through single
# internal hyphens; any other non-space character is its own token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*|\S")

_SENT_PUNCT_RE = re.compile(r"[.!?]+")


@dataclass(frozen=True, slots=True)
class Token:
    """A token with offsets into its source text; pos is filled by
    pos_tag (None = not yet tagged)."""

    text: str
    start_idx: int
    end_idx: int
    pos: str | None = None


def tokenize(text: str, offset: int = 0) -> list[Token]:
    """Split text into tokens. ``offset`` shifts recorded offsets, for
    tokenizing a slice of a larger document."""
    return [
        Token(m.group(), m.start() + offset, m.end() + offset)
        for m in _TOKEN_RE.finditer(text)
    ]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Return half-open sentence spans covering the text.

    A boundary is sentence-final punctuation (. ! ?) followed by
    whitespace and then an uppercase letter; the next sentence starts at
    that letter. Crude but deterministic and auditable.
    """
    if not text.strip():
        return []
    starts = [0]
    for m in _SENT_PUNCT_RE.finditer(text):
        j = m.end()
        while j < len(text) and text[j].isspace():
            j += 1
        if j > m.end() and j < len(text) and text[j].isupper():
            starts.append(j)
    spans = []
    for k, s in enumerate(starts):
        e = starts[k + 1] if k + 1 < len(starts) else len(text)
        spans.append((s, e))
    return spans


class PosTagger(Protocol):
    def tag(self, tokens: Sequence[Token]) -> list[str]: ...


_CLOSED_CLASS = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "each": "DT", "every": "DT",
    "some": "DT", "any": "DT", "no": "DT", "either": "DT", "neither": "DT",
    "in": "IN", "of": "IN", "on": "IN", "at": "IN", "by": "IN",
    "with": "IN", "from": "IN", "into": "IN", "during": "IN",
    "between": "IN", "among": "IN", "against": "IN", "without": "IN",
    "within": "IN", "under": "IN", "over": "IN", "after": "IN",
    "before": "IN", "through": "IN", "via": "IN", "per": "IN",
    "upon": "IN", "across": "IN", "for": "IN", "as": "IN",
    "and": "CC", "or": "CC", "but": "CC", "nor": "CC",
    "to": "TO",
    "not": "RB", "also": "RB", "very": "RB", "only": "RB",
    "i": "PRP", "you": "PRP", "he": "PRP", "she": "PRP", "it": "PRP",
    "we": "PRP", "they": "PRP", "them": "PRP", "him": "PRP", "her": "PRP",
    "can": "MD", "could": "MD", "may": "MD", "might": "MD", "must": "MD",
    "shall": "MD", "should": "MD", "will": "MD", "would": "MD",
    "is": "VBZ", "has": "VBZ", "does": "VBZ",
    "are": "VBP", "am": "VBP", "have": "VBP", "do": "VBP",
    "was": "VBD", "were": "VBD", "had": "VBD", "did": "VBD",
    "be": "VB", "been": "VBN", "being": "VBG",
}

_PUNCT_TAGS = {
    ".": ".", "!": ".", "?": ".",
    ",": ",", ";": ":", ":": ":",
    "(": "(", "[": "(", "{": "(",
    ")": ")", "]": ")", "}": ")",
    '"': "''", "'": "''", "`": "''",
    "-": ":", "–": ":", "—": ":",
    "$": "$", "%": "NN",
}

# Suffix rules, tried in order; (suffix, minimum length, tag).
_SUFFIX_RULES = (
    ("ly", 4, "RB"),
    ("ing", 5, "VBG"),
    ("ed", 4, "VBD"),
    ("tion", 5, "NN"),
    ("sion", 5, "NN"),
    ("ness", 5, "NN"),
    ("ment", 5, "NN"),
    ("ity", 5, "NN"),
    ("ous", 4, "JJ"),
    ("ful", 4, "JJ"),
    ("ive", 4, "JJ"),
    ("ble", 4, "JJ"),
    ("al", 4, "JJ"),
    ("ic", 4, "JJ"),
    ("ize", 4, "VB"),
    ("ise", 4, "VB"),
)


class RulePosTagger:
    """Deterministic closed-class + suffix tagger (Penn-style tags)."""

    def tag(self, tokens: Sequence[Token]) -> list[str]:
        return [self.tag_word(t.text) for t in tokens]

    @staticmethod
    def tag_word(word: str) -> str:
        if not any(ch.isalnum() for ch in word):
            return _PUNCT_TAGS.get(word, _PUNCT_TAGS.get(word[:1], "SYM"))
        if any(ch.isdigit() for ch in word) and not any(ch.isalpha() for ch in word):
            return "CD"
        lower = word.lower()
        if lower in _CLOSED_CLASS:
            return _CLOSED_CLASS[lower]
        for suffix, min_len, tag in _SUFFIX_RULES:
            if len(lower) >= min_len and lower.endswith(suffix):
                return tag
        if len(lower) > 3 and lower.endswith("s") and not lower.endswith(("ss", "us", "is")):
            return "NNS"
        if word.istitle() or (word.isalpha() and word.isupper()):
            return "NNP"
        return "NN"


DEFAULT_TAGGER = RulePosTagger()


def pos_tag(tokens: Sequence[Token], tagger: PosTagger | None = None) -> list[Token]:
    """Fill POS tags; tokens that already carry one pass through as-is."""
    tagger = tagger or DEFAULT_TAGGER
    untagged = [t for t in tokens if t.pos is None]
    fresh = iter(tagger.tag(untagged)) if untagged else iter(())
    return [t if t.pos is not None else replace(t, pos=next(fresh)) for t in tokens]


def sentence_tokens(
    text: str, tagger: PosTagger | None = None
) -> list[list[Token]]:
    """Split into sentences and return per-sentence tagged tokens with
    offsets into the full text. Sentences with no tokens are dropped."""
    out = []
    for s, e in split_sentences(text):
        toks = pos_tag(tokenize(text[s:e], offset=s), tagger)
        if toks:
            out.append(toks)
    return out
