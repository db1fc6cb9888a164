"""Per-token feature extraction for the sequence tagger.

The template: the token's lowercase form, suffixes of length 2 and 3,
case/digit booleans, POS tag and its first two characters; the same
minus suffixes and the digit flag for the immediately preceding and
succeeding tokens; BOS/EOS markers at sentence edges.

Features are plain strings ("w.lower=il-6"); the model interns them to
integer indices. The case booleans apply to purely alphabetic tokens,
so "IL-6" is neither all-upper nor a digit.
"""

from __future__ import annotations

from typing import Sequence

from .text import Token


def _is_upper(word: str) -> bool:
    return word.isalpha() and word.isupper()


def token_features(tokens: Sequence[Token], i: int) -> list[str]:
    """Feature strings for position i; POS tags must already be filled."""
    t = tokens[i]
    w = t.text
    feats = [
        f"w.lower={w.lower()}",
        f"w[-2:]={w[-2:]}",
        f"w[-3:]={w[-3:]}",
        f"w.isupper={_is_upper(w)}",
        f"w.istitle={w.istitle()}",
        f"w.isdigit={w.isdigit()}",
        f"pos={t.pos}",
        f"pos[:2]={str(t.pos)[:2]}",
    ]
    if i == 0:
        feats.append("BOS")
    else:
        p = tokens[i - 1]
        feats += [
            f"-1:w.lower={p.text.lower()}",
            f"-1:w.isupper={_is_upper(p.text)}",
            f"-1:w.istitle={p.text.istitle()}",
            f"-1:pos={p.pos}",
            f"-1:pos[:2]={str(p.pos)[:2]}",
        ]
    if i == len(tokens) - 1:
        feats.append("EOS")
    else:
        n = tokens[i + 1]
        feats += [
            f"+1:w.lower={n.text.lower()}",
            f"+1:w.isupper={_is_upper(n.text)}",
            f"+1:w.istitle={n.text.istitle()}",
            f"+1:pos={n.pos}",
            f"+1:pos[:2]={str(n.pos)[:2]}",
        ]
    return feats


def sentence_features(tokens: Sequence[Token]) -> list[list[str]]:
    return [token_features(tokens, i) for i in range(len(tokens))]
