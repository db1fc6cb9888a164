"""
Coordinate spaces for title/abstract annotations
================================================

A document stores its title and abstract as separate fields, but tools
often want one string. Mentions therefore live in one of two coordinate
spaces: per-field (offsets local to the tagged field) or combined
(offsets into title + joiner + abstract). All offsets count Unicode code
points, never bytes, so non-ASCII text shifts nothing.
"""

from bionerkit import (
    Document,
    EntityLabel,
    EntityMention,
    Location,
    OffsetError,
    assign_tag,
    combine_text,
    to_combined_offsets,
    to_local_offsets,
)

doc = Document(
    doc_id="demo",
    title="Gut flora and TNF-α.",
    abstract="Mice lacking IL-6 were studied.",
)

# ---- combining the fields
combined, title_len, joiner_len = combine_text(doc, joiner=" ")
print(f"combined: {combined!r}")
print(f"title_len={title_len} joiner_len={joiner_len}")
# "α" is one code point, so the title is 20 long even though it is 21 bytes
assert title_len == 20

# ---- a per-field mention in the abstract
mention = EntityMention(13, 17, "IL-6", EntityLabel.GENE, Location.ABSTRACT)
assert doc.abstract[mention.start_idx:mention.end_idx] == mention.text_span

# ---- lifting it into the combined space: shift by title + joiner
shifted = to_combined_offsets(mention, title_len=title_len, joiner_len=joiner_len)
print(f"per-field ({mention.start_idx}, {mention.end_idx}) -> "
      f"combined ({shifted.start_idx}, {shifted.end_idx})")
assert combined[shifted.start_idx:shifted.end_idx] == "IL-6"

# ---- and back again; the round trip is exact
back = to_local_offsets(shifted, title_len=title_len, joiner_len=joiner_len)
assert back == mention

# ---- the field tag is recomputable from combined offsets alone
assert assign_tag(shifted, title_len=title_len) is Location.ABSTRACT
title_mention = EntityMention(0, 9, "Gut flora", EntityLabel.MICROBIOME, Location.TITLE)
lifted = to_combined_offsets(title_mention, title_len=title_len, joiner_len=joiner_len)
assert (lifted.start_idx, lifted.end_idx) == (0, 9)  # title spans do not move
assert assign_tag(lifted, title_len=title_len) is Location.TITLE

# ---- spans crossing the field boundary have no per-field home
straddler = EntityMention(18, 26, combined[18:26], EntityLabel.DDF, Location.TITLE)
try:
    to_local_offsets(straddler, title_len=title_len, joiner_len=joiner_len)
except OffsetError as err:
    print(f"straddling span rejected: {err}")
else:
    raise AssertionError("straddler should not convert")

print("round trips exact, tags recomputable, straddlers rejected")
