"""
Cleaning model predictions with the rule pipeline
=================================================

Tagger output contains two recurring mistakes that need no model to fix:
spans that merely restate their own label ("bacteria" tagged bacteria)
and well-known terms filed under a neighbouring label (IL-6 as chemical
rather than gene). The pipeline drops the first kind, relabels the
second from curated lexicons, and logs every edit to a replayable trace.
"""

from bionerkit import (
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    Location,
)
from bionerkit.io import CorpusFile, Provenance
from bionerkit.postprocess import RulePipeline, replay_trace, run_pipeline

# ---- a small prediction file, as a tagger might emit it
doc = Document(
    doc_id="demo",
    title="Gut bacteria raise IL-6 levels.",
    abstract="NNSs and NS9 were consumed daily.",
)
predicted = [
    EntityMention(4, 12, "bacteria", EntityLabel.BACTERIA, Location.TITLE, score=0.93),
    EntityMention(19, 23, "IL-6", EntityLabel.CHEMICAL, Location.TITLE, score=0.88),
    EntityMention(0, 4, "NNSs", EntityLabel.DIETARY_SUPPLEMENT, Location.ABSTRACT, score=0.71),
    EntityMention(9, 12, "NS9", EntityLabel.FOOD, Location.ABSTRACT, score=0.64),
]
corpus = CorpusFile(
    {"demo": AnnotatedDocument(doc, predicted, CoordinateSpace.PER_FIELD)},
    Provenance.PREDICTION,
    CoordinateSpace.PER_FIELD,
    joiner=" ",
)

print("before:")
for m in predicted:
    print(f"  {m.location.value} [{m.start_idx},{m.end_idx}) {m.text_span!r:12} {m.label.value}")

# ---- run the default rules: drop trivial spans, correct from lexicons
pipeline = RulePipeline.default()
result = run_pipeline(corpus, pipeline)

print("\nafter:")
for m in result.corpus.documents["demo"].mentions:
    print(f"  {m.location.value} [{m.start_idx},{m.end_idx}) {m.text_span!r:12} {m.label.value}")

print("\ntrace:")
for entry in result.trace:
    change = entry.action if entry.after_label is None else (
        f"{entry.before_label} -> {entry.after_label}"
    )
    print(f"  {entry.rule}: {entry.text_span!r} {change}")

# ---- what happened, stated as checks
out = {(m.text_span, m.label) for m in result.corpus.documents["demo"].mentions}
assert ("bacteria", EntityLabel.BACTERIA) not in out  # trivial span dropped
assert ("IL-6", EntityLabel.GENE) in out  # lexicon moved it to gene
assert ("NNSs", EntityLabel.FOOD) in out  # sweeteners are food, not supplements
assert ("NS9", EntityLabel.DIETARY_SUPPLEMENT) in out  # and NS9 is a supplement
assert all(m.score is None for m in result.corpus.documents["demo"].mentions)

# ---- the trace alone reproduces the output from the input
assert replay_trace(corpus, result.trace, pipeline) == result.corpus
print("\ntrace replay reproduces the cleaned corpus exactly")
