"""
Label distribution of an annotated corpus
=========================================

Corpus composition drives most modelling choices: a tagger sees eight
times more disease mentions than gene mentions here, so per-label scores
need the counts alongside them. This script rebuilds a development-set
shaped corpus (1117 mentions with the observed label mix) and prints its
count/share table.
"""

from bionerkit import (
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    LABELS,
    Location,
)
from bionerkit.io import CorpusFile, Provenance, format_label_counts, label_counts

# ---- the five most common labels, with the long tail spread evenly
allocation = {
    EntityLabel.DDF: 379,
    EntityLabel.CHEMICAL: 131,
    EntityLabel.MICROBIOME: 127,
    EntityLabel.DRUG: 60,
    EntityLabel.GENE: 39,
}
rest = [lab for lab in LABELS if lab not in allocation]
remaining = 1117 - sum(allocation.values())
for i, lab in enumerate(rest):
    allocation[lab] = remaining // len(rest) + (1 if i < remaining % len(rest) else 0)
assert sum(allocation.values()) == 1117

# ---- one synthetic document carrying one single-token mention per count
labels = [lab for lab, n in allocation.items() for _ in range(n)]
doc = Document("shaped", "Development set shaped corpus.", ("w " * len(labels)).rstrip())
mentions = [
    EntityMention(2 * i, 2 * i + 1, "w", lab, Location.ABSTRACT)
    for i, lab in enumerate(labels)
]
corpus = CorpusFile(
    {"shaped": AnnotatedDocument(doc, mentions, CoordinateSpace.PER_FIELD)},
    Provenance.GOLD,
    CoordinateSpace.PER_FIELD,
    " ",
)

# ---- counts, most common first
report = label_counts(corpus)
print(format_label_counts(report))

# ---- shares as percentages, the way score tables quote them
print()
for lab in sorted(report.counts, key=lambda lab: -report.counts[lab])[:5]:
    print(f"{lab.value:<12} {report.shares[lab] * 100:5.1f}%")

# the headline shares, to one decimal percent
for lab, expected in [
    (EntityLabel.DDF, 33.9),
    (EntityLabel.CHEMICAL, 11.7),
    (EntityLabel.MICROBIOME, 11.4),
    (EntityLabel.DRUG, 5.4),
    (EntityLabel.GENE, 3.5),
]:
    assert abs(report.shares[lab] * 100 - expected) <= 0.05
print("\nheadline shares match the reported distribution to 0.05 points")
