"""Shared randomized-corpus factories.

The word pool is deliberately non-ASCII heavy (Greek, CJK, an astral
emoji): offsets are Unicode code points, so any byte- or UTF-16-based
arithmetic in the code under test fails these corpora immediately.
"""

from __future__ import annotations

import random
from pathlib import Path

from bionerkit import (
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    LABELS,
    Location,
    to_combined_document,
)
from bionerkit.io import CorpusFile, Provenance

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


WORDS = (
    "gut",
    "microbiome",
    "patients",
    "IL-6",
    "TNF-α",
    "β-glucan",
    "levels",
    "署",
    "🦠",
    "mice",
    "diet",
    "bacteria",
    "improved",
    "NS9",
    "curcumin",
    "dysbiosis",
    "Akkermansia",
    "µg",
    "anxiety",
    "cohort",
)


def random_text(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_words))


def random_document(rng: random.Random, doc_id: str) -> Document:
    title = random_text(rng, rng.randint(2, 6)).capitalize() + "."
    sentences = [
        random_text(rng, rng.randint(3, 8)).capitalize() + "." for _ in range(rng.randint(1, 3))
    ]
    return Document(doc_id, title, " ".join(sentences))


def random_mention(rng: random.Random, doc: Document) -> EntityMention:
    """A valid per-field mention: a non-empty slice of one of the fields."""
    location = rng.choice((Location.TITLE, Location.ABSTRACT))
    field = doc.title if location is Location.TITLE else doc.abstract
    start = rng.randrange(len(field))
    end = rng.randint(start + 1, min(len(field), start + rng.randint(1, 12)))
    return EntityMention(
        start,
        end,
        field[start:end],
        rng.choice(LABELS),
        location,
    )


def random_annotated(
    rng: random.Random,
    doc_id: str,
    *,
    max_mentions: int = 8,
    scored: bool = False,
) -> AnnotatedDocument:
    doc = random_document(rng, doc_id)
    mentions = []
    for _ in range(rng.randint(0, max_mentions)):
        m = random_mention(rng, doc)
        if scored:
            m = EntityMention(
                m.start_idx, m.end_idx, m.text_span, m.label, m.location, round(rng.random(), 3)
            )
        mentions.append(m)
    return AnnotatedDocument(doc, mentions, CoordinateSpace.PER_FIELD)


def random_corpus(
    rng: random.Random,
    *,
    provenance: Provenance = Provenance.GOLD,
    max_docs: int = 6,
    max_mentions: int = 8,
    joiner: str = " ",
) -> CorpusFile:
    scored = provenance is Provenance.PREDICTION
    docs = {}
    for i in range(rng.randint(1, max_docs)):
        doc_id = f"d{i}"
        docs[doc_id] = random_annotated(rng, doc_id, max_mentions=max_mentions, scored=scored)
    return CorpusFile(docs, provenance, CoordinateSpace.PER_FIELD, joiner)


def _perturb(rng: random.Random, m: EntityMention, doc: Document) -> EntityMention:
    """Turn a gold mention into a near-miss prediction."""
    kind = rng.randrange(3)
    if kind == 0:
        label = rng.choice([lab for lab in LABELS if lab is not m.label])
        return EntityMention(m.start_idx, m.end_idx, m.text_span, label, m.location)
    field = doc.title if m.location is Location.TITLE else doc.abstract
    if kind == 1 and m.end_idx < len(field):
        return EntityMention(
            m.start_idx, m.end_idx + 1, field[m.start_idx : m.end_idx + 1], m.label, m.location
        )
    return random_mention(rng, doc)


def random_gold_pred_pair(
    rng: random.Random, *, max_docs: int = 20, max_mentions: int = 30
) -> tuple[CorpusFile, CorpusFile]:
    """A gold corpus and a prediction corpus over the same documents.

    Predictions mix exact copies, near-misses, duplicates, and spurious
    mentions so every matcher branch (tp, fp, fn, duplicate collapse)
    gets traffic.
    """
    gold_docs = {}
    pred_docs = {}
    for i in range(rng.randint(1, max_docs)):
        doc_id = f"d{i}"
        annotated = random_annotated(rng, doc_id, max_mentions=max_mentions)
        doc = annotated.document
        predicted = []
        for m in annotated.mentions:
            roll = rng.random()
            if roll < 0.5:
                predicted.append(m)
                if rng.random() < 0.15:
                    predicted.append(m)  # duplicate prediction of one gold span
            elif roll < 0.8:
                predicted.append(_perturb(rng, m, doc))
        for _ in range(rng.randint(0, 3)):
            predicted.append(random_mention(rng, doc))
        rng.shuffle(predicted)
        gold_docs[doc_id] = annotated
        pred_docs[doc_id] = AnnotatedDocument(doc, predicted, CoordinateSpace.PER_FIELD)
    return (
        CorpusFile(gold_docs, Provenance.GOLD, CoordinateSpace.PER_FIELD, " "),
        CorpusFile(pred_docs, Provenance.PREDICTION, CoordinateSpace.PER_FIELD, " "),
    )


def as_combined(corpus: CorpusFile) -> CorpusFile:
    docs = {
        doc_id: to_combined_document(doc, corpus.joiner) for doc_id, doc in corpus.documents.items()
    }
    return CorpusFile(docs, corpus.provenance, CoordinateSpace.COMBINED, corpus.joiner)


# Text with every post-processing trigger: trivial spans, lexicon terms
# in correctable source labels, adjacent same-label fragments.
TRIGGER_SPANS = (
    ("bacteria", EntityLabel.BACTERIA),  # trivial: span equals its label
    ("IL-6", EntityLabel.CHEMICAL),  # gene lexicon routes chemical -> gene
    ("TNF-α", EntityLabel.CHEMICAL),
    ("DJ-1", EntityLabel.GENE),  # chemical lexicon routes gene -> chemical
    ("NNSs", EntityLabel.DIETARY_SUPPLEMENT),  # food lexicon
    ("NS9", EntityLabel.FOOD),  # dietary-supplement lexicon
    ("Dietary Supplement", EntityLabel.DIETARY_SUPPLEMENT),  # trivial after normalizing
)


def random_pipeline_corpus(rng: random.Random, *, max_docs: int = 6) -> CorpusFile:
    """Scored predictions whose text embeds rule triggers."""
    docs = {}
    for i in range(rng.randint(1, max_docs)):
        doc_id = f"d{i}"
        words = [rng.choice(WORDS) for _ in range(rng.randint(4, 10))]
        triggers = rng.sample(TRIGGER_SPANS, rng.randint(0, 4))
        for span, _ in triggers:
            words.insert(rng.randrange(len(words) + 1), span)
        title = " ".join(words[:3]) + "."
        abstract = " ".join(words[3:]) + "."
        doc = Document(doc_id, title, abstract)
        mentions = []
        for span, label in triggers:
            for location, field in ((Location.TITLE, title), (Location.ABSTRACT, abstract)):
                at = field.find(span)
                if at >= 0:
                    mentions.append(
                        EntityMention(at, at + len(span), span, label, location, round(rng.random(), 3))
                    )
                    break
        for _ in range(rng.randint(0, 4)):
            m = random_mention(rng, doc)
            mentions.append(
                EntityMention(
                    m.start_idx, m.end_idx, m.text_span, m.label, m.location, round(rng.random(), 3)
                )
            )
        rng.shuffle(mentions)
        docs[doc_id] = AnnotatedDocument(doc, mentions, CoordinateSpace.PER_FIELD)
    return CorpusFile(docs, Provenance.PREDICTION, CoordinateSpace.PER_FIELD, " ")
