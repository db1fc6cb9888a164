"""
Training a CRF tagger and reading back its predictions
======================================================

A linear-chain CRF over hand-built token features can memorise a small
corpus exactly, which makes a twenty-sentence training set a quick
end-to-end check of the whole loop: encode gold spans as BIO tags, fit
by full-batch gradient ascent, decode with Viterbi, and recover the
original spans. The same file drives the train-crf acceptance check.
"""

from pathlib import Path

from bionerkit import to_combined_document
from bionerkit.crf.model import TrainConfig, predict_spans, train
from bionerkit.io import read_corpus

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "overfit_train.json"

# ---- twenty one-sentence documents, each with one unambiguous mention
corpus = read_corpus(FIXTURE)
docs = list(corpus.documents.values())
print(f"training on {len(docs)} documents, {sum(len(d.mentions) for d in docs)} mentions")

# ---- no regularisation: the goal here is to memorise, not generalise
config = TrainConfig(l2_strength=0.0, max_iterations=200, tolerance=1e-6)
model = train(docs, config, joiner=corpus.joiner)
print(f"stopped after {model.meta['iterations']} iterations,"
      f" objective {model.meta['objective']:.6f}")

# ---- tag every training document and compare spans against gold
recovered = 0
for doc in docs:
    combined = to_combined_document(doc, corpus.joiner)
    gold = {(m.start_idx, m.end_idx, m.label) for m in combined.mentions}
    pred = predict_spans(model, doc.document, joiner=corpus.joiner)
    got = {(m.start_idx, m.end_idx, m.label) for m in pred.mentions}
    recovered += gold == got

print(f"{recovered}/{len(docs)} documents tagged exactly as annotated")
assert recovered == len(docs)
