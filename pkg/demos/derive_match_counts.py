"""
Recovering match counts from a published score table
====================================================

Reported NER results usually give micro precision/recall/F1 to four
decimal places but not the underlying tp/fp/fn. When the gold mention
total is known, the integers can be recovered: tp = round(R * gold),
predicted total = round(tp / P). This script derives the counts for two
score rows over a 1117-mention gold set and confirms the round trip.
"""

from bionerkit.evaluation import invert_micro_counts, micro_scores

GOLD_TOTAL = 1117

ROWS = [
    ("baseline run ", 0.7390, 0.8389, 0.7857),
    ("finetuned run", 0.7847, 0.8845, 0.8316),
]

for name, precision, recall, f1 in ROWS:
    counts = invert_micro_counts(precision, recall, GOLD_TOTAL)

    # show the algebra, not just the answer
    tp = round(recall * GOLD_TOTAL)
    predicted_total = round(tp / precision)
    print(f"{name}: P={precision:.4f} R={recall:.4f} F1={f1:.4f}")
    print(f"  tp   = round({recall:.4f} * {GOLD_TOTAL}) = {tp}")
    print(f"  pred = round({tp} / {precision:.4f}) = {predicted_total}"
          f"  ->  fp = {predicted_total - tp}")
    print(f"  fn   = {GOLD_TOTAL} - {tp} = {GOLD_TOTAL - tp}")
    assert (counts.tp, counts.fp, counts.fn) == (tp, predicted_total - tp, GOLD_TOTAL - tp)

    # the recovered counts reproduce the published scores
    scores = micro_scores(counts)
    print(f"  check: P={scores.precision:.4f} R={scores.recall:.4f} F1={scores.f1:.4f}")
    assert abs(scores.precision - precision) <= 5e-4
    assert abs(scores.recall - recall) <= 5e-4
    assert abs(scores.f1 - f1) <= 5e-4
    print()

print("both rows invert exactly and round-trip within 0.0005")
