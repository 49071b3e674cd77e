"""
Scoring detections against ground truth
=======================================

Evaluation matches detections one-to-one with annotated text occurrences:
a detection counts when it lands inside the occurrence's frame span and
covers at least 85% of its box. From the matching follow recall,
precision and false alarm; classification adds identification rates.
"""

from vidtext.evaluate import (
    Detection,
    GroundTruthRegion,
    detection_metrics,
    evaluate,
    match_detections,
)
from vidtext.geometry import Box

# ---------------------------------------------------------------------------
# 1. Ground truth: three annotated occurrences of two classes.
# ---------------------------------------------------------------------------
truths = [
    GroundTruthRegion(first_frame=10, last_frame=40, box=Box(20, 20, 40, 20), class_id="banner"),
    GroundTruthRegion(first_frame=80, last_frame=120, box=Box(20, 20, 40, 20), class_id="banner"),
    GroundTruthRegion(first_frame=50, last_frame=70, box=Box(20, 60, 50, 16), class_id="caption"),
]

# ---------------------------------------------------------------------------
# 2. Detections: the first two occurrences were found (one with a slightly
#    smaller box — still >= 85% coverage), the caption was missed, and one
#    detection is plain wrong.
# ---------------------------------------------------------------------------
detections = [
    Detection(frame=12, box=Box(20, 20, 40, 20), class_id="banner"),
    Detection(frame=85, box=Box(20, 21, 40, 18), class_id="banner"),  # 90% coverage
    Detection(frame=30, box=Box(200, 200, 30, 10), class_id="banner"),  # false alarm
]

corr = match_detections(detections, truths)
print(f"matches: {corr.matches}")
print(f"false detections (indices): {corr.false_detections}")
print(f"missed occurrences (indices): {corr.missed}")

recall, precision, false_alarm = detection_metrics(corr)
print(f"\nrecall {recall:.3f}  precision {precision:.3f}  false alarm {false_alarm:.3f}")

# ---------------------------------------------------------------------------
# 3. The full report also checks the assigned classes: a match only counts
#    as *identified* when the detection carries the right class label.
# ---------------------------------------------------------------------------
report = evaluate(detections, truths, classified=detections)
print(f"\nTxTI  (correctly identified / extracted) = {report.txti:.3f}")
print(f"TxTNI (not identified / extracted)        = {report.txtni:.3f}")
print(f"counts: {report.counts}")
