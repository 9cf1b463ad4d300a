"""Statistics for validating automated metrics against human annotations.

Human grades are aggregated per claim by majority (ties broken toward the
lower, stricter grade) and binarized: the top of the metric's scale maps
to 1, everything else to 0. Binary agreement is summarized with F1 (class
imbalance makes accuracy useless here), continuous agreement with RMSE,
and probabilistic claimwise scores with the Brier score.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Mapping

from .data import ANNOTATION_SCALES, AnnotationRecord
from .errors import DataError


def majority_label(values: Iterable[int]) -> int:
    """Most frequent value; ties resolve to the lowest candidate."""
    counts = Counter(values)
    if not counts:
        raise DataError("majority of an empty label list")
    best = max(counts.values())
    return min(v for v, n in counts.items() if n == best)


def binarize_grades(
    records: Iterable[AnnotationRecord], metric: str
) -> dict[str, int]:
    """Per-claim binary labels for one metric: top grade -> 1, rest -> 0.

    Records of other metrics are ignored; claims without records are
    omitted from the output.
    """
    if metric not in ANNOTATION_SCALES:
        raise DataError(f"unknown annotation metric {metric!r}")
    top = ANNOTATION_SCALES[metric][1]
    per_claim: dict[str, list[int]] = {}
    for record in records:
        if record.metric == metric:
            per_claim.setdefault(record.claim_id, []).append(record.value)
    return {
        claim_id: 1 if majority_label(values) == top else 0
        for claim_id, values in per_claim.items()
    }


def _shared_ids(pred: Mapping, gold: Mapping, what: str) -> list:
    shared = sorted(set(pred) & set(gold))
    if not shared:
        raise DataError(f"{what}: prediction and reference ids are disjoint")
    return shared


def f1_binary(pred: Mapping[str, int], gold: Mapping[str, int]) -> float:
    """F1 over the shared ids, positive class = 1.

    0.0 when there is no overlap between predicted and gold positives.
    """
    shared = _shared_ids(pred, gold, "f1")
    for mapping, name in ((pred, "pred"), (gold, "gold")):
        bad = [i for i in shared if mapping[i] not in (0, 1)]
        if bad:
            raise DataError(f"f1: non-binary {name} label for ids {bad[:5]}")
    tp = sum(1 for i in shared if pred[i] == 1 and gold[i] == 1)
    fp = sum(1 for i in shared if pred[i] == 1 and gold[i] == 0)
    fn = sum(1 for i in shared if pred[i] == 0 and gold[i] == 1)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rmse(pred: Mapping[str, float], gold: Mapping[str, float]) -> float:
    """Root mean squared error over the shared ids."""
    shared = _shared_ids(pred, gold, "rmse")
    return math.sqrt(sum((pred[i] - gold[i]) ** 2 for i in shared) / len(shared))


def brier(pred_prob: Mapping[str, float], outcome: Mapping[str, int]) -> float:
    """Mean squared error of probabilities against binary outcomes."""
    shared = _shared_ids(pred_prob, outcome, "brier")
    for i in shared:
        if not 0.0 <= pred_prob[i] <= 1.0:
            raise DataError(f"brier: probability out of [0, 1] for id {i!r}")
        if outcome[i] not in (0, 1):
            raise DataError(f"brier: outcome must be 0 or 1 for id {i!r}")
    return sum((pred_prob[i] - outcome[i]) ** 2 for i in shared) / len(shared)
