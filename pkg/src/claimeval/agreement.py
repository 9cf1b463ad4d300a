"""Inter-annotator agreement coefficients over sparse annotation matrices.

Three statistics are reported per metric, mirroring the usual agreement
table layout:

* %-agreement: share of multiply-annotated items with unanimous labels
* Krippendorff's alpha (nominal), via the coincidence-matrix construction
  with expected disagreement taken from pooled label proportions
* Gwet's AC1, designed to stay meaningful under heavy class prevalence

alpha punishes chance agreement aggressively and can go strongly negative
on high-prevalence data where AC1 and %-agreement both stay high. Undefined
coefficients (no expected disagreement) surface as None, never as a
sentinel number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

import numpy as np

from .data import ANNOTATION_SCALES, AnnotationRecord, Claim, effective_origin
from .errors import DataError

Label = Hashable


@dataclass(frozen=True)
class AnnotationMatrix:
    """Sparse item x annotator label matrix with a fixed category alphabet.

    Missing cells are simply absent from ``labels``. Every listed item must
    carry at least one label, and every occurring label must be in
    ``categories`` (the alphabet may be larger than what occurs, e.g. the
    full grading scale).
    """

    items: tuple[str, ...]
    annotators: tuple[str, ...]
    labels: Mapping[tuple[str, str], Label]
    categories: tuple[Label, ...]

    def __post_init__(self) -> None:
        if len(set(self.items)) != len(self.items):
            raise DataError("duplicate item ids in annotation matrix")
        if len(set(self.categories)) != len(self.categories):
            raise DataError("duplicate categories in annotation matrix")
        known_items = set(self.items)
        known_annotators = set(self.annotators)
        known_categories = set(self.categories)
        labelled: set[str] = set()
        for (item, annotator), label in self.labels.items():
            if item not in known_items:
                raise DataError(f"label for unknown item {item!r}")
            if annotator not in known_annotators:
                raise DataError(f"label for unknown annotator {annotator!r}")
            if label not in known_categories:
                raise DataError(f"label {label!r} outside category alphabet")
            labelled.add(item)
        missing = known_items - labelled
        if missing:
            raise DataError(f"items without any label: {sorted(missing)[:5]}")

    def item_labels(self, item: str) -> list[Label]:
        return [
            self.labels[(item, annotator)]
            for annotator in self.annotators
            if (item, annotator) in self.labels
        ]


def matrix_from_records(
    records: Iterable[AnnotationRecord],
    metric: str,
    claims: Mapping[str, Claim] | None = None,
) -> AnnotationMatrix:
    """Build the pooled agreement matrix for one metric.

    Checkbox metrics are judged per model, so their item identity is
    (claim, judged origin); grade metrics use the claim alone. The category
    alphabet is the metric's full legal scale.
    """
    if metric not in ANNOTATION_SCALES:
        raise DataError(f"unknown annotation metric {metric!r}")
    lo, hi = ANNOTATION_SCALES[metric]
    items: list[str] = []
    annotators: list[str] = []
    labels: dict[tuple[str, str], Label] = {}
    for record in sorted(
        (r for r in records if r.metric == metric),
        key=lambda r: (r.claim_id, r.origin or "", r.annotator_id),
    ):
        origin = record.origin
        if origin is None and claims is not None and record.claim_id in claims:
            origin = effective_origin(record, claims[record.claim_id])
        item = record.claim_id if metric not in ("focus_check", "coverage_check") else (
            f"{record.claim_id}@{origin or ''}"
        )
        if item not in items:
            items.append(item)
        if record.annotator_id not in annotators:
            annotators.append(record.annotator_id)
        labels[(item, record.annotator_id)] = record.value
    if not items:
        raise DataError(f"no annotation records for metric {metric!r}")
    return AnnotationMatrix(
        items=tuple(items),
        annotators=tuple(annotators),
        labels=labels,
        categories=tuple(range(lo, hi + 1)),
    )


def percent_agreement(matrix: AnnotationMatrix) -> float:
    """Share of multiply-annotated items whose labels are unanimous.

    Items carrying a single label are excluded from both counts.
    """
    multi = [
        labels
        for item in matrix.items
        if len(labels := matrix.item_labels(item)) >= 2
    ]
    if not multi:
        raise DataError("percent agreement requires at least one item with >=2 labels")
    unanimous = sum(1 for labels in multi if len(set(labels)) == 1)
    return unanimous / len(multi)


def _label_count_rows(matrix: AnnotationMatrix, min_labels: int) -> np.ndarray:
    """Per-item label counts as an items x categories array."""
    index = {c: i for i, c in enumerate(matrix.categories)}
    rows = []
    for item in matrix.items:
        labels = matrix.item_labels(item)
        if len(labels) < min_labels:
            continue
        row = np.zeros(len(matrix.categories), dtype=np.float64)
        for label in labels:
            row[index[label]] += 1.0
        rows.append(row)
    if not rows:
        raise DataError(f"no items with >= {min_labels} labels")
    return np.asarray(rows)


def krippendorff_alpha(matrix: AnnotationMatrix) -> float | None:
    """Nominal-scale alpha = 1 - D_o / D_e over the coincidence matrix.

    Each item with m >= 2 labels contributes its ordered label pairs,
    weighted 1/(m-1), to the coincidence matrix; D_o sums its off-diagonal
    mass. D_e is the off-diagonal mass expected from the pooled label
    proportions (sum over c != k of n_c * n_k / n). Returns None when every
    pairable label is identical corpus-wide (D_e = 0); perfect agreement
    over >= 2 occurring categories scores exactly 1, and systematic
    disagreement between two annotators scores down to -1.
    """
    counts = _label_count_rows(matrix, min_labels=2)
    if counts.sum() < 2:
        raise DataError("alpha requires at least two pairable labels")
    q = len(matrix.categories)
    coincidence = np.zeros((q, q), dtype=np.float64)
    for row in counts:
        m = row.sum()
        coincidence += (np.outer(row, row) - np.diag(row)) / (m - 1.0)
    marginals = coincidence.sum(axis=1)
    total = marginals.sum()
    observed = coincidence.sum() - np.trace(coincidence)
    expected = (np.outer(marginals, marginals).sum() - (marginals**2).sum()) / total
    if expected == 0.0:
        return None
    return float(1.0 - observed / expected)


def gwet_ac1(matrix: AnnotationMatrix) -> float | None:
    """Gwet's first-order agreement coefficient (P_a - P_e) / (1 - P_e).

    P_a is the mean pairwise agreement over items with >= 2 labels; the
    chance term uses pi_k, the mean label share over ALL items, with
    P_e = sum_k pi_k (1 - pi_k) / (Q - 1). Returns None when P_e = 1.
    """
    q = len(matrix.categories)
    if q < 2:
        raise DataError("AC1 requires a category alphabet of size >= 2")
    multi = _label_count_rows(matrix, min_labels=2)
    sizes = multi.sum(axis=1)
    pa = float(np.mean((multi * (multi - 1)).sum(axis=1) / (sizes * (sizes - 1))))
    all_rows = _label_count_rows(matrix, min_labels=1)
    pi = (all_rows / all_rows.sum(axis=1, keepdims=True)).mean(axis=0)
    pe = float((pi * (1.0 - pi)).sum() / (q - 1))
    if pe == 1.0:
        return None
    return float((pa - pe) / (1.0 - pe))


AGREEMENT_COEFFICIENTS = ("krippendorff_alpha", "gwet_ac1", "percent_agreement")


def coefficient_table(
    matrices: Mapping[str, AnnotationMatrix]
) -> dict[str, dict[str, float | None]]:
    """All three coefficients for each metric's matrix; None marks undefined."""
    table: dict[str, dict[str, float | None]] = {}
    for metric, matrix in matrices.items():
        row: dict[str, float | None] = {}
        for name, fn in (
            ("krippendorff_alpha", krippendorff_alpha),
            ("gwet_ac1", gwet_ac1),
            ("percent_agreement", percent_agreement),
        ):
            try:
                row[name] = fn(matrix)
            except DataError:
                row[name] = None
        table[metric] = row
    return table
