"""Domain types and corpus file I/O.

A corpus lives in line-delimited JSON files (UTF-8, one object per line):

* documents file: ``{doc_id, page_title, context_before, source_sentence,
  context_after}``
* claims file: ``{claim_id, doc_id, origin, text}`` -- file order defines
  claim order within each set
* annotations file: ``{claim_id, annotator_id, metric, value[, origin]}``

Claims are stored flat and grouped into :class:`ClaimSet` objects by
``(doc_id, origin)`` at load time, preserving file order. All types are
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError, IntegrityError, ParseError

GOLD_ORIGIN = "gold"

# Legal value range per annotation metric. Fluency and faithfulness are
# graded 0-3; the rest are binary judgments or checkboxes.
ANNOTATION_SCALES: Mapping[str, tuple[int, int]] = {
    "atomicity": (0, 1),
    "fluency": (0, 3),
    "decontextualization": (0, 1),
    "faithfulness": (0, 3),
    "focus_check": (0, 1),
    "coverage_check": (0, 1),
}

CHECKBOX_METRICS = ("focus_check", "coverage_check")


@dataclass(frozen=True, slots=True)
class Document:
    """A contextualized source text: page title plus up to three sentences."""

    doc_id: str
    page_title: str
    context_before: str
    source_sentence: str
    context_after: str

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise DataError("document requires a non-empty doc_id")
        if not self.source_sentence.strip():
            raise DataError(f"document {self.doc_id!r}: source_sentence is empty")


@dataclass(frozen=True, slots=True)
class Claim:
    """One declarative sentence, gold or model-extracted, tied to a document."""

    claim_id: str
    doc_id: str
    text: str
    origin: str

    def __post_init__(self) -> None:
        if not self.claim_id:
            raise DataError("claim requires a non-empty claim_id")
        if not self.text.strip():
            raise DataError(f"claim {self.claim_id!r}: text is empty")
        if not self.origin:
            raise DataError(f"claim {self.claim_id!r}: origin is empty")


@dataclass(frozen=True, slots=True)
class ClaimSet:
    """Ordered claims sharing one document and one origin.

    Gold sets must be non-empty; predicted sets may be empty (a model that
    produced nothing for a document).
    """

    doc_id: str
    origin: str
    claims: tuple[Claim, ...]

    def __post_init__(self) -> None:
        if not self.claims and self.origin == GOLD_ORIGIN:
            raise DataError(f"gold claim set for doc {self.doc_id!r} is empty")
        for claim in self.claims:
            if claim.doc_id != self.doc_id or claim.origin != self.origin:
                raise DataError(
                    f"claim {claim.claim_id!r} does not belong to set "
                    f"({self.doc_id!r}, {self.origin!r})"
                )

    def __len__(self) -> int:
        return len(self.claims)

    def texts(self) -> list[str]:
        return [c.text for c in self.claims]


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    """One human judgment of one claim by one annotator.

    ``origin`` names the model whose claim set the judgment was made
    against. It is required for coverage checkboxes (a gold claim can be
    judged against several models) and otherwise defaults to the origin of
    the referenced claim.
    """

    claim_id: str
    annotator_id: str
    metric: str
    value: int
    origin: str | None = None

    def __post_init__(self) -> None:
        if self.metric not in ANNOTATION_SCALES:
            raise DataError(
                f"unknown annotation metric {self.metric!r}; "
                f"expected one of {sorted(ANNOTATION_SCALES)}"
            )
        lo, hi = ANNOTATION_SCALES[self.metric]
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise DataError(f"annotation value for {self.metric} must be an integer")
        if not lo <= self.value <= hi:
            raise DataError(
                f"annotation value {self.value} out of range for {self.metric} "
                f"(legal: {lo}..{hi})"
            )
        if not self.annotator_id:
            raise DataError("annotation requires a non-empty annotator_id")


@dataclass(frozen=True)
class EvaluationReport:
    """Per-model metric means over a corpus: one leaderboard row."""

    origin: str
    metric_means: Mapping[str, float]
    n_documents: int
    n_claims: int

    def __post_init__(self) -> None:
        for name, value in self.metric_means.items():
            if not 0.0 <= value <= 1.0:
                raise DataError(f"mean for {name!r} out of [0, 1]: {value}")
        if self.n_documents < 0 or self.n_claims < 0:
            raise DataError("report counts must be non-negative")


def document_text(doc: Document) -> str:
    """Serialize a document to the canonical premise string.

    Title and sentences are trimmed and joined with single spaces; empty
    parts are skipped. This exact string is what faithfulness and
    decontextualization backends receive as context.
    """
    parts = (doc.page_title, doc.context_before, doc.source_sentence, doc.context_after)
    return " ".join(p.strip() for p in parts if p.strip())


# ---------------------------------------------------------------------------
# line-delimited JSON plumbing


def _iter_records(path: str | Path) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, record


def _require(record: dict, key: str, path: Path | str, lineno: int) -> object:
    if key not in record:
        raise ParseError(f"{path}:{lineno}: missing key {key!r}")
    return record[key]


def _require_str(record: dict, key: str, path: Path | str, lineno: int) -> str:
    value = _require(record, key, path, lineno)
    if not isinstance(value, str):
        raise ParseError(f"{path}:{lineno}: key {key!r} must be a string")
    return value


def _dump_line(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# loading


def load_documents(path: str | Path) -> list[Document]:
    """Load a documents file, enforcing doc_id uniqueness."""
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, record in _iter_records(path):
        try:
            doc = Document(
                doc_id=_require_str(record, "doc_id", path, lineno),
                page_title=_require_str(record, "page_title", path, lineno),
                context_before=_require_str(record, "context_before", path, lineno),
                source_sentence=_require_str(record, "source_sentence", path, lineno),
                context_after=_require_str(record, "context_after", path, lineno),
            )
        except ParseError:
            raise
        except DataError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if doc.doc_id in seen:
            raise IntegrityError(f"{path}:{lineno}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def group_claims(claims: Sequence[Claim]) -> list[ClaimSet]:
    """Group flat claims into sets by (doc_id, origin), preserving order.

    The grouping partitions the input: no claim is lost or duplicated.
    """
    grouped: dict[tuple[str, str], list[Claim]] = {}
    for claim in claims:
        grouped.setdefault((claim.doc_id, claim.origin), []).append(claim)
    return [
        ClaimSet(doc_id=doc_id, origin=origin, claims=tuple(members))
        for (doc_id, origin), members in grouped.items()
    ]


def load_claims(path: str | Path, documents: Iterable[Document]) -> list[ClaimSet]:
    """Load a claims file and group it into claim sets.

    Raises an integrity error listing every claim that references a missing
    document, and on duplicate claim ids.
    """
    doc_ids = {d.doc_id for d in documents}
    claims: list[Claim] = []
    seen: set[str] = set()
    dangling: list[str] = []
    for lineno, record in _iter_records(path):
        try:
            claim = Claim(
                claim_id=_require_str(record, "claim_id", path, lineno),
                doc_id=_require_str(record, "doc_id", path, lineno),
                text=_require_str(record, "text", path, lineno),
                origin=_require_str(record, "origin", path, lineno),
            )
        except ParseError:
            raise
        except DataError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if claim.claim_id in seen:
            raise IntegrityError(f"{path}:{lineno}: duplicate claim_id {claim.claim_id!r}")
        seen.add(claim.claim_id)
        if claim.doc_id not in doc_ids:
            dangling.append(f"{claim.claim_id!r} -> {claim.doc_id!r}")
        claims.append(claim)
    if dangling:
        raise IntegrityError(
            "claims reference missing documents: " + ", ".join(dangling)
        )
    return group_claims(claims)


def load_corpus(
    documents_path: str | Path, claims_path: str | Path
) -> tuple[list[Document], list[ClaimSet]]:
    """Load and link a corpus: documents plus grouped claim sets."""
    documents = load_documents(documents_path)
    claim_sets = load_claims(claims_path, documents)
    return documents, claim_sets


def load_annotations(
    path: str | Path, claims: Iterable[Claim] | Mapping[str, Claim]
) -> list[AnnotationRecord]:
    """Load annotation records, validated against the corpus claims.

    Rejects out-of-range grades, unknown metrics, references to unknown
    claims, and duplicate (claim, annotator, metric, origin) keys. Coverage
    checkboxes sit on gold claims and must carry the judged model in
    ``origin``; focus checkboxes sit on predicted claims.
    """
    if isinstance(claims, Mapping):
        by_id = dict(claims)
    else:
        by_id = {c.claim_id: c for c in claims}
    records: list[AnnotationRecord] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, record in _iter_records(path):
        value = _require(record, "value", path, lineno)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError(f"{path}:{lineno}: key 'value' must be an integer")
        origin = record.get("origin")
        if origin is not None and not isinstance(origin, str):
            raise ParseError(f"{path}:{lineno}: key 'origin' must be a string")
        try:
            ann = AnnotationRecord(
                claim_id=_require_str(record, "claim_id", path, lineno),
                annotator_id=_require_str(record, "annotator_id", path, lineno),
                metric=_require_str(record, "metric", path, lineno),
                value=value,
                origin=origin,
            )
        except ParseError:
            raise
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        claim = by_id.get(ann.claim_id)
        if claim is None:
            raise IntegrityError(
                f"{path}:{lineno}: annotation references unknown claim {ann.claim_id!r}"
            )
        if ann.metric == "coverage_check":
            if claim.origin != GOLD_ORIGIN:
                raise DataError(
                    f"{path}:{lineno}: coverage_check must reference a gold claim"
                )
            if ann.origin is None:
                raise DataError(
                    f"{path}:{lineno}: coverage_check requires an 'origin' naming "
                    "the judged model"
                )
        else:
            if ann.metric == "focus_check" and claim.origin == GOLD_ORIGIN:
                raise DataError(
                    f"{path}:{lineno}: focus_check must reference a predicted claim"
                )
            if ann.origin is not None and ann.origin != claim.origin:
                raise DataError(
                    f"{path}:{lineno}: annotation origin {ann.origin!r} does not "
                    f"match claim origin {claim.origin!r}"
                )
        key = (ann.claim_id, ann.annotator_id, ann.metric, effective_origin(ann, claim))
        if key in seen:
            raise IntegrityError(
                f"{path}:{lineno}: duplicate annotation for {key}"
            )
        seen.add(key)
        records.append(ann)
    return records


def effective_origin(record: AnnotationRecord, claim: Claim) -> str:
    """The model a record judges: explicit origin, else the claim's own."""
    return record.origin if record.origin is not None else claim.origin


# ---------------------------------------------------------------------------
# writing (canonical form: sorted keys, UTF-8, one record per line)


def write_documents(path: str | Path, documents: Iterable[Document]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for doc in documents:
            handle.write(
                _dump_line(
                    {
                        "doc_id": doc.doc_id,
                        "page_title": doc.page_title,
                        "context_before": doc.context_before,
                        "source_sentence": doc.source_sentence,
                        "context_after": doc.context_after,
                    }
                )
            )


def write_claims(path: str | Path, claim_sets: Iterable[ClaimSet]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for claim_set in claim_sets:
            for claim in claim_set.claims:
                handle.write(
                    _dump_line(
                        {
                            "claim_id": claim.claim_id,
                            "doc_id": claim.doc_id,
                            "origin": claim.origin,
                            "text": claim.text,
                        }
                    )
                )


def write_annotations(path: str | Path, records: Iterable[AnnotationRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in records:
            payload = {
                "claim_id": record.claim_id,
                "annotator_id": record.annotator_id,
                "metric": record.metric,
                "value": record.value,
            }
            if record.origin is not None:
                payload["origin"] = record.origin
            handle.write(_dump_line(payload))


def write_corpus(
    documents_path: str | Path,
    claims_path: str | Path,
    documents: Iterable[Document],
    claim_sets: Iterable[ClaimSet],
) -> None:
    write_documents(documents_path, documents)
    write_claims(claims_path, claim_sets)
