"""Reference-based multi-claim metrics: focus, coverage, redundancy, F_fact.

Claims in a set are concatenated into a mock-document premise, which
reduces every set-level question to independent claim-vs-premise alignment
calls:

* focus(G, C)    = mean over c in C of align(concat(G), c)
* coverage(G, C) = focus(C, G)                      (argument swap)
* redundancy(C)  = mean over c in C of align(concat(C \\ c), c)
* F_fact         = harmonic mean of focus and coverage

Claimwise variants expose the per-claim contributions as probabilities.
Concatenation order is claim-set order, which makes runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .backends import PairScorer
from .data import Claim, ClaimSet
from .errors import DataError

_TERMINAL_PUNCTUATION = (".", "!", "?")


@dataclass(frozen=True)
class SetScores:
    """Set-level scores for one (document, origin) pair.

    redundancy is None when the predicted set has fewer than two claims
    (reported as absent, never as 0). no_prediction marks documents the
    model produced nothing for; their focus/coverage/f_fact are zeroed so
    aggregate means stay the plain means of the emitted rows.
    """

    doc_id: str
    origin: str
    focus: float
    coverage: float
    f_fact: float
    redundancy: float | None
    claimwise_focus: Mapping[str, float] = field(default_factory=dict)
    claimwise_coverage: Mapping[str, float] = field(default_factory=dict)
    no_prediction: bool = False


def _clamp01(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def _concat_texts(texts: Sequence[str]) -> str:
    return " ".join(
        t if t.rstrip().endswith(_TERMINAL_PUNCTUATION) else t.rstrip() + "."
        for t in texts
    )


def concat_claims(claim_set: ClaimSet | Sequence[Claim]) -> str:
    """Join claim texts into a mock-document, in set order.

    Each claim is guaranteed sentence-final punctuation (a period is
    appended when missing). Empty sets are an error; the caller decides
    what an empty premise means.
    """
    claims = claim_set.claims if isinstance(claim_set, ClaimSet) else tuple(claim_set)
    if not claims:
        raise DataError("cannot concatenate an empty claim set")
    return _concat_texts([c.text for c in claims])


def claimwise_focus(gold: ClaimSet, claim: Claim, aligner: PairScorer) -> float:
    """Alignment of one predicted claim against the gold concatenation."""
    if not gold.claims:
        raise DataError(f"focus requires a non-empty gold claim set (doc {gold.doc_id!r})")
    return _clamp01(aligner.score(concat_claims(gold), claim.text))


def focus(gold: ClaimSet, predicted: ClaimSet, aligner: PairScorer) -> float:
    """Precision-like share of predicted information present in gold."""
    if not gold.claims:
        raise DataError(f"focus requires a non-empty gold claim set (doc {gold.doc_id!r})")
    if not predicted.claims:
        raise DataError(
            f"focus is undefined for an empty predicted claim set (doc {predicted.doc_id!r})"
        )
    premise = concat_claims(gold)
    values = [_clamp01(aligner.score(premise, c.text)) for c in predicted.claims]
    return sum(values) / len(values)


def coverage(gold: ClaimSet, predicted: ClaimSet, aligner: PairScorer) -> float:
    """Recall-like share of gold information present in the predictions.

    Exactly focus with the arguments swapped, bit for bit.
    """
    if not predicted.claims:
        raise DataError(
            f"coverage is undefined for an empty predicted claim set (doc {predicted.doc_id!r})"
        )
    if not gold.claims:
        raise DataError(f"coverage requires a non-empty gold claim set (doc {gold.doc_id!r})")
    return focus(predicted, gold, aligner)


def claimwise_coverage(gold_claim: Claim, predicted: ClaimSet, aligner: PairScorer) -> float:
    """Alignment of one gold claim against the predicted concatenation."""
    if not predicted.claims:
        raise DataError(
            f"claimwise coverage is undefined for an empty predicted claim set "
            f"(doc {predicted.doc_id!r})"
        )
    return _clamp01(aligner.score(concat_claims(predicted), gold_claim.text))


def redundancy(predicted: ClaimSet, aligner: PairScorer) -> float | None:
    """Share of predicted claims expressible from the remaining claims.

    Needs at least two claims; smaller sets return None (not computable).
    """
    claims = predicted.claims
    if len(claims) < 2:
        return None
    values = []
    for i, claim in enumerate(claims):
        premise = _concat_texts([c.text for j, c in enumerate(claims) if j != i])
        values.append(_clamp01(aligner.score(premise, claim.text)))
    return sum(values) / len(values)


def f_fact(foc: float, cov: float) -> float:
    """Harmonic mean of focus and coverage; 0 when both are 0."""
    if not 0.0 <= foc <= 1.0 or not 0.0 <= cov <= 1.0:
        raise DataError(f"f_fact inputs must lie in [0, 1]: got ({foc}, {cov})")
    total = foc + cov
    if total == 0.0:
        return 0.0
    return 2.0 * foc * cov / total


def score_set(
    gold: ClaimSet,
    predicted: ClaimSet,
    aligner: PairScorer,
    toss_non_decontextualized: bool = False,
    decontext_flags: Mapping[str, int] | None = None,
) -> SetScores:
    """Compute all set-level metrics for one (document, origin) pair.

    focus/coverage are the exact means of the claimwise maps. With
    toss_non_decontextualized, predicted claims flagged 0 in
    decontext_flags are dropped from predicted-side concatenation premises
    (coverage and redundancy); they are still scored for focus. If every
    claim is tossed the coverage side scores 0.
    """
    if gold.doc_id != predicted.doc_id:
        raise DataError(
            f"gold and predicted sets disagree on document: "
            f"{gold.doc_id!r} vs {predicted.doc_id!r}"
        )
    cw_focus = {c.claim_id: claimwise_focus(gold, c, aligner) for c in predicted.claims}
    if not cw_focus:
        raise DataError(
            f"cannot score an empty predicted claim set (doc {predicted.doc_id!r})"
        )

    premise_claims: Sequence[Claim] = predicted.claims
    if toss_non_decontextualized:
        flags = decontext_flags or {}
        premise_claims = [c for c in predicted.claims if flags.get(c.claim_id, 1) == 1]

    if premise_claims:
        premise = _concat_texts([c.text for c in premise_claims])
        cw_coverage = {
            g.claim_id: _clamp01(aligner.score(premise, g.text)) for g in gold.claims
        }
    else:
        cw_coverage = {g.claim_id: 0.0 for g in gold.claims}

    foc = sum(cw_focus.values()) / len(cw_focus)
    cov = sum(cw_coverage.values()) / len(cw_coverage)

    red: float | None = None
    if len(premise_claims) >= 2:
        red_values = []
        for i, claim in enumerate(premise_claims):
            others = _concat_texts([c.text for j, c in enumerate(premise_claims) if j != i])
            red_values.append(_clamp01(aligner.score(others, claim.text)))
        red = sum(red_values) / len(red_values)

    return SetScores(
        doc_id=predicted.doc_id,
        origin=predicted.origin,
        focus=foc,
        coverage=cov,
        f_fact=f_fact(foc, cov),
        redundancy=red,
        claimwise_focus=cw_focus,
        claimwise_coverage=cw_coverage,
    )


def empty_prediction_scores(doc_id: str, origin: str, gold: ClaimSet | None = None) -> SetScores:
    """Zero-filled scores for a document a model produced no claims for."""
    cw_coverage = {g.claim_id: 0.0 for g in gold.claims} if gold is not None else {}
    return SetScores(
        doc_id=doc_id,
        origin=origin,
        focus=0.0,
        coverage=0.0,
        f_fact=0.0,
        redundancy=None,
        claimwise_focus={},
        claimwise_coverage=cw_coverage,
        no_prediction=True,
    )


def mean(values: Iterable[float]) -> float:
    """Plain arithmetic mean; raises on empty input."""
    items = list(values)
    if not items:
        raise DataError("mean of an empty sequence")
    return sum(items) / len(items)
