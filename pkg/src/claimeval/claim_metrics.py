"""Reference-free per-claim metrics.

Each generated claim is scored on its own against four criteria:

* atomicity: at most one undirected entity relation is extractable;
  also reported in a soft form 1 / max(1, |relations|)
* fluency: a grammar corrector cannot improve the claim (scribendi <= 0)
* decontextualization: a decontextualizing rewriter leaves the claim as-is
* faithfulness: alignment of the claim against the full document text

All four are pure given pure backends.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import (
    BackendSuite,
    Decontextualizer,
    GrammarCorrector,
    PairScorer,
    PerplexityScorer,
    RelationExtractor,
)
from .data import Claim, Document, document_text
from .errors import BackendError, DataError
from .kernels import levenshtein

DEFAULT_SCRIBENDI_SIMILARITY = 0.8


@dataclass(frozen=True)
class ClaimScores:
    """All per-claim metric values for one claim.

    atomicity == 1 exactly when atomicity_soft == 1.
    """

    claim_id: str
    atomicity: int
    atomicity_soft: float
    fluency: int
    decontextualization: int
    faithfulness: float


def _clamp01(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def levenshtein_ratio(a: str, b: str) -> float:
    """Character-level similarity: 1 - lev(a, b) / max(|a|, |b|)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def token_sort_ratio(a: str, b: str) -> float:
    """levenshtein_ratio after alphabetically sorting whitespace tokens."""
    return levenshtein_ratio(
        " ".join(sorted(a.split())), " ".join(sorted(b.split()))
    )


def atomicity(claim: str, extractor: RelationExtractor) -> int:
    """1 if at most one undirected relation is extractable, else 0."""
    _require_claim(claim)
    return 1 if len(set(extractor.extract(claim))) <= 1 else 0


def atomicity_soft(claim: str, extractor: RelationExtractor) -> float:
    """1 / max(1, number of undirected relations); in (0, 1]."""
    _require_claim(claim)
    return 1.0 / max(1, len(set(extractor.extract(claim))))


def scribendi(
    original: str,
    correction: str,
    ppl: PerplexityScorer,
    similarity_threshold: float = DEFAULT_SCRIBENDI_SIMILARITY,
) -> int:
    """Judge whether a correction improves a sentence: -1, 0, or +1.

    0 when the correction equals the original (after trimming). Otherwise
    +1 when the correction strictly lowers perplexity AND stays similar
    enough (max of character levenshtein_ratio and token_sort_ratio at or
    above the threshold); -1 in every other case.
    """
    if not original.strip() or not correction.strip():
        raise DataError("scribendi requires non-empty original and correction")
    left, right = original.strip(), correction.strip()
    if left == right:
        return 0
    if ppl.perplexity(correction) < ppl.perplexity(original):
        similarity = max(levenshtein_ratio(left, right), token_sort_ratio(left, right))
        if similarity >= similarity_threshold:
            return 1
    return -1


def fluency(
    claim: str,
    corrector: GrammarCorrector,
    ppl: PerplexityScorer,
    similarity_threshold: float = DEFAULT_SCRIBENDI_SIMILARITY,
) -> int:
    """1 when the corrector cannot improve the claim (scribendi <= 0)."""
    _require_claim(claim)
    return 1 if scribendi(claim, corrector.correct(claim), ppl, similarity_threshold) <= 0 else 0


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


def decontextualization(
    doc: Document,
    claim: str,
    decontextualizer: Decontextualizer,
    exact: bool = False,
) -> int:
    """1 when the decontextualizing rewriter returns the claim unchanged.

    Comparison is whitespace-normalized by default because seq2seq
    rewriters routinely perturb spacing; pass exact=True for byte equality.
    """
    _require_claim(claim)
    rewritten = decontextualizer.decontextualize(document_text(doc), claim)
    if exact:
        return 1 if rewritten == claim else 0
    return 1 if _normalize_ws(rewritten) == _normalize_ws(claim) else 0


def faithfulness(doc: Document, claim: str, aligner: PairScorer) -> float:
    """Alignment of the claim against the full document text, in [0, 1]."""
    _require_claim(claim)
    return _clamp01(aligner.score(document_text(doc), claim))


def score_claim(
    doc: Document,
    claim: Claim,
    suite: BackendSuite,
    scribendi_similarity: float = DEFAULT_SCRIBENDI_SIMILARITY,
    exact_decontext: bool = False,
) -> ClaimScores:
    """Compute all per-claim metrics; backend failures carry the claim id."""
    try:
        return ClaimScores(
            claim_id=claim.claim_id,
            atomicity=atomicity(claim.text, suite.relation_extractor),
            atomicity_soft=atomicity_soft(claim.text, suite.relation_extractor),
            fluency=fluency(
                claim.text,
                suite.grammar_corrector,
                suite.perplexity_scorer,
                scribendi_similarity,
            ),
            decontextualization=decontextualization(
                doc, claim.text, suite.decontextualizer, exact_decontext
            ),
            faithfulness=faithfulness(doc, claim.text, suite.alignment_scorer),
        )
    except DataError:
        raise
    except Exception as exc:
        raise BackendError(f"backend failure scoring claim {claim.claim_id!r}: {exc}") from exc


def _require_claim(claim: str) -> None:
    if not claim.strip():
        raise DataError("claim text must be non-empty")
