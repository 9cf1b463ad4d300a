"""Backend contracts, deterministic mocks, and the implementation registry.

All neural capabilities the metrics reduce to are hidden behind seven
narrow contracts, so the framework's mathematics can run offline against
the mocks shipped here. Production adapters register under stable string
ids; selection happens via ``resolve_backend(capability, config)``.

Every backend must be deterministic for fixed inputs and configuration,
and must declare thread-safety via a boolean ``thread_safe`` attribute
(absent means "treat as single-threaded"). The mocks are pure functions of
their inputs and are thread-safe.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol, runtime_checkable

from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class Relation:
    """An extracted entity relation, compared as an UNDIRECTED pair.

    The predicate is carried for inspection but ignored for identity, so
    symmetrical extractions like (Trump, president_of, USA) and
    (USA, governed_by, Trump) collapse to one relation in a set.
    """

    source: str
    target: str
    predicate: str = ""

    def _key(self) -> frozenset:
        return frozenset((self.source, self.target))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@runtime_checkable
class RelationExtractor(Protocol):
    def extract(self, text: str) -> set[Relation]: ...


@runtime_checkable
class GrammarCorrector(Protocol):
    def correct(self, text: str) -> str: ...


@runtime_checkable
class PerplexityScorer(Protocol):
    def perplexity(self, text: str) -> float: ...


@runtime_checkable
class Decontextualizer(Protocol):
    def decontextualize(self, context: str, sentence: str) -> str: ...


@runtime_checkable
class PairScorer(Protocol):
    """Shared shape of alignment and entailment scorers: [0, 1] score."""

    def score(self, premise: str, hypothesis: str) -> float: ...


@runtime_checkable
class EntityRecognizer(Protocol):
    def entities(self, text: str) -> list[str]: ...


CAPABILITIES = (
    "relation_extraction",
    "grammar_correction",
    "perplexity",
    "decontextualization",
    "alignment",
    "entailment",
    "entity_recognition",
)


_TOKEN_RE = re.compile(r"\w+")


def content_tokens(text: str) -> list[str]:
    """Lowercased word tokens, the unit of all overlap mocks."""
    return _TOKEN_RE.findall(text.lower())


# ---------------------------------------------------------------------------
# mocks (shipped with the library, not test-only)


class TokenOverlapScorer:
    """Alignment/entailment mock: lowercase content-token overlap.

    score(p, h) = |tokens(h) ∩ tokens(p)| / |tokens(h)| over token sets;
    empty hypothesis or empty premise scores 0. A hypothesis whose tokens
    all occur in the premise scores exactly 1.
    """

    thread_safe = True

    def score(self, premise: str, hypothesis: str) -> float:
        hyp = set(content_tokens(hypothesis))
        if not hyp:
            return 0.0
        prem = set(content_tokens(premise))
        if not prem:
            return 0.0
        return len(hyp & prem) / len(hyp)


class ClauseRelationExtractor:
    """Relation-extraction mock over a micro-grammar.

    Clauses are split on " and "; a clause of exactly three words
    "X verb Y" yields the relation {X, Y}. Anything else yields nothing.
    Symmetric duplicates collapse under undirected identity.
    """

    thread_safe = True

    def extract(self, text: str) -> set[Relation]:
        relations: set[Relation] = set()
        for clause in text.split(" and "):
            tokens = [t.strip(string.punctuation) for t in clause.split()]
            tokens = [t for t in tokens if t]
            if len(tokens) == 3:
                relations.add(Relation(tokens[0], tokens[2], tokens[1]))
        return relations


class IdentityCorrector:
    """Grammar-correction mock: returns its input unchanged."""

    thread_safe = True

    def correct(self, text: str) -> str:
        return text


class IdentityDecontextualizer:
    """Decontextualization mock: every sentence is already self-contained."""

    thread_safe = True

    def decontextualize(self, context: str, sentence: str) -> str:
        return sentence


class MeanWordLengthPerplexity:
    """Perplexity mock: 1 + mean word length in characters.

    Crude but deterministic and positive; enough to drive the comparison
    logic of the fluency scorer in offline runs.
    """

    thread_safe = True

    def perplexity(self, text: str) -> float:
        words = text.split()
        if not words:
            return 1.0
        return 1.0 + sum(len(w) for w in words) / len(words)


_CAPITALIZED = re.compile(r"[A-Z][\w'-]*")


class CapitalizedSpanRecognizer:
    """NER mock: maximal runs of capitalized words form one entity each."""

    thread_safe = True

    def entities(self, text: str) -> list[str]:
        found: list[str] = []
        run: list[str] = []
        for raw in text.split():
            token = raw.strip(string.punctuation)
            if token and _CAPITALIZED.fullmatch(token):
                run.append(token)
            elif run:
                found.append(" ".join(run))
                run = []
        if run:
            found.append(" ".join(run))
        return found


class MemoizedPairScorer:
    """Per-process memo of (premise, hypothesis) -> score around a scorer."""

    def __init__(self, inner: PairScorer):
        self._inner = inner
        self._memo: dict[tuple[str, str], float] = {}
        self.thread_safe = getattr(inner, "thread_safe", False)

    def score(self, premise: str, hypothesis: str) -> float:
        key = (premise, hypothesis)
        cached = self._memo.get(key)
        if cached is None:
            cached = self._inner.score(premise, hypothesis)
            self._memo[key] = cached
        return cached


# ---------------------------------------------------------------------------
# registry

BackendFactory = Callable[[Mapping[str, object]], object]

_REGISTRY: dict[str, dict[str, BackendFactory]] = {cap: {} for cap in CAPABILITIES}


def register_backend(capability: str, impl_id: str, factory: BackendFactory) -> None:
    """Register an implementation factory for a capability.

    Production adapters call this at import time; factories receive the
    option map from the run configuration and must raise BackendError if a
    required model resource is missing (never fall back to a mock).
    """
    if capability not in _REGISTRY:
        raise ConfigError(
            f"unknown capability {capability!r}; expected one of {list(CAPABILITIES)}"
        )
    _REGISTRY[capability][impl_id] = factory


def registered_backends(capability: str) -> list[str]:
    if capability not in _REGISTRY:
        raise ConfigError(
            f"unknown capability {capability!r}; expected one of {list(CAPABILITIES)}"
        )
    return sorted(_REGISTRY[capability])


def resolve_backend(capability: str, config: Mapping[str, object] | None = None):
    """Build a ready backend for a capability from its configuration.

    ``config`` holds the implementation id under "impl" (default "mock")
    plus implementation-specific options, which the core never inspects.
    """
    options = dict(config or {})
    impl_id = options.pop("impl", "mock")
    if capability not in _REGISTRY:
        raise ConfigError(
            f"unknown capability {capability!r}; expected one of {list(CAPABILITIES)}"
        )
    factory = _REGISTRY[capability].get(str(impl_id))
    if factory is None:
        raise ConfigError(
            f"unknown implementation {impl_id!r} for {capability}; "
            f"registered: {registered_backends(capability)}"
        )
    return factory(options)


for _cap, _mock in (
    ("relation_extraction", ClauseRelationExtractor),
    ("grammar_correction", IdentityCorrector),
    ("perplexity", MeanWordLengthPerplexity),
    ("decontextualization", IdentityDecontextualizer),
    ("alignment", TokenOverlapScorer),
    ("entailment", TokenOverlapScorer),
    ("entity_recognition", CapitalizedSpanRecognizer),
):
    register_backend(_cap, "mock", lambda options, cls=_mock: cls())


@dataclass
class BackendSuite:
    """All seven backends bound for one run."""

    relation_extractor: RelationExtractor
    grammar_corrector: GrammarCorrector
    perplexity_scorer: PerplexityScorer
    decontextualizer: Decontextualizer
    alignment_scorer: PairScorer
    entailment_scorer: PairScorer
    entity_recognizer: EntityRecognizer

    @classmethod
    def from_config(cls, bindings: Mapping[str, Mapping[str, object]] | None = None):
        """Resolve a suite from capability -> config bindings (default: mocks)."""
        bindings = bindings or {}
        unknown = set(bindings) - set(CAPABILITIES)
        if unknown:
            raise ConfigError(
                f"unknown capabilities in backend bindings: {sorted(unknown)}"
            )
        return cls(
            relation_extractor=resolve_backend(
                "relation_extraction", bindings.get("relation_extraction")
            ),
            grammar_corrector=resolve_backend(
                "grammar_correction", bindings.get("grammar_correction")
            ),
            perplexity_scorer=resolve_backend("perplexity", bindings.get("perplexity")),
            decontextualizer=resolve_backend(
                "decontextualization", bindings.get("decontextualization")
            ),
            alignment_scorer=resolve_backend("alignment", bindings.get("alignment")),
            entailment_scorer=resolve_backend("entailment", bindings.get("entailment")),
            entity_recognizer=resolve_backend(
                "entity_recognition", bindings.get("entity_recognition")
            ),
        )

    @property
    def thread_safe(self) -> bool:
        backends = (
            self.relation_extractor,
            self.grammar_corrector,
            self.perplexity_scorer,
            self.decontextualizer,
            self.alignment_scorer,
            self.entailment_scorer,
            self.entity_recognizer,
        )
        return all(getattr(b, "thread_safe", False) for b in backends)
