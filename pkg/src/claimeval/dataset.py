"""Corpus reconstruction: map claim groups back to their source sentences.

Claims arrive grouped by an opaque source-sentence id together with the
article titles of their supporting evidence. For each group we pick the
modal evidence article, scan it sentence by sentence with an entailment
scorer, and adopt the sentence that entails the most claims in the group;
groups no sentence entails are tossed. The winning sentence becomes a
document (title + sentence + immediate neighbours), and the corpus is
split train/dev/test without letting one page title span two splits.

Also here: a rough named-entity word recall probe of how much source
information the claims retain.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .backends import EntityRecognizer, PairScorer, content_tokens
from .data import Claim, ClaimSet, Document, GOLD_ORIGIN
from .errors import BackendError, DataError, ParseError

DEFAULT_ENTAILMENT_THRESHOLD = 0.5
SPLIT_NAMES = ("train", "dev", "test")
DEFAULT_SPLIT_RATIOS = (0.8, 0.1, 0.1)


@dataclass(frozen=True)
class ClaimGroup:
    """Claims sharing one (lost) source sentence, plus their evidence titles."""

    group_id: str
    claims: tuple[str, ...]
    evidence_articles: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.claims:
            raise DataError(f"claim group {self.group_id!r} has no claims")


@dataclass(frozen=True)
class ArticleSentences:
    """An article as an ordered list of pre-segmented sentences."""

    title: str
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise DataError(f"article {self.title!r} has no sentences")


@dataclass(frozen=True)
class GroupMapping:
    """Where one claim group ended up: mapped to a document, or tossed."""

    group_id: str
    status: str  # "mapped" | "tossed"
    doc_id: str | None = None
    article: str | None = None
    sentence_index: int | None = None
    reason: str | None = None


def select_article(group: ClaimGroup) -> str | None:
    """Modal evidence article; lexicographically smallest on ties.

    None signals the group has no evidence and should be skipped.
    """
    if not group.evidence_articles:
        return None
    counts = Counter(group.evidence_articles)
    best = max(counts.values())
    return min(title for title, n in counts.items() if n == best)


def locate_source_sentence(
    group: ClaimGroup,
    article: ArticleSentences,
    nli: PairScorer,
    threshold: float = DEFAULT_ENTAILMENT_THRESHOLD,
) -> int | None:
    """Index of the sentence entailing the most claims of the group.

    A claim counts as entailed when the entailment probability reaches the
    threshold. Ties break toward the higher mean probability over the
    group, then the earliest index. None when no sentence entails any
    claim (the group is tossed).
    """
    if not 0.0 < threshold < 1.0:
        raise DataError(f"entailment threshold must lie in (0, 1): {threshold}")
    best_index: int | None = None
    best_count = 0
    best_mean = -1.0
    for index, sentence in enumerate(article.sentences):
        try:
            probs = [nli.score(sentence, claim) for claim in group.claims]
        except Exception as exc:
            raise BackendError(
                f"entailment backend failed on group {group.group_id!r}: {exc}"
            ) from exc
        count = sum(1 for p in probs if p >= threshold)
        mean_prob = sum(probs) / len(probs)
        if count > best_count or (count == best_count and mean_prob > best_mean):
            if count > 0:
                best_index, best_count, best_mean = index, count, mean_prob
    return best_index


def build_document(article: ArticleSentences, index: int, doc_id: str) -> Document:
    """Document for one sentence: title, the sentence, and its neighbours."""
    if not 0 <= index < len(article.sentences):
        raise DataError(
            f"sentence index {index} out of range for article {article.title!r} "
            f"({len(article.sentences)} sentences)"
        )
    sentences = article.sentences
    return Document(
        doc_id=doc_id,
        page_title=article.title,
        context_before=sentences[index - 1] if index > 0 else "",
        source_sentence=sentences[index],
        context_after=sentences[index + 1] if index + 1 < len(sentences) else "",
    )


def reconstruct_corpus(
    groups: Sequence[ClaimGroup],
    articles: Mapping[str, ArticleSentences],
    nli: PairScorer,
    threshold: float = DEFAULT_ENTAILMENT_THRESHOLD,
) -> tuple[list[Document], list[ClaimSet], list[GroupMapping]]:
    """Run the full reconstruction over all groups.

    Returns the built documents, their gold claim sets, and one mapping
    entry per input group recording where it went (or why it was tossed).
    """
    documents: list[Document] = []
    claim_sets: list[ClaimSet] = []
    mappings: list[GroupMapping] = []
    for group in groups:
        title = select_article(group)
        if title is None:
            mappings.append(
                GroupMapping(group.group_id, "tossed", reason="no_evidence")
            )
            continue
        article = articles.get(title)
        if article is None:
            mappings.append(
                GroupMapping(group.group_id, "tossed", reason="unknown_article")
            )
            continue
        index = locate_source_sentence(group, article, nli, threshold)
        if index is None:
            mappings.append(
                GroupMapping(group.group_id, "tossed", reason="not_entailed")
            )
            continue
        doc = build_document(article, index, doc_id=group.group_id)
        claims = tuple(
            Claim(
                claim_id=f"{group.group_id}-c{i + 1}",
                doc_id=doc.doc_id,
                text=text,
                origin=GOLD_ORIGIN,
            )
            for i, text in enumerate(group.claims)
        )
        documents.append(doc)
        claim_sets.append(ClaimSet(doc_id=doc.doc_id, origin=GOLD_ORIGIN, claims=claims))
        mappings.append(
            GroupMapping(
                group.group_id,
                "mapped",
                doc_id=doc.doc_id,
                article=title,
                sentence_index=index,
            )
        )
    return documents, claim_sets, mappings


def split_corpus(
    documents: Sequence[Document],
    ratios: Sequence[float] = DEFAULT_SPLIT_RATIOS,
) -> dict[str, list[Document]]:
    """Title-disjoint train/dev/test split.

    Documents sharing a page title always land in the same split. Title
    groups are assigned greedily, largest first, each to the split farthest
    below its target document count; the ordering is fully deterministic.
    Per-split sizes stay within the largest title-group size of the
    ratio targets.
    """
    if len(ratios) != len(SPLIT_NAMES):
        raise DataError(f"expected {len(SPLIT_NAMES)} ratios, got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise DataError(f"split ratios must be positive: {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"split ratios must sum to 1: {tuple(ratios)}")

    by_title: dict[str, list[Document]] = {}
    for doc in documents:
        by_title.setdefault(doc.page_title, []).append(doc)
    if len(by_title) < len(SPLIT_NAMES):
        raise DataError(
            f"need at least {len(SPLIT_NAMES)} distinct page titles to split, "
            f"got {len(by_title)}"
        )

    total = len(documents)
    deficits = [r * total for r in ratios]
    assignment: dict[str, list[Document]] = {name: [] for name in SPLIT_NAMES}
    groups = sorted(by_title.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    for title, docs in groups:
        target = max(range(len(SPLIT_NAMES)), key=lambda i: deficits[i])
        assignment[SPLIT_NAMES[target]].extend(docs)
        deficits[target] -= len(docs)
    return assignment


def entity_word_recall(
    document: Document, claims: ClaimSet, ner: EntityRecognizer
) -> float:
    """Share of source-sentence entity words the claims mention.

    Entity surfaces are split into lowercase words on both sides; recall is
    computed over word sets with the source as reference, and defined as
    1.0 when the source has no entities. Deliberately rough.
    """
    if not claims.claims:
        raise DataError(f"entity recall requires a non-empty claim set (doc {document.doc_id!r})")
    try:
        source_words = {
            w
            for entity in ner.entities(document.source_sentence)
            for w in content_tokens(entity)
        }
        claim_words = {
            w
            for claim in claims.claims
            for entity in ner.entities(claim.text)
            for w in content_tokens(entity)
        }
    except Exception as exc:
        raise BackendError(
            f"entity recognizer failed on doc {document.doc_id!r}: {exc}"
        ) from exc
    if not source_words:
        return 1.0
    return len(source_words & claim_words) / len(source_words)


# ---------------------------------------------------------------------------
# pipeline input files


def load_claim_groups(path: str | Path) -> list[ClaimGroup]:
    """Load grouped claims: one line per claim with its group and evidence.

    Line shape: {"group_id": ..., "text": ..., "evidence_articles": [...]}.
    Groups are assembled in file order; evidence lists concatenate into the
    group's evidence multiset.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    order: list[str] = []
    texts: dict[str, list[str]] = {}
    evidence: dict[str, list[str]] = {}
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
            group_id = record.get("group_id")
            text = record.get("text")
            articles = record.get("evidence_articles", [])
            if not isinstance(group_id, str) or not group_id:
                raise ParseError(f"{path}:{lineno}: 'group_id' must be a non-empty string")
            if not isinstance(text, str) or not text.strip():
                raise ParseError(f"{path}:{lineno}: 'text' must be a non-empty string")
            if not isinstance(articles, list) or any(
                not isinstance(a, str) for a in articles
            ):
                raise ParseError(
                    f"{path}:{lineno}: 'evidence_articles' must be a list of strings"
                )
            if group_id not in texts:
                order.append(group_id)
                texts[group_id] = []
                evidence[group_id] = []
            texts[group_id].append(text)
            evidence[group_id].extend(articles)
    if not order:
        raise DataError(f"{path}: no claim groups found")
    return [
        ClaimGroup(
            group_id=gid,
            claims=tuple(texts[gid]),
            evidence_articles=tuple(evidence[gid]),
        )
        for gid in order
    ]


def load_articles(path: str | Path) -> dict[str, ArticleSentences]:
    """Load articles: one line per article with its ordered sentences."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    articles: dict[str, ArticleSentences] = {}
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
            title = record.get("title")
            sentences = record.get("sentences")
            if not isinstance(title, str) or not title:
                raise ParseError(f"{path}:{lineno}: 'title' must be a non-empty string")
            if (
                not isinstance(sentences, list)
                or not sentences
                or any(not isinstance(s, str) for s in sentences)
            ):
                raise ParseError(
                    f"{path}:{lineno}: 'sentences' must be a non-empty list of strings"
                )
            if title in articles:
                raise DataError(f"{path}:{lineno}: duplicate article title {title!r}")
            articles[title] = ArticleSentences(title=title, sentences=tuple(sentences))
    if not articles:
        raise DataError(f"{path}: no articles found")
    return articles


def write_mapping_report(path: str | Path, mappings: Iterable[GroupMapping]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for m in mappings:
            handle.write(
                json.dumps(
                    {
                        "group_id": m.group_id,
                        "status": m.status,
                        "doc_id": m.doc_id,
                        "article": m.article,
                        "sentence_index": m.sentence_index,
                        "reason": m.reason,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def write_splits(path: str | Path, assignment: Mapping[str, Sequence[Document]]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for split in SPLIT_NAMES:
            for doc in assignment.get(split, ()):
                handle.write(
                    json.dumps(
                        {"doc_id": doc.doc_id, "split": split},
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                    + "\n"
                )
