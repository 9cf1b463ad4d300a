"""Shared corpus builders for harness-level tests."""

from claimeval.data import Claim, ClaimSet, Document


def build_documents(n_docs=3):
    docs = []
    for i in range(n_docs):
        docs.append(
            Document(
                doc_id=f"d{i}",
                page_title=f"Topic{i}",
                context_before=f"before{i} context.",
                source_sentence=f"alpha{i} beta{i} gamma{i} delta{i}.",
                context_after=f"after{i} context.",
            )
        )
    return docs


def gold_texts(i):
    return [f"alpha{i} beta{i}.", f"gamma{i} delta{i}."]


def build_gold_sets(docs):
    sets = []
    for doc in docs:
        i = doc.doc_id[1:]
        claims = tuple(
            Claim(claim_id=f"g{i}-{k}", doc_id=doc.doc_id, text=t, origin="gold")
            for k, t in enumerate(gold_texts(i))
        )
        sets.append(ClaimSet(doc_id=doc.doc_id, origin="gold", claims=claims))
    return sets


def build_predictions(docs, origin, texts_for_doc, prefix=None):
    """texts_for_doc: doc_id -> list of claim texts (missing docs omitted)."""
    prefix = prefix or origin
    sets = []
    for doc in docs:
        texts = texts_for_doc.get(doc.doc_id)
        if texts is None:
            continue
        claims = tuple(
            Claim(
                claim_id=f"{prefix}-{doc.doc_id}-{k}",
                doc_id=doc.doc_id,
                text=t,
                origin=origin,
            )
            for k, t in enumerate(texts)
        )
        sets.append(ClaimSet(doc_id=doc.doc_id, origin=origin, claims=claims))
    return sets


def perfect_corpus(n_docs=3, origin="copycat"):
    """Corpus where the model reproduces the gold claims verbatim."""
    docs = build_documents(n_docs)
    gold_sets = build_gold_sets(docs)
    predictions = build_predictions(
        docs, origin, {d.doc_id: gold_texts(d.doc_id[1:]) for d in docs}
    )
    return docs, gold_sets, predictions
