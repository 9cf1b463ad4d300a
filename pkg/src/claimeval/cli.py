"""Command-line interface.

Subcommands: evaluate, validate, agreement, reconstruct, ner-recall,
render. Exit codes: 0 success, 1 data error, 2 backend error, 3
configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends import CAPABILITIES, resolve_backend
from .data import load_annotations, load_claims, load_corpus, write_claims, write_documents
from .dataset import (
    DEFAULT_ENTAILMENT_THRESHOLD,
    entity_word_recall,
    load_articles,
    load_claim_groups,
    reconstruct_corpus,
    split_corpus,
    write_mapping_report,
    write_splits,
)
from .errors import ClaimEvalError, ConfigError, DataError
from .harness import (
    RunConfig,
    THRESHOLD_NAMES,
    Thresholds,
    agreement_tables,
    evaluate,
    load_claim_score_rows,
    load_set_score_rows,
    render_agreement,
    render_leaderboard,
    render_validation,
    reports_from_payload,
    validate,
    write_evaluation,
)


def _parse_impl_specs(specs: tuple[str, ...]) -> dict[str, dict[str, object]]:
    bindings: dict[str, dict[str, object]] = {}
    for item in specs:
        capability, sep, impl = item.partition("=")
        if not sep or not capability or not impl:
            raise ConfigError(f"--impl expects CAPABILITY=ID, got {item!r}")
        if capability not in CAPABILITIES:
            raise ConfigError(
                f"unknown capability {capability!r}; expected one of {list(CAPABILITIES)}"
            )
        bindings[capability] = {"impl": impl}
    return bindings


def _load_backend_file(path: str | None) -> dict[str, dict[str, object]]:
    if path is None:
        return {}
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"backend config file not found: {file}")
    try:
        payload = json.loads(file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"backend config file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or not all(
        isinstance(v, dict) for v in payload.values()
    ):
        raise ConfigError(
            "backend config must be a JSON object: capability -> {impl, options}"
        )
    unknown = set(payload) - set(CAPABILITIES)
    if unknown:
        raise ConfigError(f"backend config names unknown capabilities: {sorted(unknown)}")
    return payload


def _parse_thresholds(specs: tuple[str, ...]) -> Thresholds:
    overrides: dict[str, float] = {}
    for item in specs:
        name, sep, raw = item.partition("=")
        if not sep or name not in THRESHOLD_NAMES:
            raise ConfigError(
                f"--threshold expects NAME=VALUE with NAME in {list(THRESHOLD_NAMES)}, "
                f"got {item!r}"
            )
        try:
            overrides[name] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"--threshold {name}: not a number: {raw!r}") from exc
    return Thresholds(**overrides)


def _backend_bindings(backends_path: str | None, impl_specs: tuple[str, ...]) -> dict:
    bindings = _load_backend_file(backends_path)
    for capability, override in _parse_impl_specs(impl_specs).items():
        merged = dict(bindings.get(capability, {}))
        merged.update(override)
        bindings[capability] = merged
    return bindings


def _corpus_claims(gold_sets, predicted_sets) -> dict:
    return {
        claim.claim_id: claim
        for claim_set in list(gold_sets) + list(predicted_sets)
        for claim in claim_set.claims
    }


@click.group()
def cli() -> None:
    """Evaluate machine-extracted factual claims against gold references."""


@cli.command("evaluate")
@click.option("--documents", "documents_path", required=True, help="Documents file (JSONL).")
@click.option("--gold", "gold_path", required=True, help="Gold claims file (JSONL).")
@click.option("--predictions", "predictions_path", required=True, help="Predicted claims file (JSONL).")
@click.option("--out", "out_dir", required=True, help="Output directory.")
@click.option("--backends", "backends_path", default=None, help="JSON file: capability -> {impl, options}.")
@click.option("--impl", "impl_specs", multiple=True, help="Backend binding CAPABILITY=ID (repeatable).")
@click.option("--threshold", "threshold_specs", multiple=True, help="Threshold NAME=VALUE (repeatable).")
@click.option("--workers", type=int, default=1, show_default=True, help="Document-level worker threads.")
@click.option("--verbose", is_flag=True, help="Include claimwise score maps in set_scores.jsonl.")
@click.option("--exact-decontext", is_flag=True, help="Byte-exact decontextualization comparison.")
@click.option("--toss-non-decontextualized", is_flag=True, help="Drop non-decontextualized claims from concatenation premises.")
@click.option("--per-document-f-fact", is_flag=True, help="Aggregate F_fact as the mean of per-document harmonic means.")
@click.option("--per-document-claim-means", is_flag=True, help="Average claim metrics per document before pooling.")
@click.option("--disable-metric", "disabled", multiple=True, help="Skip a metric (repeatable).")
def evaluate_cmd(
    documents_path,
    gold_path,
    predictions_path,
    out_dir,
    backends_path,
    impl_specs,
    threshold_specs,
    workers,
    verbose,
    exact_decontext,
    toss_non_decontextualized,
    per_document_f_fact,
    per_document_claim_means,
    disabled,
):
    """Score predictions and write the leaderboard plus score files."""
    documents, gold_sets = load_corpus(documents_path, gold_path)
    predicted_sets = load_claims(predictions_path, documents)
    config = RunConfig(
        backends=_backend_bindings(backends_path, impl_specs),
        thresholds=_parse_thresholds(threshold_specs),
        disabled_metrics=frozenset(disabled),
        exact_decontext=exact_decontext,
        toss_non_decontextualized=toss_non_decontextualized,
        per_document_f_fact=per_document_f_fact,
        per_document_claim_means=per_document_claim_means,
        workers=workers,
        verbose=verbose,
    )
    result = evaluate(documents, gold_sets, predicted_sets, config)
    write_evaluation(result, out_dir, verbose=verbose)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(render_leaderboard(result.reports), nl=False)


@cli.command("validate")
@click.option("--documents", "documents_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--predictions", "predictions_path", required=True)
@click.option("--annotations", "annotations_path", required=True)
@click.option("--run", "run_dir", required=True, help="Output directory of a previous evaluate run.")
@click.option("--out", "out_dir", default=None, help="Optional directory for validation.{txt,json}.")
@click.option("--threshold", "threshold_specs", multiple=True, help="Threshold NAME=VALUE (repeatable).")
def validate_cmd(
    documents_path,
    gold_path,
    predictions_path,
    annotations_path,
    run_dir,
    out_dir,
    threshold_specs,
):
    """Compare automated scores from a run with human annotations."""
    documents, gold_sets = load_corpus(documents_path, gold_path)
    predicted_sets = load_claims(predictions_path, documents)
    claims_by_id = _corpus_claims(gold_sets, predicted_sets)
    records = load_annotations(annotations_path, claims_by_id)
    run = Path(run_dir)
    claim_rows = load_claim_score_rows(run / "claim_scores.jsonl")
    set_rows = load_set_score_rows(run / "set_scores.jsonl")
    rows = validate(
        claim_rows, set_rows, records, claims_by_id, _parse_thresholds(threshold_specs)
    )
    text = render_validation(rows)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation.txt").write_text(text, encoding="utf-8")
        (out / "validation.json").write_text(
            json.dumps({"rows": rows}, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    click.echo(text, nl=False)


@cli.command("agreement")
@click.option("--documents", "documents_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--predictions", "predictions_path", required=True)
@click.option("--annotations", "annotations_path", required=True)
@click.option("--per-model", is_flag=True, help="Also break coefficients down per model.")
@click.option("--out", "out_dir", default=None, help="Optional directory for agreement.{txt,json}.")
def agreement_cmd(
    documents_path, gold_path, predictions_path, annotations_path, per_model, out_dir
):
    """Inter-annotator agreement coefficients per metric."""
    documents, gold_sets = load_corpus(documents_path, gold_path)
    predicted_sets = load_claims(predictions_path, documents)
    claims_by_id = _corpus_claims(gold_sets, predicted_sets)
    records = load_annotations(annotations_path, claims_by_id)
    tables = agreement_tables(records, claims_by_id, per_model=per_model)
    text = render_agreement(tables["pooled"])
    if per_model:
        for origin, table in tables["per_model"].items():
            text += f"\n[{origin}]\n" + render_agreement(table)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "agreement.txt").write_text(text, encoding="utf-8")
        (out / "agreement.json").write_text(
            json.dumps(tables, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    click.echo(text, nl=False)


@cli.command("reconstruct")
@click.option("--claims", "claims_path", required=True, help="Grouped claims file (JSONL).")
@click.option("--articles", "articles_path", required=True, help="Articles file (JSONL).")
@click.option("--threshold", type=float, default=DEFAULT_ENTAILMENT_THRESHOLD, show_default=True, help="Entailment probability threshold.")
@click.option("--out", "out_dir", required=True, help="Output directory.")
@click.option("--backends", "backends_path", default=None)
@click.option("--impl", "impl_specs", multiple=True, help="Backend binding CAPABILITY=ID.")
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True, help="Train/dev/test ratios.")
@click.option("--split/--no-split", "do_split", default=True, help="Write a title-disjoint split.")
def reconstruct_cmd(
    claims_path, articles_path, threshold, out_dir, backends_path, impl_specs, ratios, do_split
):
    """Recover source sentences for claim groups and build the corpus."""
    groups = load_claim_groups(claims_path)
    articles = load_articles(articles_path)
    bindings = _backend_bindings(backends_path, impl_specs)
    nli = resolve_backend("entailment", bindings.get("entailment"))
    documents, claim_sets, mappings = reconstruct_corpus(groups, articles, nli, threshold)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_documents(out / "documents.jsonl", documents)
    write_claims(out / "claims.jsonl", claim_sets)
    write_mapping_report(out / "mapping.jsonl", mappings)
    if do_split:
        try:
            ratio_values = tuple(float(r) for r in ratios.split(","))
        except ValueError as exc:
            raise ConfigError(f"--ratios must be comma-separated numbers: {ratios!r}") from exc
        assignment = split_corpus(documents, ratio_values)
        write_splits(out / "splits.jsonl", assignment)
    mapped = sum(1 for m in mappings if m.status == "mapped")
    click.echo(f"mapped {mapped} of {len(mappings)} groups -> {out}")


@cli.command("ner-recall")
@click.option("--documents", "documents_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--backends", "backends_path", default=None)
@click.option("--impl", "impl_specs", multiple=True, help="Backend binding CAPABILITY=ID.")
@click.option("--out", "out_path", default=None, help="Optional per-document JSONL output.")
def ner_recall_cmd(documents_path, gold_path, backends_path, impl_specs, out_path):
    """Entity-word recall of gold claims against their source sentences."""
    documents, gold_sets = load_corpus(documents_path, gold_path)
    bindings = _backend_bindings(backends_path, impl_specs)
    ner = resolve_backend("entity_recognition", bindings.get("entity_recognition"))
    gold_by_doc = {s.doc_id: s for s in gold_sets}
    rows = []
    for doc in documents:
        claim_set = gold_by_doc.get(doc.doc_id)
        if claim_set is None:
            click.echo(f"warning: document {doc.doc_id} has no gold claims; skipped", err=True)
            continue
        rows.append({"doc_id": doc.doc_id, "recall": entity_word_recall(doc, claim_set, ner)})
    if not rows:
        raise DataError("no documents with gold claims")
    if out_path is not None:
        with Path(out_path).open("w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    mean = sum(r["recall"] for r in rows) / len(rows)
    click.echo(f"entity word recall: {mean:.4f} over {len(rows)} documents")


@cli.command("render")
@click.option("--report", "report_path", required=True, help="leaderboard.json from an evaluate run.")
@click.option("--out", "out_path", default=None, help="Optional text output file.")
def render_cmd(report_path, out_path):
    """Render a machine-readable leaderboard as a text table."""
    file = Path(report_path)
    if not file.exists():
        raise DataError(f"file not found: {file}")
    payload = json.loads(file.read_text(encoding="utf-8"))
    text = render_leaderboard(reports_from_payload(payload))
    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    click.echo(text, nl=False)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return ConfigError.exit_code
    except click.ClickException as exc:
        exc.show()
        return ConfigError.exit_code
    except ClaimEvalError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
