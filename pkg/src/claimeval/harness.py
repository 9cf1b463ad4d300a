"""Evaluation harness: score predictions, validate against human grading,
compute inter-annotator agreement, and render leaderboards.

``evaluate`` produces one leaderboard row per model: means of the per-claim
metrics pooled over claims, means of the set metrics over documents, and
F_fact as the harmonic mean of the mean focus and mean coverage. Runs are
deterministic given the configuration and backends: repeated runs write
byte-identical machine-readable output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .agreement import coefficient_table, matrix_from_records
from .backends import BackendSuite, MemoizedPairScorer
from .claim_metrics import (
    DEFAULT_SCRIBENDI_SIMILARITY,
    atomicity,
    atomicity_soft,
    decontextualization,
    faithfulness,
    fluency,
)
from .data import (
    GOLD_ORIGIN,
    AnnotationRecord,
    Claim,
    ClaimSet,
    Document,
    EvaluationReport,
    effective_origin,
)
from .errors import BackendError, ConfigError, DataError, IntegrityError
from .set_metrics import SetScores, empty_prediction_scores, f_fact, score_set
from .validation import binarize_grades, brier, f1_binary, majority_label, rmse

CLAIM_METRICS = ("atomicity", "fluency", "decontextualization", "faithfulness")
TOGGLEABLE_METRICS = CLAIM_METRICS + ("redundancy",)

# (header, metric key, higher is better) -- redundancy is the one
# lower-is-better column
LEADERBOARD_COLUMNS = (
    ("Atomicity", "atomicity", True),
    ("Fluency", "fluency", True),
    ("Decontext.", "decontextualization", True),
    ("Faith.", "faithfulness", True),
    ("Focus", "focus", True),
    ("Coverage", "coverage", True),
    ("F_fact", "f_fact", True),
    ("Redundancy", "redundancy", False),
)

AGREEMENT_METRIC_LABELS = (
    ("atomicity", "Atomicity"),
    ("fluency", "Fluency"),
    ("decontextualization", "Decontext."),
    ("faithfulness", "Faith."),
    ("focus_check", "Focus"),
    ("coverage_check", "Coverage"),
)


@dataclass(frozen=True)
class Thresholds:
    """All tunable cutoffs, validated on construction."""

    scribendi_similarity: float = DEFAULT_SCRIBENDI_SIMILARITY
    nli: float = 0.5
    faithfulness_rounding: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.scribendi_similarity <= 1.0:
            raise ConfigError(
                f"scribendi_similarity must lie in [0, 1]: {self.scribendi_similarity}"
            )
        if not 0.0 < self.nli < 1.0:
            raise ConfigError(f"nli threshold must lie in (0, 1): {self.nli}")
        if not 0.0 <= self.faithfulness_rounding <= 1.0:
            raise ConfigError(
                f"faithfulness_rounding must lie in [0, 1]: {self.faithfulness_rounding}"
            )


THRESHOLD_NAMES = ("scribendi_similarity", "nli", "faithfulness_rounding")


@dataclass
class RunConfig:
    """Everything one evaluation run depends on."""

    backends: Mapping[str, Mapping[str, object]] = field(default_factory=dict)
    thresholds: Thresholds = Thresholds()
    disabled_metrics: frozenset = frozenset()
    exact_decontext: bool = False
    toss_non_decontextualized: bool = False
    per_document_f_fact: bool = False
    per_document_claim_means: bool = False
    workers: int = 1
    verbose: bool = False

    def __post_init__(self) -> None:
        unknown = set(self.disabled_metrics) - set(TOGGLEABLE_METRICS)
        if unknown:
            raise ConfigError(
                f"cannot disable unknown metrics {sorted(unknown)}; "
                f"toggleable: {list(TOGGLEABLE_METRICS)}"
            )
        if self.toss_non_decontextualized and "decontextualization" in self.disabled_metrics:
            raise ConfigError(
                "toss_non_decontextualized needs the decontextualization metric enabled"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1: {self.workers}")


@dataclass
class EvaluationResult:
    reports: list[EvaluationReport]
    claim_rows: list[dict]
    set_scores: list[SetScores]
    flagged: list[dict]
    warnings: list[str]


def _index_gold(
    documents: Sequence[Document], gold_sets: Sequence[ClaimSet]
) -> dict[str, ClaimSet]:
    docs_by_id = {d.doc_id: d for d in documents}
    gold_by_doc: dict[str, ClaimSet] = {}
    for claim_set in gold_sets:
        if claim_set.origin != GOLD_ORIGIN:
            raise DataError(
                f"gold claim sets must have origin {GOLD_ORIGIN!r}; "
                f"got {claim_set.origin!r} for doc {claim_set.doc_id!r}"
            )
        if claim_set.doc_id not in docs_by_id:
            raise IntegrityError(
                f"gold claim set references missing document {claim_set.doc_id!r}"
            )
        if claim_set.doc_id in gold_by_doc:
            raise IntegrityError(f"duplicate gold claim set for doc {claim_set.doc_id!r}")
        gold_by_doc[claim_set.doc_id] = claim_set
    return gold_by_doc


def _score_claims_for_set(
    doc: Document,
    claim_set: ClaimSet,
    suite: BackendSuite,
    config: RunConfig,
) -> list[dict]:
    disabled = config.disabled_metrics
    rows = []
    for claim in claim_set.claims:
        row: dict[str, object] = {
            "claim_id": claim.claim_id,
            "doc_id": claim.doc_id,
            "origin": claim.origin,
        }
        try:
            if "atomicity" not in disabled:
                row["atomicity"] = atomicity(claim.text, suite.relation_extractor)
                row["atomicity_soft"] = atomicity_soft(claim.text, suite.relation_extractor)
            if "fluency" not in disabled:
                row["fluency"] = fluency(
                    claim.text,
                    suite.grammar_corrector,
                    suite.perplexity_scorer,
                    config.thresholds.scribendi_similarity,
                )
            if "decontextualization" not in disabled:
                row["decontextualization"] = decontextualization(
                    doc, claim.text, suite.decontextualizer, config.exact_decontext
                )
            if "faithfulness" not in disabled:
                row["faithfulness"] = faithfulness(doc, claim.text, suite.alignment_scorer)
        except DataError:
            raise
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(
                f"backend failure scoring claim {claim.claim_id!r}: {exc}"
            ) from exc
        rows.append(row)
    return rows


def evaluate(
    documents: Sequence[Document],
    gold_sets: Sequence[ClaimSet],
    predicted_sets: Sequence[ClaimSet],
    config: RunConfig | None = None,
) -> EvaluationResult:
    """Score every model's claim sets and aggregate one report per model.

    Prediction sets whose document has no gold set are excluded with a
    warning. Documents a model produced no claims for are flagged and enter
    the aggregates as zero-score rows, so leaderboard means stay the plain
    means of the emitted per-document rows.
    """
    config = config or RunConfig()
    docs_by_id = {d.doc_id: d for d in documents}
    gold_by_doc = _index_gold(documents, gold_sets)

    warnings: list[str] = []
    origins: list[str] = []
    pred_index: dict[tuple[str, str], ClaimSet] = {}
    for claim_set in predicted_sets:
        if claim_set.origin == GOLD_ORIGIN:
            raise DataError(
                f"prediction sets must not use the reserved origin {GOLD_ORIGIN!r}"
            )
        key = (claim_set.doc_id, claim_set.origin)
        if key in pred_index:
            raise IntegrityError(f"duplicate prediction set for {key}")
        if claim_set.doc_id not in gold_by_doc:
            warnings.append(
                f"prediction set ({claim_set.doc_id}, {claim_set.origin}) has no "
                "matching gold set; excluded"
            )
            continue
        pred_index[key] = claim_set
        if claim_set.origin not in origins:
            origins.append(claim_set.origin)

    seen_claims: dict[str, str] = {}
    for claim_set in list(gold_by_doc.values()) + list(pred_index.values()):
        for claim in claim_set.claims:
            owner = seen_claims.get(claim.claim_id)
            if owner is not None and owner != claim_set.origin:
                raise IntegrityError(
                    f"claim_id {claim.claim_id!r} appears under origins "
                    f"{owner!r} and {claim_set.origin!r}"
                )
            if owner == claim_set.origin:
                raise IntegrityError(f"duplicate claim_id {claim.claim_id!r}")
            seen_claims[claim.claim_id] = claim_set.origin

    suite = BackendSuite.from_config(dict(config.backends))
    suite = replace(suite, alignment_scorer=MemoizedPairScorer(suite.alignment_scorer))

    gold_order = list(gold_by_doc.values())
    tasks = [
        (origin, gold_set, pred_index.get((gold_set.doc_id, origin)))
        for origin in origins
        for gold_set in gold_order
    ]

    def run_task(task):
        origin, gold_set, predicted = task
        doc = docs_by_id[gold_set.doc_id]
        if predicted is None or not predicted.claims:
            return (
                [],
                empty_prediction_scores(gold_set.doc_id, origin, gold_set),
                {"doc_id": gold_set.doc_id, "origin": origin, "reason": "no_prediction"},
            )
        claim_rows = _score_claims_for_set(doc, predicted, suite, config)
        flags = None
        if config.toss_non_decontextualized:
            flags = {r["claim_id"]: r["decontextualization"] for r in claim_rows}
        set_row = score_set(
            gold_set,
            predicted,
            suite.alignment_scorer,
            toss_non_decontextualized=config.toss_non_decontextualized,
            decontext_flags=flags,
        )
        if "redundancy" in config.disabled_metrics:
            set_row = replace(set_row, redundancy=None)
        return claim_rows, set_row, None

    if config.workers > 1 and not suite.thread_safe:
        warnings.append(
            "backends do not all declare thread-safety; running sequentially"
        )
    if config.workers > 1 and suite.thread_safe:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run_task, tasks))
    else:
        outcomes = [run_task(t) for t in tasks]

    claim_rows: list[dict] = []
    set_rows: list[SetScores] = []
    flagged: list[dict] = []
    for rows, set_row, flag in outcomes:
        claim_rows.extend(rows)
        set_rows.append(set_row)
        if flag is not None:
            flagged.append(flag)

    reports = [
        _aggregate(origin, claim_rows, set_rows, config) for origin in origins
    ]
    return EvaluationResult(
        reports=reports,
        claim_rows=claim_rows,
        set_scores=set_rows,
        flagged=flagged,
        warnings=warnings,
    )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _aggregate(
    origin: str,
    claim_rows: Sequence[dict],
    set_rows: Sequence[SetScores],
    config: RunConfig,
) -> EvaluationReport:
    own_claims = [r for r in claim_rows if r["origin"] == origin]
    own_sets = [s for s in set_rows if s.origin == origin]
    means: dict[str, float] = {}

    claim_keys = [m for m in CLAIM_METRICS if m not in config.disabled_metrics]
    if "atomicity" in claim_keys:
        claim_keys = claim_keys + ["atomicity_soft"]
    for metric in claim_keys:
        if not own_claims:
            continue
        if config.per_document_claim_means:
            by_doc: dict[str, list[float]] = {}
            for row in own_claims:
                by_doc.setdefault(row["doc_id"], []).append(float(row[metric]))
            means[metric] = _mean([_mean(vals) for vals in by_doc.values()])
        else:
            means[metric] = _mean([float(row[metric]) for row in own_claims])

    if own_sets:
        means["focus"] = _mean([s.focus for s in own_sets])
        means["coverage"] = _mean([s.coverage for s in own_sets])
        if config.per_document_f_fact:
            means["f_fact"] = _mean([s.f_fact for s in own_sets])
        else:
            means["f_fact"] = f_fact(means["focus"], means["coverage"])
        red = [s.redundancy for s in own_sets if s.redundancy is not None]
        if red and "redundancy" not in config.disabled_metrics:
            means["redundancy"] = _mean(red)

    return EvaluationReport(
        origin=origin,
        metric_means=means,
        n_documents=len(own_sets),
        n_claims=len(own_claims),
    )


# ---------------------------------------------------------------------------
# rendering


def render_leaderboard(reports: Sequence[EvaluationReport]) -> str:
    """Human-readable leaderboard; per-column best values are starred.

    Values show two decimals; best is decided on the displayed (rounded)
    values so ties are marked consistently with what the reader sees.
    """
    if not reports:
        raise DataError("cannot render an empty leaderboard")
    best: dict[str, float] = {}
    for _, key, higher in LEADERBOARD_COLUMNS:
        rounded = [
            round(r.metric_means[key], 2) for r in reports if key in r.metric_means
        ]
        if rounded:
            best[key] = max(rounded) if higher else min(rounded)

    headers = ["Model"] + [h for h, _, _ in LEADERBOARD_COLUMNS]
    table = [headers]
    for report in reports:
        row = [report.origin]
        for _, key, _ in LEADERBOARD_COLUMNS:
            value = report.metric_means.get(key)
            if value is None:
                row.append("-")
            else:
                mark = "*" if round(value, 2) == best.get(key) else ""
                row.append(f"{value:.2f}{mark}")
        table.append(row)
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = []
    for n, row in enumerate(table):
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                for i, cell in enumerate(row)
            ).rstrip()
        )
        if n == 0:
            lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines) + "\n"


def leaderboard_payload(reports: Sequence[EvaluationReport]) -> dict:
    """Machine view of the leaderboard: full precision, stable ordering."""
    return {
        "columns": [key for _, key, _ in LEADERBOARD_COLUMNS],
        "reports": [
            {
                "origin": r.origin,
                "metric_means": dict(r.metric_means),
                "n_documents": r.n_documents,
                "n_claims": r.n_claims,
            }
            for r in reports
        ],
    }


def reports_from_payload(payload: dict) -> list[EvaluationReport]:
    try:
        return [
            EvaluationReport(
                origin=entry["origin"],
                metric_means=dict(entry["metric_means"]),
                n_documents=int(entry["n_documents"]),
                n_claims=int(entry["n_claims"]),
            )
            for entry in payload["reports"]
        ]
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed leaderboard payload: {exc}") from exc


def _fmt_cell(value: float | None) -> str:
    return "undef" if value is None else f"{value:.2f}"


def render_agreement(table: Mapping[str, Mapping[str, float | None]]) -> str:
    """Coefficient rows x metric columns, matching the usual table layout."""
    present = [(m, label) for m, label in AGREEMENT_METRIC_LABELS if m in table]
    if not present:
        raise DataError("no agreement results to render")
    rows = [
        ("Krippendorff's alpha", "krippendorff_alpha"),
        ("Gwet's AC1", "gwet_ac1"),
        ("%-agreement", "percent_agreement"),
    ]
    headers = ["Coefficient"] + [label for _, label in present]
    body = [
        [name] + [_fmt_cell(table[m][key]) for m, _ in present]
        for name, key in rows
    ]
    widths = [
        max(len(line[i]) for line in [headers] + body) for i in range(len(headers))
    ]
    lines = [
        "  ".join(
            cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
            for i, cell in enumerate(line)
        ).rstrip()
        for line in [headers] + body
    ]
    lines.insert(1, "-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines) + "\n"


def render_validation(rows: Sequence[Mapping[str, object]]) -> str:
    headers = ["Metric", "Statistic", "Value", "N"]
    body = [
        [str(r["metric"]), str(r["statistic"]), f"{r['value']:.4f}", str(r["n"])]
        for r in rows
    ]
    widths = [max(len(line[i]) for line in [headers] + body) for i in range(4)]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
        for line in [headers] + body
    ]
    lines.insert(1, "-" * (sum(widths) + 6))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation against human annotations


def _human_checkbox_values(
    records: Sequence[AnnotationRecord],
    claims_by_id: Mapping[str, Claim],
    metric: str,
) -> tuple[dict[tuple[str, str], float], dict]:
    """Checkbox fractions per (doc, origin) and binary outcomes per item.

    For focus checks the item key is the predicted claim id; for coverage
    checks it is (gold claim id, judged origin).
    """
    per_item: dict = {}
    for record in records:
        if record.metric != metric:
            continue
        claim = claims_by_id[record.claim_id]
        origin = effective_origin(record, claim)
        if metric == "focus_check":
            item = record.claim_id
        else:
            item = (record.claim_id, origin)
        per_item.setdefault((claim.doc_id, origin, item), []).append(record.value)

    binary: dict = {}
    grouped: dict[tuple[str, str], list[int]] = {}
    for (doc_id, origin, item), values in per_item.items():
        label = majority_label(values)
        binary[item] = label
        grouped.setdefault((doc_id, origin), []).append(label)
    fractions = {
        key: sum(labels) / len(labels) for key, labels in grouped.items()
    }
    return fractions, binary


def validate(
    claim_rows: Sequence[dict],
    set_scores: Sequence[SetScores],
    records: Sequence[AnnotationRecord],
    claims_by_id: Mapping[str, Claim],
    thresholds: Thresholds | None = None,
) -> list[dict]:
    """Compare automated scores with human annotations.

    Reference-free metrics are compared by F1 after binarizing the human
    grades (faithfulness scores are rounded at the configured threshold
    first). Focus and coverage are compared by RMSE against per-document
    checkbox fractions, and their claimwise probabilities by Brier score.
    """
    thresholds = thresholds or Thresholds()
    rows: list[dict] = []

    for metric in CLAIM_METRICS:
        human = binarize_grades(records, metric)
        if not human:
            continue
        auto: dict[str, int] = {}
        for row in claim_rows:
            if metric not in row:
                continue
            value = row[metric]
            if metric == "faithfulness":
                value = 1 if float(value) >= thresholds.faithfulness_rounding else 0
            auto[str(row["claim_id"])] = int(value)
        shared = len(set(auto) & set(human))
        rows.append(
            {
                "metric": metric,
                "statistic": "f1",
                "value": f1_binary(auto, human),
                "n": shared,
            }
        )

    auto_focus = {(s.doc_id, s.origin): s.focus for s in set_scores}
    auto_coverage = {(s.doc_id, s.origin): s.coverage for s in set_scores}
    auto_cw_focus: dict[str, float] = {}
    auto_cw_coverage: dict[tuple[str, str], float] = {}
    for s in set_scores:
        for claim_id, value in s.claimwise_focus.items():
            auto_cw_focus[claim_id] = value
        for claim_id, value in s.claimwise_coverage.items():
            auto_cw_coverage[(claim_id, s.origin)] = value

    for metric, auto_frac, auto_cw in (
        ("focus_check", auto_focus, auto_cw_focus),
        ("coverage_check", auto_coverage, auto_cw_coverage),
    ):
        if not any(r.metric == metric for r in records):
            continue
        human_frac, human_binary = _human_checkbox_values(records, claims_by_id, metric)
        label = metric.removesuffix("_check")
        rows.append(
            {
                "metric": label,
                "statistic": "rmse",
                "value": rmse(auto_frac, human_frac),
                "n": len(set(auto_frac) & set(human_frac)),
            }
        )
        if not auto_cw and human_binary:
            raise DataError(
                f"claimwise {label} values unavailable; rerun evaluate with "
                "verbose output to emit claimwise maps"
            )
        rows.append(
            {
                "metric": label,
                "statistic": "brier",
                "value": brier(auto_cw, human_binary),
                "n": len(set(auto_cw) & set(human_binary)),
            }
        )

    if not rows:
        raise DataError("annotations do not cover any scored metric")
    return rows


# ---------------------------------------------------------------------------
# agreement over annotations


def agreement_tables(
    records: Sequence[AnnotationRecord],
    claims_by_id: Mapping[str, Claim] | None = None,
    per_model: bool = False,
) -> dict:
    """Pooled coefficient table per metric, optionally broken down by model."""
    present = [
        metric
        for metric, _ in AGREEMENT_METRIC_LABELS
        if any(r.metric == metric for r in records)
    ]
    if not present:
        raise DataError("no annotation records with known metrics")
    pooled = coefficient_table(
        {m: matrix_from_records(records, m, claims_by_id) for m in present}
    )
    result: dict = {"pooled": pooled}
    if per_model:
        if claims_by_id is None:
            raise DataError("per-model agreement needs the corpus claims")
        by_origin: dict[str, list[AnnotationRecord]] = {}
        for record in records:
            origin = effective_origin(record, claims_by_id[record.claim_id])
            by_origin.setdefault(origin, []).append(record)
        result["per_model"] = {
            origin: coefficient_table(
                {
                    m: matrix_from_records(recs, m, claims_by_id)
                    for m in present
                    if any(r.metric == m for r in recs)
                }
            )
            for origin, recs in sorted(by_origin.items())
        }
    return result


# ---------------------------------------------------------------------------
# result files


def _claim_row_payload(row: Mapping[str, object]) -> dict:
    return dict(row)


def _set_row_payload(score: SetScores, verbose: bool) -> dict:
    payload = {
        "doc_id": score.doc_id,
        "origin": score.origin,
        "focus": score.focus,
        "coverage": score.coverage,
        "f_fact": score.f_fact,
        "redundancy": score.redundancy,
        "no_prediction": score.no_prediction,
    }
    if verbose:
        payload["claimwise_focus"] = dict(score.claimwise_focus)
        payload["claimwise_coverage"] = dict(score.claimwise_coverage)
    return payload


def write_evaluation(result: EvaluationResult, out_dir: str | Path, verbose: bool) -> None:
    """Write leaderboard (text + JSON) and per-claim/per-set score files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "leaderboard.txt").write_text(
        render_leaderboard(result.reports), encoding="utf-8"
    )
    (out / "leaderboard.json").write_text(
        json.dumps(leaderboard_payload(result.reports), ensure_ascii=False, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    with (out / "claim_scores.jsonl").open("w", encoding="utf-8") as handle:
        for row in result.claim_rows:
            handle.write(
                json.dumps(_claim_row_payload(row), ensure_ascii=False, sort_keys=True) + "\n"
            )
    with (out / "set_scores.jsonl").open("w", encoding="utf-8") as handle:
        for score in result.set_scores:
            handle.write(
                json.dumps(
                    _set_row_payload(score, verbose), ensure_ascii=False, sort_keys=True
                )
                + "\n"
            )


def load_claim_score_rows(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    rows = []
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def load_set_score_rows(path: str | Path) -> list[SetScores]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    scores = []
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            raw = json.loads(line)
            cw_coverage = raw.get("claimwise_coverage", {})
            scores.append(
                SetScores(
                    doc_id=raw["doc_id"],
                    origin=raw["origin"],
                    focus=raw["focus"],
                    coverage=raw["coverage"],
                    f_fact=raw["f_fact"],
                    redundancy=raw.get("redundancy"),
                    claimwise_focus=raw.get("claimwise_focus", {}),
                    claimwise_coverage=cw_coverage,
                    no_prediction=raw.get("no_prediction", False),
                )
            )
    return scores
