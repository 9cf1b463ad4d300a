"""claimeval: metrics and a benchmark harness for machine-extracted factual claims."""

from .agreement import (
    AnnotationMatrix,
    coefficient_table,
    gwet_ac1,
    krippendorff_alpha,
    matrix_from_records,
    percent_agreement,
)
from .backends import (
    BackendSuite,
    CAPABILITIES,
    Relation,
    register_backend,
    registered_backends,
    resolve_backend,
)
from .claim_metrics import (
    ClaimScores,
    atomicity,
    atomicity_soft,
    decontextualization,
    faithfulness,
    fluency,
    levenshtein_ratio,
    score_claim,
    scribendi,
    token_sort_ratio,
)
from .data import (
    AnnotationRecord,
    Claim,
    ClaimSet,
    Document,
    EvaluationReport,
    document_text,
    load_annotations,
    load_claims,
    load_corpus,
    load_documents,
    write_corpus,
)
from .dataset import (
    ArticleSentences,
    ClaimGroup,
    build_document,
    entity_word_recall,
    locate_source_sentence,
    reconstruct_corpus,
    select_article,
    split_corpus,
)
from .errors import BackendError, ClaimEvalError, ConfigError, DataError, IntegrityError, ParseError
from .harness import (
    EvaluationResult,
    RunConfig,
    Thresholds,
    agreement_tables,
    evaluate,
    render_leaderboard,
    validate,
)
from .kernels import levenshtein
from .set_metrics import (
    SetScores,
    claimwise_coverage,
    claimwise_focus,
    concat_claims,
    coverage,
    f_fact,
    focus,
    redundancy,
    score_set,
)
from .validation import binarize_grades, brier, f1_binary, rmse

__version__ = "0.1.0"
