"""Human-in-the-loop MT evaluation with MWE-aware three-step judgements."""

from .schema import SCHEMA_VERSION
from .corpus import (
    CorpusError,
    EvaluationItem,
    MweSpan,
    SystemOutput,
    WorkUnit,
    bind_outputs,
    ingest_corpus,
    parse_system_outputs,
    serialize_corpus,
    validate_item,
)
from .scoring import (
    Aspect,
    JudgementError,
    MweCategory,
    MweJudgement,
    SegmentJudgement,
    Tally,
    category_score,
    make_mwe_judgement,
    normalize,
    normalized_score,
    segment_max_points,
    segment_raw_score,
    update_tally,
)
from .campaign import Campaign, CampaignError, PracticeItem
from .session import (
    Event,
    EventKind,
    IllegalTransition,
    Phase,
    Session,
    SessionError,
    SessionState,
    SubmissionError,
    advance,
    check_practice,
    current_unit,
    start_session,
)
from .stats import StatsError, kendall, pearson, spearman
from .analytics import (
    AgreementReport,
    AnalyticsError,
    CorrelationResult,
    SystemReport,
    TermBankEntry,
    agreement,
    extract_term_bank,
    metric_correlation,
    system_report,
)
from .store import CampaignStore, ConflictError, JudgementRecord, StoreError

__version__ = "0.1.0"
