"""Campaign analytics over stored judgements.

Everything here is a pure function of a judgement snapshot: per-system
reports (mean normalized score, category tallies, aspect frequencies),
correlation of human scores with automatic-metric scores, pairwise
inter-annotator agreement, and extraction of the bilingual MWE term bank.

Scores are always recomputed from the stored judgements, never read from
caches, so reports stay a pure function of the log.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .corpus import EvaluationItem, MweSpan
from .scoring import (
    ASPECT_ORDER,
    MweCategory,
    SegmentJudgement,
    Tally,
    normalized_score,
    update_tally,
)
from .schema import SCHEMA_VERSION
from .stats import CORRELATION_METHODS, StatsError

REFERENCE = "reference"
ALTERNATIVE = "alternative"
PLAIN = "plain"
_KIND_ORDER = {REFERENCE: 0, ALTERNATIVE: 1, PLAIN: 2}

SYSTEM_LEVEL = "system"
SEGMENT_LEVEL = "segment"

REPORT_CSV_COLUMNS = [
    "system_id", "n", "mean_norm",
    "alpha", "beta", "gamma", "theta",
    "sem", "gra", "idi", "amb",
]

TERMBANK_TSV_COLUMNS = ["source_mwe", "target_rendering", "kind", "count"]


class AnalyticsError(ValueError):
    pass


def _empty_aspect_freq() -> dict[str, int]:
    return {a.value: 0 for a in ASPECT_ORDER}


@dataclass(frozen=True)
class SystemReport:
    system_id: str
    n_judgements: int
    mean_norm: float
    tally: Tally
    aspect_freq: dict[str, int] = field(default_factory=_empty_aspect_freq)

    def __post_init__(self):
        if not 0.0 <= self.mean_norm <= 1.0:
            raise AnalyticsError(f"mean normalized score {self.mean_norm!r} outside [0, 1]")
        if any(count > self.tally.total() for count in self.aspect_freq.values()):
            raise AnalyticsError("aspect count exceeds the number of tallied MWE judgements")

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "n_judgements": self.n_judgements,
            "mean_norm": self.mean_norm,
            "tally": self.tally.to_dict(),
            "aspect_freq": dict(self.aspect_freq),
        }


def system_report(judgements: Iterable[SegmentJudgement], system_id: str) -> SystemReport:
    """Aggregate one system's judgements; requires at least one."""
    mine = [j for j in judgements if j.system_id == system_id]
    if not mine:
        raise AnalyticsError(f"no judgements for system {system_id!r}")
    tally = Tally()
    aspect_freq = _empty_aspect_freq()
    for j in mine:
        tally = update_tally(tally, j)
        for m in j.mwe_judgements:
            for a in m.aspects:
                aspect_freq[a.value] += 1
    mean_norm = math.fsum(normalized_score(j) for j in mine) / len(mine)
    return SystemReport(
        system_id=system_id,
        n_judgements=len(mine),
        mean_norm=mean_norm,
        tally=tally,
        aspect_freq=aspect_freq,
    )


def all_system_reports(judgements: Iterable[SegmentJudgement]) -> list[SystemReport]:
    judgements = list(judgements)
    systems = sorted({j.system_id for j in judgements})
    return [system_report(judgements, s) for s in systems]


def overall_tally(judgements: Iterable[SegmentJudgement]) -> Tally:
    tally = Tally()
    for j in judgements:
        tally = update_tally(tally, j)
    return tally


# --- correlation against automatic metrics ------------------------------


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    level: str
    coefficient: float
    n: int

    def __post_init__(self):
        if not -1.0 <= self.coefficient <= 1.0:
            raise AnalyticsError(f"coefficient {self.coefficient!r} outside [-1, 1]")
        if self.n < 2:
            raise AnalyticsError("correlation needs at least 2 samples")

    def to_dict(self) -> dict:
        return {"method": self.method, "level": self.level, "coefficient": self.coefficient, "n": self.n}


def per_system_scores(judgements: Iterable[SegmentJudgement]) -> dict[str, float]:
    """System id -> mean normalized score over all its judgements."""
    return {r.system_id: r.mean_norm for r in all_system_reports(judgements)}


def per_segment_scores(judgements: Iterable[SegmentJudgement]) -> dict[tuple[str, str], float]:
    """(item_id, system_id) -> normalized score averaged over assessors."""
    buckets: dict[tuple[str, str], list[float]] = {}
    for j in judgements:
        buckets.setdefault((j.item_id, j.system_id), []).append(normalized_score(j))
    return {key: math.fsum(vals) / len(vals) for key, vals in buckets.items()}


def metric_correlation(
    human: Mapping,
    metric: Mapping,
    *,
    level: str,
    method: str,
) -> CorrelationResult:
    """Correlate human and metric scores over their shared keys (sorted)."""
    if level not in (SYSTEM_LEVEL, SEGMENT_LEVEL):
        raise AnalyticsError(f"unknown correlation level {level!r}")
    if method not in CORRELATION_METHODS:
        raise AnalyticsError(f"unknown correlation method {method!r}")
    keys = sorted(set(human) & set(metric))
    if len(keys) < 2:
        raise AnalyticsError(
            f"insufficient overlap between human and metric scores ({len(keys)} shared keys, need 2)"
        )
    coefficient = CORRELATION_METHODS[method]([human[k] for k in keys], [metric[k] for k in keys])
    return CorrelationResult(method=method, level=level, coefficient=coefficient, n=len(keys))


def load_metric_scores(stream: str | Iterable[str], level: str) -> dict:
    """Parse json-lines {system_id, item_id?, score}; repeated keys are averaged."""
    lines = stream.splitlines() if isinstance(stream, str) else stream
    buckets: dict = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            system_id = str(record["system_id"])
            score = float(record["score"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise AnalyticsError(f"line {lineno}: malformed metric score: {exc!r}") from None
        if level == SEGMENT_LEVEL:
            if "item_id" not in record:
                raise AnalyticsError(f"line {lineno}: segment-level score needs an item_id")
            key = (str(record["item_id"]), system_id)
        else:
            key = system_id
        buckets.setdefault(key, []).append(score)
    return {key: math.fsum(vals) / len(vals) for key, vals in buckets.items()}


# --- inter-annotator agreement -------------------------------------------


@dataclass(frozen=True)
class PairAgreement:
    assessor_a: str
    assessor_b: str
    n_shared_units: int
    score_pearson: float | None
    n_shared_spans: int
    category_match_rate: float | None

    def to_dict(self) -> dict:
        return {
            "assessor_a": self.assessor_a,
            "assessor_b": self.assessor_b,
            "n_shared_units": self.n_shared_units,
            "score_pearson": self.score_pearson,
            "n_shared_spans": self.n_shared_spans,
            "category_match_rate": self.category_match_rate,
        }


@dataclass(frozen=True)
class AgreementReport:
    score_agreement: float | None
    category_agreement: float | None
    pairs: tuple[PairAgreement, ...]
    skipped: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "score_agreement": self.score_agreement,
            "category_agreement": self.category_agreement,
            "pairs": [p.to_dict() for p in self.pairs],
            "skipped": list(self.skipped),
        }


def agreement(judgements: Iterable[SegmentJudgement]) -> AgreementReport:
    """Mean pairwise score correlation and exact category match on shared units.

    Pairs whose shared units cannot support a Pearson coefficient (fewer than
    2, or constant score vectors) are skipped for the score part and reported.
    """
    by_assessor: dict[str, dict[tuple[str, str], SegmentJudgement]] = {}
    for j in judgements:
        by_assessor.setdefault(j.assessor_id, {})[(j.item_id, j.system_id)] = j
    if len(by_assessor) < 2:
        raise AnalyticsError("agreement needs judgements from at least two assessors")

    pairs: list[PairAgreement] = []
    skipped: list[str] = []
    any_shared = False
    for a, b in combinations(sorted(by_assessor), 2):
        shared = sorted(set(by_assessor[a]) & set(by_assessor[b]))
        if not shared:
            skipped.append(f"{a}/{b}: no shared units")
            continue
        any_shared = True

        matches = total_spans = 0
        for key in shared:
            ja, jb = by_assessor[a][key], by_assessor[b][key]
            cats_b = {m.span_id: m.category for m in jb.mwe_judgements}
            for m in ja.mwe_judgements:
                if m.span_id in cats_b:
                    total_spans += 1
                    matches += m.category == cats_b[m.span_id]
        match_rate = matches / total_spans if total_spans else None

        score_r: float | None = None
        if len(shared) < 2:
            skipped.append(f"{a}/{b}: only {len(shared)} shared unit")
        else:
            va = [normalized_score(by_assessor[a][k]) for k in shared]
            vb = [normalized_score(by_assessor[b][k]) for k in shared]
            try:
                score_r = CORRELATION_METHODS["pearson"](va, vb)
            except StatsError:
                skipped.append(f"{a}/{b}: constant scores on shared units")

        pairs.append(
            PairAgreement(
                assessor_a=a,
                assessor_b=b,
                n_shared_units=len(shared),
                score_pearson=score_r,
                n_shared_spans=total_spans,
                category_match_rate=match_rate,
            )
        )

    if not any_shared:
        raise AnalyticsError("no co-judged units between any two assessors")

    score_values = [p.score_pearson for p in pairs if p.score_pearson is not None]
    category_values = [p.category_match_rate for p in pairs if p.category_match_rate is not None]
    return AgreementReport(
        score_agreement=math.fsum(score_values) / len(score_values) if score_values else None,
        category_agreement=math.fsum(category_values) / len(category_values) if category_values else None,
        pairs=tuple(pairs),
        skipped=tuple(skipped),
    )


# --- bilingual MWE term bank ----------------------------------------------


@dataclass(frozen=True)
class TermBankEntry:
    source_mwe: str
    target_rendering: str
    kind: str
    count: int
    evidence: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise AnalyticsError(f"unknown term bank kind {self.kind!r}")
        if self.count != len(self.evidence) or self.count < 1:
            raise AnalyticsError("entry count must equal the number of evidence references (>= 1)")

    def to_dict(self) -> dict:
        return {
            "source_mwe": self.source_mwe,
            "target_rendering": self.target_rendering,
            "kind": self.kind,
            "count": self.count,
            "evidence": list(self.evidence),
        }


def extract_term_bank(
    judgements: Iterable[SegmentJudgement],
    items: Iterable[EvaluationItem],
    plain_threshold: float = 8.0,
) -> list[TermBankEntry]:
    """Harvest bilingual MWE pairs from the corpus and the judgements.

    Reference pairs come from the corpus annotations themselves (evidence is
    the span's provenance); alternative pairs from alt-MWE captures; plain
    pairs from non-MWE judgements that scored at least ``plain_threshold``
    and carried a capture.  Duplicates merge by (source, target, kind).
    """
    spans: dict[tuple[str, str], MweSpan] = {}
    merged: dict[tuple[str, str, str], list[str]] = {}

    for item in items:
        for span in item.mwe_spans:
            spans[(item.item_id, span.span_id)] = span
            for rendering in span.reference_renderings:
                key = (span.surface, rendering, REFERENCE)
                merged.setdefault(key, []).append(f"corpus:{item.item_id}:{span.span_id}")

    for j in judgements:
        for m in j.mwe_judgements:
            try:
                span = spans[(j.item_id, m.span_id)]
            except KeyError:
                raise AnalyticsError(
                    f"judgement {j.judgement_id} references unknown span "
                    f"({j.item_id!r}, {m.span_id!r})"
                ) from None
            if m.category is MweCategory.ALT_MWE:
                key = (span.surface, m.captured_rendering, ALTERNATIVE)
            elif (
                m.category is MweCategory.NON_MWE
                and m.score >= plain_threshold
                and (m.captured_rendering or "").strip()
            ):
                key = (span.surface, m.captured_rendering, PLAIN)
            else:
                continue
            merged.setdefault(key, []).append(j.judgement_id)

    entries = [
        TermBankEntry(
            source_mwe=source,
            target_rendering=target,
            kind=kind,
            count=len(evidence),
            evidence=tuple(sorted(evidence)),
        )
        for (source, target, kind), evidence in merged.items()
    ]
    entries.sort(key=lambda e: (e.source_mwe, _KIND_ORDER[e.kind], e.target_rendering))
    return entries


# --- deterministic exports -------------------------------------------------


def report_to_dict(
    campaign_id: str,
    reports: Sequence[SystemReport],
    tally: Tally,
    agreement_report: AgreementReport | None,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "campaign_id": campaign_id,
        "systems": [r.to_dict() for r in sorted(reports, key=lambda r: r.system_id)],
        "tally": tally.to_dict(),
        "agreement": agreement_report.to_dict() if agreement_report is not None else None,
    }


def report_to_json(
    campaign_id: str,
    reports: Sequence[SystemReport],
    tally: Tally,
    agreement_report: AgreementReport | None,
) -> str:
    return json.dumps(
        report_to_dict(campaign_id, reports, tally, agreement_report),
        sort_keys=True,
        ensure_ascii=False,
        indent=2,
    ) + "\n"


def report_to_csv(reports: Sequence[SystemReport]) -> str:
    """Per-system table; the leading comment line pins the schema version."""
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_CSV_COLUMNS)
    for r in sorted(reports, key=lambda r: r.system_id):
        writer.writerow(
            [
                r.system_id,
                r.n_judgements,
                f"{r.mean_norm:.6f}",
                r.tally.alpha,
                r.tally.beta,
                r.tally.gamma,
                r.tally.theta,
            ]
            + [r.aspect_freq[a.value] for a in ASPECT_ORDER]
        )
    return buf.getvalue()


def termbank_to_tsv(entries: Sequence[TermBankEntry]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(TERMBANK_TSV_COLUMNS)
    for e in entries:
        writer.writerow([e.source_mwe, e.target_rendering, e.kind, e.count])
    return buf.getvalue()


def termbank_to_json(entries: Sequence[TermBankEntry]) -> str:
    payload = {"schema_version": SCHEMA_VERSION, "entries": [e.to_dict() for e in entries]}
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
