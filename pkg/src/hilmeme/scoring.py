"""Three-step judgement arithmetic.

Step I is a single 0-10 general quality score (assessors weigh fluency and
adequacy but report one number).  Step II classifies each highlighted MWE
into one of four categories with fixed score rules: reference-MWE and
alternative-MWE renderings score 10, untranslated/lost scores 0, and plain
(non-MWE) wording carries an assessor-supplied 0-10 score.  Step III attaches
a 0-1 difficulty weight and a set of descriptive aspect tags per MWE; only
the weight enters the arithmetic.

The raw segment score is ``general + mean_i(weight_i * score_i)`` and the
per-segment ceiling is ``10 + mean_i(weight_i * 10)``, so segments with many
MWEs are neither inflated nor penalized.  Dividing the two yields a
normalized score in [0, 1].

Everything here is pure and value-to-value; scores and weights are quantized
to 2 decimal places on construction so in-memory values round-trip exactly
through the json logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

SCORE_MIN = 0.0
SCORE_MAX = 10.0
WEIGHT_MIN = 0.0
WEIGHT_MAX = 1.0

# Step I always contributes a 0..10 band, so every segment ceiling is >= 10.
STEP_I_MAX = 10.0

_DECIMALS = 2


class JudgementError(ValueError):
    """A judgement violates a score rule or range constraint."""

    def __init__(self, message: str, span_id: str | None = None):
        super().__init__(message)
        self.span_id = span_id


class MweCategory(str, Enum):
    """Four-way classification of how a highlighted MWE was rendered."""

    REF_MWE = "ref_mwe"
    ALT_MWE = "alt_mwe"
    NON_MWE = "non_mwe"
    NULL = "null"


# Categories whose score is not up to the assessor.
FIXED_SCORES: Mapping[MweCategory, float] = {
    MweCategory.REF_MWE: 10.0,
    MweCategory.ALT_MWE: 10.0,
    MweCategory.NULL: 0.0,
}


class Aspect(str, Enum):
    """Difficulty aspect tags an assessor may tick per MWE (multi-select).

    Aspects are descriptive only: they never enter the score arithmetic.
    """

    SEMANTICS = "sem"
    GRAMMAR = "gra"
    IDIOMATICITY = "idi"
    AMBIGUITY = "amb"


ASPECT_ORDER = tuple(Aspect)


def _quantize(value: float) -> float:
    return round(float(value), _DECIMALS)


def _check_range(value: float, lo: float, hi: float, what: str, span_id: str | None = None) -> float:
    value = float(value)
    if not (lo <= value <= hi):
        raise JudgementError(f"{what} {value!r} outside [{lo:g}, {hi:g}]", span_id=span_id)
    return value


def category_score(category: MweCategory, assessor_score: float | None = None) -> float:
    """Resolve the step-II score for a category.

    Fixed-score categories reject an assessor score; non-MWE requires one.
    """
    category = MweCategory(category)
    if category is MweCategory.NON_MWE:
        if assessor_score is None:
            raise JudgementError("non_mwe requires an assessor score")
        return _quantize(_check_range(assessor_score, SCORE_MIN, SCORE_MAX, "assessor score"))
    if assessor_score is not None:
        raise JudgementError(f"{category.value} has a fixed score; got assessor score {assessor_score!r}")
    return FIXED_SCORES[category]


def _parse_aspects(aspects: Iterable[Aspect | str]) -> frozenset[Aspect]:
    try:
        return frozenset(Aspect(a) for a in aspects)
    except ValueError as exc:
        raise JudgementError(f"unknown aspect: {exc}") from None


def aspect_codes(aspects: frozenset[Aspect]) -> list[str]:
    """Canonical (sem, gra, idi, amb) ordering for serialization."""
    return [a.value for a in ASPECT_ORDER if a in aspects]


@dataclass(frozen=True)
class MweJudgement:
    """One assessor's verdict on one highlighted MWE."""

    span_id: str
    category: MweCategory
    score: float
    aspects: frozenset[Aspect] = frozenset()
    weight: float = 1.0
    captured_rendering: str | None = None

    def __post_init__(self):
        if not self.span_id:
            raise JudgementError("span_id must be non-empty")
        object.__setattr__(self, "category", MweCategory(self.category))
        object.__setattr__(self, "aspects", _parse_aspects(self.aspects))
        score = _check_range(self.score, SCORE_MIN, SCORE_MAX, "score", self.span_id)
        weight = _check_range(self.weight, WEIGHT_MIN, WEIGHT_MAX, "weight", self.span_id)
        object.__setattr__(self, "score", _quantize(score))
        object.__setattr__(self, "weight", _quantize(weight))

        fixed = FIXED_SCORES.get(self.category)
        if fixed is not None and self.score != fixed:
            raise JudgementError(
                f"category {self.category.value} has fixed score {fixed:g}, got {self.score!r}",
                span_id=self.span_id,
            )
        if self.category is MweCategory.ALT_MWE:
            if not (self.captured_rendering or "").strip():
                raise JudgementError("alt_mwe requires a captured rendering", span_id=self.span_id)
        elif self.category is not MweCategory.NON_MWE and self.captured_rendering is not None:
            raise JudgementError(
                f"captured rendering not applicable for {self.category.value}", span_id=self.span_id
            )

    def to_dict(self) -> dict:
        out = {
            "span_id": self.span_id,
            "category": self.category.value,
            "score": self.score,
            "aspects": aspect_codes(self.aspects),
            "weight": self.weight,
        }
        if self.captured_rendering is not None:
            out["captured_rendering"] = self.captured_rendering
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "MweJudgement":
        return cls(
            span_id=d["span_id"],
            category=MweCategory(d["category"]),
            score=d["score"],
            aspects=_parse_aspects(d.get("aspects", ())),
            weight=d["weight"],
            captured_rendering=d.get("captured_rendering"),
        )


def make_mwe_judgement(
    span_id: str,
    category: MweCategory | str,
    *,
    weight: float,
    aspects: Iterable[Aspect | str] = (),
    assessor_score: float | None = None,
    captured_rendering: str | None = None,
) -> MweJudgement:
    """Build a judgement from raw assessor input, applying the score rules."""
    category = MweCategory(category)
    return MweJudgement(
        span_id=span_id,
        category=category,
        score=category_score(category, assessor_score),
        aspects=_parse_aspects(aspects),
        weight=weight,
        captured_rendering=captured_rendering,
    )


@dataclass(frozen=True)
class SegmentJudgement:
    """One assessor's complete three-step judgement of one work unit.

    Whether ``mwe_judgements`` covers exactly the item's annotated spans is
    enforced where the item is known (session submission and practice
    grading), not here.
    """

    item_id: str
    system_id: str
    assessor_id: str
    general: float
    mwe_judgements: tuple[MweJudgement, ...] = ()
    submitted_at: str = ""

    def __post_init__(self):
        for name in ("item_id", "system_id", "assessor_id"):
            if not getattr(self, name):
                raise JudgementError(f"{name} must be non-empty")
        general = _check_range(self.general, SCORE_MIN, SCORE_MAX, "general score")
        object.__setattr__(self, "general", _quantize(general))
        object.__setattr__(self, "mwe_judgements", tuple(self.mwe_judgements))
        seen = set()
        for m in self.mwe_judgements:
            if m.span_id in seen:
                raise JudgementError(f"duplicate judgement for span {m.span_id!r}", span_id=m.span_id)
            seen.add(m.span_id)

    @property
    def judgement_id(self) -> str:
        return f"{self.assessor_id}:{self.system_id}:{self.item_id}"

    def span_ids(self) -> set[str]:
        return {m.span_id for m in self.mwe_judgements}

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "system_id": self.system_id,
            "assessor_id": self.assessor_id,
            "general": self.general,
            "mwes": [m.to_dict() for m in self.mwe_judgements],
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SegmentJudgement":
        return cls(
            item_id=d["item_id"],
            system_id=d["system_id"],
            assessor_id=d["assessor_id"],
            general=d["general"],
            mwe_judgements=tuple(MweJudgement.from_dict(m) for m in d.get("mwes", ())),
            submitted_at=d.get("submitted_at", ""),
        )


def segment_raw_score(judgement: SegmentJudgement) -> float:
    """General score plus the mean of weighted per-MWE scores."""
    mwes = judgement.mwe_judgements
    if not mwes:
        return judgement.general
    return judgement.general + sum(m.weight * m.score for m in mwes) / len(mwes)


def segment_max_points(judgement: SegmentJudgement) -> float:
    """The ceiling the same judgement could reach with every MWE at 10."""
    mwes = judgement.mwe_judgements
    if not mwes:
        return STEP_I_MAX
    return STEP_I_MAX + sum(m.weight * SCORE_MAX for m in mwes) / len(mwes)


def normalize(raw: float, max_points: float) -> float:
    """Map a raw score onto [0, 1] by its per-segment ceiling.

    ``max_points < 10`` or ``raw`` outside [0, max_points] cannot come from a
    valid judgement and signals upstream corruption.
    """
    if max_points < STEP_I_MAX:
        raise JudgementError(f"max points {max_points!r} below the step-I ceiling {STEP_I_MAX:g}")
    if raw < 0.0 or raw > max_points:
        raise JudgementError(f"raw score {raw!r} outside [0, {max_points!r}]")
    return raw / max_points


def normalized_score(judgement: SegmentJudgement) -> float:
    return normalize(segment_raw_score(judgement), segment_max_points(judgement))


@dataclass(frozen=True)
class Tally:
    """Running category counters over tallied MWE judgements."""

    alpha: int = 0  # ref_mwe
    beta: int = 0   # alt_mwe
    gamma: int = 0  # non_mwe
    theta: int = 0  # null

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "theta"):
            if getattr(self, name) < 0:
                raise JudgementError(f"tally counter {name} may not be negative")

    def total(self) -> int:
        return self.alpha + self.beta + self.gamma + self.theta

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "theta": self.theta}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Tally":
        return cls(alpha=d["alpha"], beta=d["beta"], gamma=d["gamma"], theta=d["theta"])


_TALLY_FIELD = {
    MweCategory.REF_MWE: "alpha",
    MweCategory.ALT_MWE: "beta",
    MweCategory.NON_MWE: "gamma",
    MweCategory.NULL: "theta",
}


def update_tally(tally: Tally, judgement: SegmentJudgement) -> Tally:
    """Return a new tally with this judgement's MWE categories counted."""
    counts = {name: getattr(tally, name) for name in ("alpha", "beta", "gamma", "theta")}
    for m in judgement.mwe_judgements:
        counts[_TALLY_FIELD[m.category]] += 1
    return Tally(**counts)
