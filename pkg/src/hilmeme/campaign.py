"""Campaign definition: corpus + system outputs + practice set + config.

A campaign is the immutable unit of administration.  Its work queue is the
systems-x-items cross product from ``corpus.bind_outputs``; every registered
assessor judges every unit, which is what makes agreement computable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import EvaluationItem, SystemOutput, WorkPlan, WorkUnit, bind_outputs, validate_item
from .scoring import SegmentJudgement

PHI_PER_MWE = "per-mwe"

DEFAULT_PLAIN_THRESHOLD = 8.0
PRACTICE_LENGTH = 3


class CampaignError(ValueError):
    pass


@dataclass(frozen=True)
class PracticeItem:
    """A warm-up unit with a gold judgement used for advisory feedback."""

    item: EvaluationItem
    output: SystemOutput
    gold: SegmentJudgement

    def __post_init__(self):
        if self.output.item_id != self.item.item_id:
            raise CampaignError(
                f"practice output targets item {self.output.item_id!r}, not {self.item.item_id!r}"
            )
        if self.gold.item_id != self.item.item_id or self.gold.system_id != self.output.system_id:
            raise CampaignError(f"gold judgement does not match practice unit {self.item.item_id!r}")
        if self.gold.span_ids() != self.item.span_ids():
            raise CampaignError(
                f"gold judgement for practice item {self.item.item_id!r} must cover "
                f"exactly the item's spans"
            )

    def to_dict(self) -> dict:
        return {"item": self.item.to_dict(), "output": self.output.to_dict(), "gold": self.gold.to_dict()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "PracticeItem":
        return cls(
            item=EvaluationItem.from_dict(d["item"]),
            output=SystemOutput.from_dict(d["output"]),
            gold=SegmentJudgement.from_dict(d["gold"]),
        )


@dataclass(frozen=True)
class Campaign:
    campaign_id: str
    items: tuple[EvaluationItem, ...]
    outputs: tuple[SystemOutput, ...]
    practice_items: tuple[PracticeItem, ...]
    assessors: tuple[str, ...]
    shuffle_seed: int = 0
    plain_threshold: float = DEFAULT_PLAIN_THRESHOLD
    phi_elicitation: str = PHI_PER_MWE

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "practice_items", tuple(self.practice_items))
        object.__setattr__(self, "assessors", tuple(self.assessors))

        if not self.campaign_id:
            raise CampaignError("campaign_id must be non-empty")
        if self.phi_elicitation != PHI_PER_MWE:
            raise CampaignError(f"unsupported weight elicitation policy {self.phi_elicitation!r}")
        if len(self.practice_items) != PRACTICE_LENGTH:
            raise CampaignError(
                f"a campaign needs exactly {PRACTICE_LENGTH} practice items, got {len(self.practice_items)}"
            )
        if len(set(self.assessors)) != len(self.assessors):
            raise CampaignError("assessor ids must be unique")
        if not 0.0 <= self.plain_threshold <= 10.0:
            raise CampaignError(f"plain threshold {self.plain_threshold!r} outside [0, 10]")

        seen_items: set[str] = set()
        for item in self.items:
            if item.item_id in seen_items:
                raise CampaignError(f"duplicate item_id {item.item_id!r}")
            seen_items.add(item.item_id)
            violations = validate_item(item)
            if violations:
                detail = "; ".join(v.message for v in violations)
                raise CampaignError(f"invalid item {item.item_id!r}: {detail}")

        # Also validates output/item references and (system, item) uniqueness.
        object.__setattr__(self, "_plan", bind_outputs(self.items, self.outputs))

    @property
    def work_plan(self) -> WorkPlan:
        return self._plan

    def work_units(self) -> tuple[WorkUnit, ...]:
        return self._plan.units

    def item(self, item_id: str) -> EvaluationItem:
        for it in self.items:
            if it.item_id == item_id:
                return it
        raise KeyError(item_id)

    def output(self, item_id: str, system_id: str) -> SystemOutput:
        for out in self.outputs:
            if out.item_id == item_id and out.system_id == system_id:
                return out
        raise KeyError((item_id, system_id))

    def system_ids(self) -> list[str]:
        seen: list[str] = []
        for out in self.outputs:
            if out.system_id not in seen:
                seen.append(out.system_id)
        return seen

    def with_outputs(self, extra: Iterable[SystemOutput]) -> "Campaign":
        """A copy with additional system outputs bound (used by add-system)."""
        return Campaign(
            campaign_id=self.campaign_id,
            items=self.items,
            outputs=self.outputs + tuple(extra),
            practice_items=self.practice_items,
            assessors=self.assessors,
            shuffle_seed=self.shuffle_seed,
            plain_threshold=self.plain_threshold,
            phi_elicitation=self.phi_elicitation,
        )

    def to_dict(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "items": [item.to_dict() for item in self.items],
            "outputs": [out.to_dict() for out in self.outputs],
            "practice": [p.to_dict() for p in self.practice_items],
            "assessors": list(self.assessors),
            "shuffle_seed": self.shuffle_seed,
            "plain_threshold": self.plain_threshold,
            "phi_elicitation": self.phi_elicitation,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Campaign":
        return cls(
            campaign_id=d["campaign_id"],
            items=tuple(EvaluationItem.from_dict(x) for x in d["items"]),
            outputs=tuple(SystemOutput.from_dict(x) for x in d["outputs"]),
            practice_items=tuple(PracticeItem.from_dict(x) for x in d["practice"]),
            assessors=tuple(d["assessors"]),
            shuffle_seed=int(d.get("shuffle_seed", 0)),
            plain_threshold=float(d.get("plain_threshold", DEFAULT_PLAIN_THRESHOLD)),
            phi_elicitation=d.get("phi_elicitation", PHI_PER_MWE),
        )
