"""Assessor workflow state machine.

One session walks an assessor through: consent -> introduction -> three
practice units -> the assessment queue -> complete (or declined at the
consent screen, which is terminal).  Sessions are immutable values; ``advance``
returns a new session or raises, so replaying an event log reproduces the
exact final state.

Each assessor sees the campaign's work units in a deterministic per-assessor
order: a Fisher-Yates shuffle seeded from (campaign shuffle_seed, assessor_id).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .campaign import Campaign, PracticeItem
from .corpus import EvaluationItem, SystemOutput, WorkUnit
from .scoring import SegmentJudgement


class SessionError(ValueError):
    pass


class IllegalTransition(SessionError):
    """The event is not legal in the session's current state."""


class SubmissionError(SessionError):
    """A submitted judgement fails completeness or unit-matching checks."""


class Phase(str, Enum):
    CONSENT = "consent"
    INTRODUCTION = "introduction"
    PRACTICE = "practice"
    ASSESSMENT = "assessment"
    COMPLETE = "complete"
    DECLINED = "declined"


TERMINAL_PHASES = (Phase.COMPLETE, Phase.DECLINED)


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    practice_done: int = 0
    next_index: int = 0

    def to_dict(self) -> dict:
        return {"phase": self.phase.value, "practice_done": self.practice_done, "next_index": self.next_index}


class EventKind(str, Enum):
    ACCEPT_CONSENT = "accept_consent"
    DECLINE_CONSENT = "decline_consent"
    FINISH_INTRODUCTION = "finish_introduction"
    SUBMIT_PRACTICE = "submit_practice"
    SUBMIT_ASSESSMENT = "submit_assessment"


SUBMISSION_KINDS = (EventKind.SUBMIT_PRACTICE, EventKind.SUBMIT_ASSESSMENT)


@dataclass(frozen=True)
class Event:
    kind: EventKind
    judgement: SegmentJudgement | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        if self.kind in SUBMISSION_KINDS and self.judgement is None:
            raise SessionError(f"{self.kind.value} requires a judgement payload")
        if self.kind not in SUBMISSION_KINDS and self.judgement is not None:
            raise SessionError(f"{self.kind.value} takes no payload")


@dataclass(frozen=True)
class Session:
    session_id: str
    assessor_id: str
    campaign_id: str
    state: SessionState
    queue: tuple[WorkUnit, ...]
    submissions: tuple[SegmentJudgement, ...] = ()
    practice_submissions: tuple[SegmentJudgement, ...] = ()


def session_id_for(campaign_id: str, assessor_id: str) -> str:
    return f"{campaign_id}:{assessor_id}"


def shuffle_units(units: Sequence[WorkUnit], shuffle_seed: int, assessor_id: str) -> tuple[WorkUnit, ...]:
    """Per-assessor Fisher-Yates permutation, stable across runs and platforms."""
    digest = hashlib.sha256(f"{shuffle_seed}:{assessor_id}".encode("utf-8")).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    shuffled = list(units)
    for i in range(len(shuffled) - 1, 0, -1):
        j = rng.randrange(i + 1)
        shuffled[i], shuffled[j] = shuffled[j], shuffled[i]
    return tuple(shuffled)


def start_session(campaign: Campaign, assessor_id: str) -> Session:
    if assessor_id not in campaign.assessors:
        raise SessionError(f"assessor {assessor_id!r} is not registered in campaign {campaign.campaign_id!r}")
    return Session(
        session_id=session_id_for(campaign.campaign_id, assessor_id),
        assessor_id=assessor_id,
        campaign_id=campaign.campaign_id,
        state=SessionState(Phase.CONSENT),
        queue=shuffle_units(campaign.work_units(), campaign.shuffle_seed, assessor_id),
    )


def coverage_errors(judgement: SegmentJudgement, item: EvaluationItem) -> list[str]:
    """Why the judgement does not cover exactly the item's spans (empty = ok)."""
    judged = judgement.span_ids()
    expected = item.span_ids()
    errors = []
    missing = sorted(expected - judged)
    extra = sorted(judged - expected)
    if missing:
        errors.append(f"missing judgements for spans {missing}")
    if extra:
        errors.append(f"judgements for unknown spans {extra}")
    return errors


def _check_submission(judgement: SegmentJudgement, session: Session, item: EvaluationItem, unit: WorkUnit) -> None:
    if (judgement.item_id, judgement.system_id) != (unit.item_id, unit.system_id):
        raise SubmissionError(
            f"judgement targets ({judgement.item_id!r}, {judgement.system_id!r}) but the "
            f"current unit is ({unit.item_id!r}, {unit.system_id!r})"
        )
    if judgement.assessor_id != session.assessor_id:
        raise SubmissionError(
            f"judgement by {judgement.assessor_id!r} submitted in {session.assessor_id!r}'s session"
        )
    errors = coverage_errors(judgement, item)
    if errors:
        raise SubmissionError(f"incomplete judgement for item {item.item_id!r}: " + "; ".join(errors))


def _practice_unit(campaign: Campaign, k: int) -> PracticeItem:
    return campaign.practice_items[k]


def advance(session: Session, event: Event, campaign: Campaign) -> Session:
    """Apply one event; every (state, event) pair either transitions or raises."""
    if campaign.campaign_id != session.campaign_id:
        raise SessionError("event applied against the wrong campaign")
    state = session.state
    kind = event.kind

    if state.phase in TERMINAL_PHASES:
        raise IllegalTransition(f"session is {state.phase.value}; no further events accepted")

    if state.phase is Phase.CONSENT:
        if kind is EventKind.ACCEPT_CONSENT:
            return replace(session, state=SessionState(Phase.INTRODUCTION))
        if kind is EventKind.DECLINE_CONSENT:
            return replace(session, state=SessionState(Phase.DECLINED))

    elif state.phase is Phase.INTRODUCTION:
        if kind is EventKind.FINISH_INTRODUCTION:
            return replace(session, state=SessionState(Phase.PRACTICE, practice_done=0))

    elif state.phase is Phase.PRACTICE:
        if kind is EventKind.SUBMIT_PRACTICE:
            practice = _practice_unit(campaign, state.practice_done)
            _check_submission(
                event.judgement,
                session,
                practice.item,
                WorkUnit(practice.item.item_id, practice.output.system_id),
            )
            done = state.practice_done + 1
            if done < len(campaign.practice_items):
                next_state = SessionState(Phase.PRACTICE, practice_done=done)
            elif session.queue:
                next_state = SessionState(Phase.ASSESSMENT, practice_done=done, next_index=0)
            else:
                next_state = SessionState(Phase.COMPLETE, practice_done=done)
            return replace(
                session,
                state=next_state,
                practice_submissions=session.practice_submissions + (event.judgement,),
            )

    elif state.phase is Phase.ASSESSMENT:
        if kind is EventKind.SUBMIT_ASSESSMENT:
            unit = session.queue[state.next_index]
            _check_submission(event.judgement, session, campaign.item(unit.item_id), unit)
            nxt = state.next_index + 1
            phase = Phase.COMPLETE if nxt == len(session.queue) else Phase.ASSESSMENT
            return replace(
                session,
                state=SessionState(phase, practice_done=state.practice_done, next_index=nxt),
                submissions=session.submissions + (event.judgement,),
            )

    raise IllegalTransition(f"event {kind.value!r} is not legal in state {state.phase.value!r}")


@dataclass(frozen=True)
class PracticeFeedback:
    """Advisory comparison of a practice submission against the gold judgement."""

    general_delta: float
    category_matches: dict[str, bool]

    def to_dict(self) -> dict:
        return {
            "general_delta": self.general_delta,
            "category_matches": dict(sorted(self.category_matches.items())),
        }


def check_practice(judgement: SegmentJudgement, practice: PracticeItem) -> PracticeFeedback:
    """Compare a practice judgement span-wise against the gold answer."""
    errors = coverage_errors(judgement, practice.item)
    if errors:
        raise SubmissionError("practice judgement spans do not match the gold item: " + "; ".join(errors))
    gold_by_span = {m.span_id: m for m in practice.gold.mwe_judgements}
    matches = {
        m.span_id: m.category == gold_by_span[m.span_id].category for m in judgement.mwe_judgements
    }
    return PracticeFeedback(
        general_delta=abs(judgement.general - practice.gold.general),
        category_matches=matches,
    )


def current_unit(session: Session, campaign: Campaign) -> tuple[EvaluationItem, SystemOutput] | None:
    """The (item, output) the assessor should judge next, if any."""
    state = session.state
    if state.phase is Phase.PRACTICE and state.practice_done < len(campaign.practice_items):
        practice = campaign.practice_items[state.practice_done]
        return practice.item, practice.output
    if state.phase is Phase.ASSESSMENT and state.next_index < len(session.queue):
        unit = session.queue[state.next_index]
        return campaign.item(unit.item_id), campaign.output(unit.item_id, unit.system_id)
    return None


def event_to_record(session_id: str, seq: int, event: Event, timestamp: str) -> dict:
    """Event-log line: {session_id, seq, event_kind, payload, timestamp}."""
    payload = event.judgement.to_dict() if event.judgement is not None else {}
    return {
        "session_id": session_id,
        "seq": seq,
        "event_kind": event.kind.value,
        "payload": payload,
        "timestamp": timestamp,
    }


def event_from_record(record: Mapping) -> Event:
    kind = EventKind(record["event_kind"])
    judgement = None
    if kind in SUBMISSION_KINDS:
        judgement = SegmentJudgement.from_dict(record["payload"])
    return Event(kind=kind, judgement=judgement)


def replay(campaign: Campaign, assessor_id: str, records: Iterable[Mapping]) -> Session:
    """Rebuild a session by replaying its event-log records in seq order."""
    session = start_session(campaign, assessor_id)
    expected_seq = 0
    for record in sorted(records, key=lambda r: r["seq"]):
        if record["seq"] != expected_seq:
            raise SessionError(
                f"event log for session {session.session_id!r} has seq {record['seq']} "
                f"where {expected_seq} was expected"
            )
        session = advance(session, event_from_record(record), campaign)
        expected_seq += 1
    return session
