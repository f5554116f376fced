"""Durable campaign storage: append-only event logs replayed at startup.

Layout under the data directory, one subdirectory per campaign:

    <campaign_id>/campaign.json        # frozen definition
    <campaign_id>/meta.json            # creation idempotency token + payload hash
    <campaign_id>/outputs-extra.jsonl  # outputs added after creation
    <campaign_id>/events.jsonl         # the log: all session events, interleaved
    <campaign_id>/metrics/<name>.jsonl # automatic-metric score files

``events.jsonl`` is the single source of truth for session state and for the
judgement log: replaying any prefix of it yields a valid store, and the
judgement records (strictly increasing ``seq`` per campaign) are the
assessment submissions in file order.  A torn trailing line (interrupted
write) is discarded on load; garbage earlier in the file is an error.

Every append is flushed and fsynced before the caller is acknowledged.
Submissions are at-most-once: the client sends the event sequence number it
believes it is producing, and a replayed number is answered from the log
instead of being applied twice.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .campaign import Campaign
from .corpus import SystemOutput
from .schema import SCHEMA_VERSION
from .scoring import SegmentJudgement
from .session import (
    Event,
    EventKind,
    PracticeFeedback,
    Phase,
    Session,
    check_practice,
    event_from_record,
    event_to_record,
    session_id_for,
    start_session,
)
from .session import advance as advance_session

CAMPAIGN_FILE = "campaign.json"
META_FILE = "meta.json"
EVENTS_FILE = "events.jsonl"
EXTRA_OUTPUTS_FILE = "outputs-extra.jsonl"
METRICS_DIR = "metrics"

_SAFE_ID = re.compile(r"^[A-Za-z0-9._-]+$")


class StoreError(Exception):
    pass


class UnknownCampaignError(StoreError):
    pass


class UnknownTokenError(StoreError):
    pass


class ConflictError(StoreError):
    """An append conflicts with what the log already contains."""


class CorruptLogError(StoreError):
    pass


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def payload_digest(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def session_token(campaign: Campaign, assessor_id: str) -> str:
    material = f"{campaign.campaign_id}:{campaign.shuffle_seed}:{assessor_id}"
    return hashlib.sha256(material.encode("utf-8")).hexdigest()[:32]


@dataclass(frozen=True)
class JudgementRecord:
    """One immutable judgement-log record."""

    seq: int
    campaign_id: str
    judgement: SegmentJudgement
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "seq": self.seq,
            "campaign_id": self.campaign_id,
            "judgement": self.judgement.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "JudgementRecord":
        return cls(
            seq=int(d["seq"]),
            campaign_id=d["campaign_id"],
            judgement=SegmentJudgement.from_dict(d["judgement"]),
            schema_version=int(d.get("schema_version", SCHEMA_VERSION)),
        )


def export_judgement_records(records: Iterable[JudgementRecord]) -> str:
    return "".join(canonical_json(r.to_dict()) + "\n" for r in records)


def parse_judgement_export(stream: str | Iterable[str]) -> list[JudgementRecord]:
    """Read a judgement export back in; inverse of ``export_judgement_records``."""
    lines = stream.splitlines() if isinstance(stream, str) else stream
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(JudgementRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise StoreError(f"line {lineno}: malformed judgement record: {exc!r}") from None
    return records


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _append_line(path: Path, line: str) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def _read_log_lines(path: Path) -> list[dict]:
    """Parse a jsonl log, repairing a torn trailing line in place.

    A file not ending in a newline was interrupted mid-append.  If the torn
    chunk is complete json the record is kept and the missing newline written
    back (so later appends start on a fresh line); otherwise the chunk is
    truncated away - that event was never acknowledged.  Garbage anywhere
    else is corruption, not a crash artifact.
    """
    if not path.exists():
        return []
    raw = path.read_text(encoding="utf-8")
    lines = raw.split("\n")
    torn = lines.pop() if lines else ""
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptLogError(f"{path}: line {lineno}: {exc}") from None
    if torn.strip():
        try:
            records.append(json.loads(torn))
        except json.JSONDecodeError:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("".join(line + "\n" for line in lines))
                fh.flush()
                os.fsync(fh.fileno())
        else:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
    return records


class _SessionSlot:
    """Mutable per-session bookkeeping around the immutable Session value."""

    def __init__(self, session: Session):
        self.session = session
        self.applied: list[tuple[str, str | None, str | None]] = []  # (kind, item, system)

    @property
    def next_seq(self) -> int:
        return len(self.applied)


class _CampaignSlot:
    def __init__(self, campaign: Campaign):
        self.campaign = campaign
        self.sessions: dict[str, _SessionSlot] = {}
        self.judgements: list[JudgementRecord] = []
        self.event_count = 0


class CampaignStore:
    """All campaigns under one data directory, replayed into memory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._slots: dict[str, _CampaignSlot] = {}
        self._tokens: dict[str, tuple[str, str]] = {}
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and (entry / CAMPAIGN_FILE).exists():
                self._load_campaign_dir(entry)

    # -- loading ----------------------------------------------------------

    def _load_campaign_dir(self, path: Path) -> None:
        try:
            definition = json.loads((path / CAMPAIGN_FILE).read_text(encoding="utf-8"))
            campaign = Campaign.from_dict(definition)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CorruptLogError(f"{path / CAMPAIGN_FILE}: {exc!r}") from None
        for record in _read_log_lines(path / EXTRA_OUTPUTS_FILE):
            campaign = campaign.with_outputs([SystemOutput.from_dict(record)])
        slot = _CampaignSlot(campaign)
        self._slots[campaign.campaign_id] = slot
        self._register_tokens(campaign)
        for record in _read_log_lines(path / EVENTS_FILE):
            self._apply_event_record(slot, record)

    def _register_tokens(self, campaign: Campaign) -> None:
        for assessor_id in campaign.assessors:
            self._tokens[session_token(campaign, assessor_id)] = (campaign.campaign_id, assessor_id)

    def _apply_event_record(self, slot: _CampaignSlot, record: dict) -> None:
        campaign = slot.campaign
        session_id = record["session_id"]
        prefix = campaign.campaign_id + ":"
        if not session_id.startswith(prefix):
            raise CorruptLogError(f"event for foreign session {session_id!r} in {campaign.campaign_id!r}")
        assessor_id = session_id[len(prefix):]
        sslot = slot.sessions.get(session_id)
        if sslot is None:
            try:
                sslot = _SessionSlot(start_session(campaign, assessor_id))
            except ValueError as exc:
                raise CorruptLogError(f"cannot replay session {session_id!r}: {exc}") from None
            slot.sessions[session_id] = sslot
        if record["seq"] != sslot.next_seq:
            raise CorruptLogError(
                f"session {session_id!r}: log seq {record['seq']} where {sslot.next_seq} expected"
            )
        try:
            event = event_from_record(record)
            sslot.session = advance_session(sslot.session, event, campaign)
        except ValueError as exc:
            raise CorruptLogError(f"session {session_id!r}: cannot replay event: {exc}") from None
        self._commit_event(slot, sslot, event)

    def _commit_event(self, slot: _CampaignSlot, sslot: _SessionSlot, event: Event) -> None:
        j = event.judgement
        sslot.applied.append(
            (event.kind.value, j.item_id if j else None, j.system_id if j else None)
        )
        slot.event_count += 1
        if event.kind is EventKind.SUBMIT_ASSESSMENT:
            slot.judgements.append(
                JudgementRecord(seq=len(slot.judgements), campaign_id=slot.campaign.campaign_id, judgement=j)
            )

    # -- campaign administration ------------------------------------------

    def _dir(self, campaign_id: str) -> Path:
        return self.root / campaign_id

    def _slot(self, campaign_id: str) -> _CampaignSlot:
        try:
            return self._slots[campaign_id]
        except KeyError:
            raise UnknownCampaignError(f"unknown campaign {campaign_id!r}") from None

    def campaign_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._slots)

    def get_campaign(self, campaign_id: str) -> Campaign:
        with self._lock:
            return self._slot(campaign_id).campaign

    def create_campaign(self, campaign: Campaign, client_token: str | None = None) -> str:
        """Persist a new campaign; identical payload + token is a no-op."""
        if not _SAFE_ID.match(campaign.campaign_id):
            raise StoreError(
                f"campaign id {campaign.campaign_id!r} must match {_SAFE_ID.pattern}"
            )
        digest = payload_digest(campaign.to_dict())
        with self._lock:
            existing = self._slots.get(campaign.campaign_id)
            if existing is not None:
                meta_path = self._dir(campaign.campaign_id) / META_FILE
                meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}
                if meta.get("payload_hash") == digest and meta.get("client_token") == client_token:
                    return campaign.campaign_id
                raise ConflictError(
                    f"campaign {campaign.campaign_id!r} already exists with a different payload"
                )
            path = self._dir(campaign.campaign_id)
            path.mkdir(parents=True, exist_ok=True)
            _atomic_write(path / CAMPAIGN_FILE, canonical_json(campaign.to_dict()) + "\n")
            _atomic_write(
                path / META_FILE,
                canonical_json(
                    {"client_token": client_token, "payload_hash": digest, "created_at": utc_now_iso()}
                )
                + "\n",
            )
            self._slots[campaign.campaign_id] = _CampaignSlot(campaign)
            self._register_tokens(campaign)
            return campaign.campaign_id

    def add_outputs(self, campaign_id: str, outputs: Iterable[SystemOutput]) -> Campaign:
        """Bind more system outputs; only legal before any session event exists."""
        outputs = list(outputs)
        with self._lock:
            slot = self._slot(campaign_id)
            if slot.event_count:
                raise ConflictError(
                    "cannot add system outputs once assessment sessions have started"
                )
            updated = slot.campaign.with_outputs(outputs)  # validates references
            for output in outputs:
                _append_line(self._dir(campaign_id) / EXTRA_OUTPUTS_FILE, canonical_json(output.to_dict()))
            slot.campaign = updated
            return updated

    # -- metric scores ------------------------------------------------------

    def add_metric_scores(self, campaign_id: str, name: str, text: str) -> int:
        if not _SAFE_ID.match(name):
            raise StoreError(f"metric name {name!r} must match {_SAFE_ID.pattern}")
        count = 0
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                str(record["system_id"])
                float(record["score"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise StoreError(f"line {lineno}: malformed metric score: {exc!r}") from None
            count += 1
        if text and not text.endswith("\n"):
            text += "\n"
        with self._lock:
            self._slot(campaign_id)
            metrics_dir = self._dir(campaign_id) / METRICS_DIR
            metrics_dir.mkdir(parents=True, exist_ok=True)
            _atomic_write(metrics_dir / f"{name}.jsonl", text)
        return count

    def metric_names(self, campaign_id: str) -> list[str]:
        with self._lock:
            self._slot(campaign_id)
            metrics_dir = self._dir(campaign_id) / METRICS_DIR
            if not metrics_dir.exists():
                return []
            return sorted(p.stem for p in metrics_dir.glob("*.jsonl"))

    def read_metric_scores(self, campaign_id: str, name: str) -> str:
        with self._lock:
            self._slot(campaign_id)
            path = self._dir(campaign_id) / METRICS_DIR / f"{name}.jsonl"
            if not path.exists():
                raise StoreError(f"no metric scores named {name!r} for campaign {campaign_id!r}")
            return path.read_text(encoding="utf-8")

    # -- sessions -----------------------------------------------------------

    def start_session(self, campaign_id: str, assessor_id: str) -> tuple[str, Session]:
        """Idempotent: an existing session is returned as-is with its token."""
        with self._lock:
            slot = self._slot(campaign_id)
            token = session_token(slot.campaign, assessor_id)
            session_id = session_id_for(campaign_id, assessor_id)
            sslot = slot.sessions.get(session_id)
            if sslot is None:
                sslot = _SessionSlot(start_session(slot.campaign, assessor_id))  # raises on unknown assessor
                slot.sessions[session_id] = sslot
            return token, sslot.session

    def resolve_token(self, token: str) -> tuple[Campaign, Session, int]:
        """(campaign, session, next event seq) for an assessor token."""
        with self._lock:
            try:
                campaign_id, assessor_id = self._tokens[token]
            except KeyError:
                raise UnknownTokenError("unknown session token") from None
            slot = self._slot(campaign_id)
            session_id = session_id_for(campaign_id, assessor_id)
            sslot = slot.sessions.get(session_id)
            if sslot is None:
                sslot = _SessionSlot(start_session(slot.campaign, assessor_id))
                slot.sessions[session_id] = sslot
            return slot.campaign, sslot.session, sslot.next_seq

    def submit_event(self, token: str, seq: int, event: Event) -> tuple[Session, PracticeFeedback | None, int]:
        """Apply one session event at-most-once; persist before acknowledging.

        Returns (session after the event, practice feedback if any, next seq).
        A retry of an already-applied seq with the same shape is answered
        without re-applying; a mismatched or out-of-order seq is a conflict.
        """
        with self._lock:
            campaign, session, next_seq = self.resolve_token(token)
            slot = self._slot(campaign.campaign_id)
            sslot = slot.sessions[session.session_id]

            if seq < next_seq:
                j = event.judgement
                attempted = (event.kind.value, j.item_id if j else None, j.system_id if j else None)
                if sslot.applied[seq] == attempted:
                    return sslot.session, None, sslot.next_seq
                raise ConflictError(
                    f"event seq {seq} was already applied with a different payload"
                )
            if seq > next_seq:
                raise ConflictError(f"event seq {seq} is ahead of the log (expected {next_seq})")

            feedback = None
            if event.kind is EventKind.SUBMIT_PRACTICE and sslot.session.state.phase is Phase.PRACTICE:
                practice = campaign.practice_items[sslot.session.state.practice_done]
                feedback = check_practice(event.judgement, practice)

            advanced = advance_session(sslot.session, event, campaign)  # raises before anything persists
            record = event_to_record(session.session_id, seq, event, utc_now_iso())
            _append_line(self._dir(campaign.campaign_id) / EVENTS_FILE, canonical_json(record))
            sslot.session = advanced
            self._commit_event(slot, sslot, event)
            return advanced, feedback, sslot.next_seq

    def sessions(self, campaign_id: str) -> list[Session]:
        with self._lock:
            slot = self._slot(campaign_id)
            return [s.session for _, s in sorted(slot.sessions.items())]

    # -- judgement log -------------------------------------------------------

    def judgement_records(self, campaign_id: str) -> list[JudgementRecord]:
        with self._lock:
            return list(self._slot(campaign_id).judgements)

    def judgements(self, campaign_id: str) -> list[SegmentJudgement]:
        return [r.judgement for r in self.judgement_records(campaign_id)]

    def export_judgements(self, campaign_id: str) -> str:
        return export_judgement_records(self.judgement_records(campaign_id))
