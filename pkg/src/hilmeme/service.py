"""HTTP API for campaign administration and live assessor sessions.

The annotator UI talks only to these endpoints:

    POST /campaigns                      create a campaign (idempotent)
    POST /campaigns/{id}/sessions        start (or resume) an assessor session
    GET  /sessions/{token}/current       what to show next + step prompts
    POST /sessions/{token}/submit        apply one workflow event
    GET  /campaigns/{id}/report          json (default) or csv
    GET  /campaigns/{id}/termbank        json (default) or tsv
    GET  /campaigns/{id}/judgements      judgement log export, json-lines

Every session event is persisted before the response is sent.  Validation
failures answer 422 with the offending field or span, illegal workflow
transitions answer 409, unknown ids answer 404.
"""

from __future__ import annotations

from typing import Mapping

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, Response
from pydantic import BaseModel, Field

from . import analytics
from .campaign import Campaign, CampaignError, PracticeItem
from .corpus import (
    CorpusError,
    EvaluationItem,
    SystemOutput,
    ingest_corpus,
    parse_system_outputs,
    validate_item,
)
from .schema import SCHEMA_VERSION
from .scoring import JudgementError, SegmentJudgement, make_mwe_judgement
from .session import (
    Event,
    EventKind,
    IllegalTransition,
    Phase,
    Session,
    SessionError,
    current_unit,
)
from .store import (
    CampaignStore,
    ConflictError,
    StoreError,
    UnknownCampaignError,
    UnknownTokenError,
    payload_digest,
    utc_now_iso,
)

PROMPTS = {
    "consent": (
        "You are invited to assess machine-translated text. Your judgements are "
        "stored with an opaque assessor id and used for research on translation "
        "quality. Participation is voluntary; you may decline now."
    ),
    "introduction": (
        "Each screen shows a source segment, a reference translation, and one "
        "candidate translation. You judge the candidate in three steps: an "
        "overall 0-10 score, a verdict on each highlighted expression, and a "
        "difficulty weighting per expression. Three practice rounds with "
        "feedback come first; practice answers are not counted."
    ),
    "step1": {
        "title": "How good is the candidate translation overall?",
        "scale": [0, 10],
        "guidance": {
            "fluency": "Is the candidate well-formed, grammatical text in the target language?",
            "adequacy": "Does the candidate preserve all of the meaning of the source and reference?",
        },
    },
    "step2": {
        "title": "How was each highlighted expression translated?",
        "choices": {
            "ref_mwe": "With a reference expression (score locked at 10)",
            "alt_mwe": "With a different but correct expression (score locked at 10; type what was used)",
            "non_mwe": "With plain wording instead of an expression (give a 0-10 score)",
            "null": "Not translated, lost, or left untranslated (score locked at 0)",
        },
    },
    "step3": {
        "title": "Where does the expression make translation hard, and how much?",
        "aspects": {
            "sem": "Semantics: the meaning of the expression and its parts",
            "gra": "Grammar: syntax and word formation",
            "idi": "Idiomaticity: meaning not derivable from the individual words",
            "amb": "Ambiguity: open to more than one reading, incl. domain senses",
        },
        "weight_scale": [0, 1],
    },
}


class PracticePayload(BaseModel):
    item: dict
    output: dict
    gold: dict


class CreateCampaignBody(BaseModel):
    campaign_id: str | None = None
    corpus_jsonl: str
    corpus_format: str = "jsonl"
    outputs_jsonl: str = ""
    practice: list[PracticePayload]
    assessors: list[str]
    shuffle_seed: int = 0
    plain_threshold: float = 8.0
    client_token: str | None = None


class StartSessionBody(BaseModel):
    assessor_id: str


class SubmitBody(BaseModel):
    seq: int = Field(ge=0)
    kind: str
    judgement: dict | None = None


def parse_judgement_payload(
    payload: Mapping,
    *,
    assessor_id: str,
    submitted_at: str,
    item_id: str | None = None,
    system_id: str | None = None,
) -> SegmentJudgement:
    """Build a judgement from a client payload, applying all score rules."""
    try:
        item_id = item_id if item_id is not None else payload["item_id"]
        system_id = system_id if system_id is not None else payload["system_id"]
        general = payload["general"]
        raw_mwes = payload.get("mwes", [])
    except KeyError as exc:
        raise JudgementError(f"judgement payload missing field {exc}") from None

    mwes = []
    for raw in raw_mwes:
        span_id = raw.get("span_id", "?")
        try:
            mwes.append(
                make_mwe_judgement(
                    raw["span_id"],
                    raw["category"],
                    weight=raw["weight"],
                    aspects=raw.get("aspects", ()),
                    assessor_score=raw.get("assessor_score"),
                    captured_rendering=raw.get("captured_rendering"),
                )
            )
        except KeyError as exc:
            raise JudgementError(f"span {span_id!r}: missing field {exc}", span_id=span_id) from None
        except JudgementError as exc:
            if exc.span_id is None:
                raise JudgementError(f"span {span_id!r}: {exc}", span_id=span_id) from None
            raise
    return SegmentJudgement(
        item_id=item_id,
        system_id=system_id,
        assessor_id=assessor_id,
        general=general,
        mwe_judgements=tuple(mwes),
        submitted_at=submitted_at,
    )


def _http_error(status: int, exc: Exception) -> HTTPException:
    detail = {"error": str(exc), "kind": type(exc).__name__}
    span_id = getattr(exc, "span_id", None)
    if span_id is not None:
        detail["span_id"] = span_id
    return HTTPException(status_code=status, detail=detail)


def _state_payload(session: Session, campaign: Campaign, next_seq: int) -> dict:
    return {
        "session_id": session.session_id,
        "campaign_id": session.campaign_id,
        "assessor_id": session.assessor_id,
        "state": session.state.to_dict(),
        "next_seq": next_seq,
        "progress": {
            "practice_done": session.state.practice_done,
            "practice_total": len(campaign.practice_items),
            "assessment_done": len(session.submissions),
            "assessment_total": len(session.queue),
        },
    }


def _unit_payload(session: Session, campaign: Campaign) -> dict | None:
    pair = current_unit(session, campaign)
    if pair is None:
        return None
    item, output = pair
    return {
        "kind": "practice" if session.state.phase is Phase.PRACTICE else "assessment",
        "item_id": item.item_id,
        "system_id": output.system_id,
        "source": item.source_text,
        "tokens": list(item.source_tokens),
        "reference": item.reference_text,
        "hypothesis": output.hypothesis_text,
        "mwes": [span.to_dict() for span in item.mwe_spans],
    }


def build_campaign(body: CreateCampaignBody) -> Campaign:
    """Assemble and validate a campaign from a creation request."""
    items = ingest_corpus(body.corpus_jsonl, body.corpus_format)
    outputs = parse_system_outputs(body.outputs_jsonl)
    campaign_id = body.campaign_id or "c-" + payload_digest(body.model_dump(exclude={"client_token"}))[:12]

    practice = []
    for p in body.practice:
        try:
            item = EvaluationItem.from_dict(p.item)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"malformed practice item: {exc!r}") from None
        violations = validate_item(item)
        if violations:
            detail = "; ".join(v.message for v in violations)
            raise CorpusError(f"invalid practice item {item.item_id!r}: {detail}")
        output = SystemOutput.from_dict(p.output)
        gold = parse_judgement_payload(
            p.gold,
            assessor_id="gold",
            submitted_at="",
            item_id=item.item_id,
            system_id=output.system_id,
        )
        practice.append(PracticeItem(item=item, output=output, gold=gold))

    return Campaign(
        campaign_id=campaign_id,
        items=tuple(items),
        outputs=tuple(outputs),
        practice_items=tuple(practice),
        assessors=tuple(body.assessors),
        shuffle_seed=body.shuffle_seed,
        plain_threshold=body.plain_threshold,
    )


def create_app(store: CampaignStore) -> FastAPI:
    app = FastAPI(title="hilmeme", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/campaigns", status_code=201)
    def create_campaign(body: CreateCampaignBody):
        try:
            campaign = build_campaign(body)
            campaign_id = store.create_campaign(campaign, client_token=body.client_token)
        except (CorpusError, CampaignError, JudgementError, StoreError) as exc:
            if isinstance(exc, ConflictError):
                raise _http_error(409, exc) from None
            raise _http_error(422, exc) from None
        plan = store.get_campaign(campaign_id).work_plan
        return {
            "schema_version": SCHEMA_VERSION,
            "campaign_id": campaign_id,
            "units": len(plan.units),
            "coverage_gaps": [u.to_dict() for u in plan.missing],
        }

    @app.post("/campaigns/{campaign_id}/sessions", status_code=201)
    def start_session(campaign_id: str, body: StartSessionBody):
        try:
            token, session = store.start_session(campaign_id, body.assessor_id)
        except UnknownCampaignError as exc:
            raise _http_error(404, exc) from None
        except SessionError as exc:
            raise _http_error(422, exc) from None
        campaign = store.get_campaign(campaign_id)
        _, _, next_seq = store.resolve_token(token)
        return {"token": token, **_state_payload(session, campaign, next_seq)}

    @app.get("/sessions/{token}/current")
    def get_current(token: str):
        try:
            campaign, session, next_seq = store.resolve_token(token)
        except UnknownTokenError as exc:
            raise _http_error(404, exc) from None
        payload = _state_payload(session, campaign, next_seq)
        payload["unit"] = _unit_payload(session, campaign)
        payload["prompts"] = PROMPTS
        return payload

    @app.post("/sessions/{token}/submit")
    def submit(token: str, body: SubmitBody):
        try:
            campaign, session, _ = store.resolve_token(token)
        except UnknownTokenError as exc:
            raise _http_error(404, exc) from None
        try:
            kind = EventKind(body.kind)
        except ValueError as exc:
            raise _http_error(422, exc) from None

        judgement = None
        if body.judgement is not None:
            try:
                judgement = parse_judgement_payload(
                    body.judgement, assessor_id=session.assessor_id, submitted_at=utc_now_iso()
                )
            except JudgementError as exc:
                raise _http_error(422, exc) from None

        try:
            event = Event(kind=kind, judgement=judgement)
            advanced, feedback, next_seq = store.submit_event(token, body.seq, event)
        except (IllegalTransition, ConflictError) as exc:
            raise _http_error(409, exc) from None
        except SessionError as exc:
            raise _http_error(422, exc) from None

        payload = _state_payload(advanced, campaign, next_seq)
        payload["feedback"] = feedback.to_dict() if feedback is not None else None
        return payload

    @app.get("/campaigns/{campaign_id}/report")
    def report(campaign_id: str, format: str = "json"):
        try:
            campaign = store.get_campaign(campaign_id)
        except UnknownCampaignError as exc:
            raise _http_error(404, exc) from None
        judgements = store.judgements(campaign_id)
        reports = analytics.all_system_reports(judgements)
        if format == "csv":
            return PlainTextResponse(analytics.report_to_csv(reports), media_type="text/csv")
        if format != "json":
            raise _http_error(422, ValueError(f"unknown report format {format!r}"))
        tally = analytics.overall_tally(judgements)
        try:
            agreement = analytics.agreement(judgements)
        except analytics.AnalyticsError:
            agreement = None
        body = analytics.report_to_json(campaign.campaign_id, reports, tally, agreement)
        return Response(content=body, media_type="application/json")

    @app.get("/campaigns/{campaign_id}/termbank")
    def termbank(campaign_id: str, format: str = "json"):
        try:
            campaign = store.get_campaign(campaign_id)
        except UnknownCampaignError as exc:
            raise _http_error(404, exc) from None
        entries = analytics.extract_term_bank(
            store.judgements(campaign_id), campaign.items, campaign.plain_threshold
        )
        if format == "tsv":
            return PlainTextResponse(
                analytics.termbank_to_tsv(entries), media_type="text/tab-separated-values"
            )
        if format != "json":
            raise _http_error(422, ValueError(f"unknown termbank format {format!r}"))
        return Response(content=analytics.termbank_to_json(entries), media_type="application/json")

    @app.get("/campaigns/{campaign_id}/judgements")
    def judgements(campaign_id: str):
        try:
            body = store.export_judgements(campaign_id)
        except UnknownCampaignError as exc:
            raise _http_error(404, exc) from None
        return PlainTextResponse(body, media_type="application/x-ndjson")

    return app
