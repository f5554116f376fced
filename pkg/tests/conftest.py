"""Shared fixtures: a small idiom corpus, two systems, and judgement builders."""

from __future__ import annotations

import json

import pytest

from hilmeme.campaign import Campaign, PracticeItem
from hilmeme.corpus import EvaluationItem, SystemOutput, ingest_corpus, parse_system_outputs
from hilmeme.scoring import (
    Aspect,
    MweCategory,
    MweJudgement,
    SegmentJudgement,
    make_mwe_judgement,
)

FIXED_TS = "2026-01-01T00:00:00+00:00"

CORPUS_RECORDS = [
    {
        "item_id": "i1",
        "source": "he will kick the bucket soon",
        "reference": "er wird bald das Zeitliche segnen",
        "mwes": [
            {
                "id": "m1",
                "start": 2,
                "end": 5,
                "surface": "kick the bucket",
                "refs": ["das Zeitliche segnen", "den Löffel abgeben"],
            }
        ],
    },
    {
        "item_id": "i2",
        "source": "it was raining cats and dogs",
        "reference": "es regnete in Strömen",
        "mwes": [
            {
                "id": "m1",
                "start": 2,
                "end": 6,
                "surface": "raining cats and dogs",
                "refs": ["es regnet in Strömen"],
            }
        ],
        "domain": "weather",
    },
    {
        "item_id": "i3",
        "source": "the weather is nice",
        "reference": "das Wetter ist schön",
        "mwes": [],
    },
]

OUTPUT_RECORDS = [
    {"system_id": "sysA", "item_id": "i1", "hypothesis": "er wird bald das Zeitliche segnen"},
    {"system_id": "sysA", "item_id": "i2", "hypothesis": "es regnete sehr stark"},
    {"system_id": "sysA", "item_id": "i3", "hypothesis": "das Wetter ist schön"},
    {"system_id": "sysB", "item_id": "i1", "hypothesis": "er wird bald den Eimer treten"},
    {"system_id": "sysB", "item_id": "i2", "hypothesis": "es regnete Katzen und Hunde"},
    {"system_id": "sysB", "item_id": "i3", "hypothesis": "das Wetter ist gut"},
]

PRACTICE_PAYLOAD = [
    {
        "item": {
            "item_id": "p1",
            "source": "she let the cat out of the bag",
            "reference": "sie hat die Katze aus dem Sack gelassen",
            "mwes": [
                {
                    "id": "m1",
                    "start": 1,
                    "end": 8,
                    "surface": "let the cat out of the bag",
                    "refs": ["die Katze aus dem Sack lassen"],
                }
            ],
        },
        "output": {"system_id": "sysP", "item_id": "p1", "hypothesis": "sie hat das Geheimnis verraten"},
        "gold": {
            "general": 8,
            "mwes": [
                {"span_id": "m1", "category": "non_mwe", "assessor_score": 7, "weight": 0.8, "aspects": ["idi"]}
            ],
        },
    },
    {
        "item": {
            "item_id": "p2",
            "source": "he hit the nail on the head",
            "reference": "er hat den Nagel auf den Kopf getroffen",
            "mwes": [
                {
                    "id": "m1",
                    "start": 1,
                    "end": 7,
                    "surface": "hit the nail on the head",
                    "refs": ["den Nagel auf den Kopf treffen"],
                }
            ],
        },
        "output": {
            "system_id": "sysP",
            "item_id": "p2",
            "hypothesis": "er hat den Nagel auf den Kopf getroffen",
        },
        "gold": {
            "general": 9,
            "mwes": [{"span_id": "m1", "category": "ref_mwe", "weight": 0.6, "aspects": ["sem", "idi"]}],
        },
    },
    {
        "item": {
            "item_id": "p3",
            "source": "time flies",
            "reference": "die Zeit vergeht wie im Flug",
            "mwes": [],
        },
        "output": {"system_id": "sysP", "item_id": "p3", "hypothesis": "die Zeit fliegt"},
        "gold": {"general": 5, "mwes": []},
    },
]


def corpus_text() -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in CORPUS_RECORDS)


def outputs_text() -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in OUTPUT_RECORDS)


def gold_judgement(payload: dict, item_id: str, system_id: str) -> SegmentJudgement:
    mwes = tuple(
        make_mwe_judgement(
            m["span_id"],
            m["category"],
            weight=m["weight"],
            aspects=m.get("aspects", ()),
            assessor_score=m.get("assessor_score"),
            captured_rendering=m.get("captured_rendering"),
        )
        for m in payload["mwes"]
    )
    return SegmentJudgement(
        item_id=item_id,
        system_id=system_id,
        assessor_id="gold",
        general=payload["general"],
        mwe_judgements=mwes,
    )


def build_practice_items() -> tuple[PracticeItem, ...]:
    practice = []
    for p in PRACTICE_PAYLOAD:
        item = EvaluationItem.from_dict(p["item"])
        output = SystemOutput.from_dict(p["output"])
        practice.append(
            PracticeItem(item=item, output=output, gold=gold_judgement(p["gold"], item.item_id, output.system_id))
        )
    return tuple(practice)


def build_campaign(
    campaign_id: str = "camp1",
    assessors: tuple[str, ...] = ("a1", "a2"),
    shuffle_seed: int = 7,
    plain_threshold: float = 8.0,
) -> Campaign:
    return Campaign(
        campaign_id=campaign_id,
        items=tuple(ingest_corpus(corpus_text())),
        outputs=tuple(parse_system_outputs(outputs_text())),
        practice_items=build_practice_items(),
        assessors=assessors,
        shuffle_seed=shuffle_seed,
        plain_threshold=plain_threshold,
    )


def judgement_for(
    item: EvaluationItem,
    system_id: str,
    assessor_id: str,
    general: float = 7.0,
    specs: dict | None = None,
    submitted_at: str = FIXED_TS,
) -> SegmentJudgement:
    """A complete judgement of the item; spans default to ref_mwe at weight 1.

    ``specs`` overrides per span id, e.g. {"m1": dict(category="non_mwe",
    assessor_score=6, weight=0.4, captured_rendering="...")}.
    """
    specs = specs or {}
    mwes = []
    for span in item.mwe_spans:
        spec = dict(specs.get(span.span_id, {}))
        spec.setdefault("category", MweCategory.REF_MWE)
        spec.setdefault("weight", 1.0)
        mwes.append(
            make_mwe_judgement(
                span.span_id,
                spec["category"],
                weight=spec["weight"],
                aspects=spec.get("aspects", ()),
                assessor_score=spec.get("assessor_score"),
                captured_rendering=spec.get("captured_rendering"),
            )
        )
    return SegmentJudgement(
        item_id=item.item_id,
        system_id=system_id,
        assessor_id=assessor_id,
        general=general,
        mwe_judgements=tuple(mwes),
        submitted_at=submitted_at,
    )


_CATEGORIES = list(MweCategory)
_ASPECTS = list(Aspect)


def random_mwe_judgement(rng, span_id: str) -> MweJudgement:
    category = _CATEGORIES[int(rng.integers(len(_CATEGORIES)))]
    aspects = [a for a in _ASPECTS if rng.random() < 0.4]
    weight = float(rng.uniform(0.0, 1.0))
    kwargs = {}
    if category is MweCategory.NON_MWE:
        kwargs["assessor_score"] = float(rng.uniform(0.0, 10.0))
        if rng.random() < 0.5:
            kwargs["captured_rendering"] = f"wording-{int(rng.integers(1000))}"
    elif category is MweCategory.ALT_MWE:
        kwargs["captured_rendering"] = f"alt-{int(rng.integers(1000))}"
    return make_mwe_judgement(span_id, category, weight=weight, aspects=aspects, **kwargs)


def random_segment_judgement(rng, n_mwes: int | None = None) -> SegmentJudgement:
    if n_mwes is None:
        n_mwes = int(rng.integers(0, 4))
    return SegmentJudgement(
        item_id=f"item{int(rng.integers(100))}",
        system_id=f"sys{int(rng.integers(10))}",
        assessor_id=f"a{int(rng.integers(10))}",
        general=float(rng.uniform(0.0, 10.0)),
        mwe_judgements=tuple(random_mwe_judgement(rng, f"m{k}") for k in range(n_mwes)),
        submitted_at=FIXED_TS,
    )


def drive_session(store, campaign: Campaign, assessor_id: str, n_assessments=None, judge=None):
    """Consent, intro, 3 practice, then up to ``n_assessments`` submissions.

    ``judge(item, system_id, assessor_id)`` builds each assessment judgement;
    by default every span is ref_mwe at weight 1 with general 7.
    """
    from hilmeme.session import Event, EventKind, Phase

    judge = judge or judgement_for
    token, session = store.start_session(campaign.campaign_id, assessor_id)
    seq = 0
    session, _, seq = store.submit_event(token, seq, Event(EventKind.ACCEPT_CONSENT))
    session, _, seq = store.submit_event(token, seq, Event(EventKind.FINISH_INTRODUCTION))
    for k in range(3):
        practice = campaign.practice_items[k]
        judgement = judgement_for(practice.item, practice.output.system_id, assessor_id)
        session, feedback, seq = store.submit_event(token, seq, Event(EventKind.SUBMIT_PRACTICE, judgement))
        assert feedback is not None
    done = 0
    while session.state.phase is Phase.ASSESSMENT:
        if n_assessments is not None and done >= n_assessments:
            break
        unit = session.queue[session.state.next_index]
        judgement = judge(campaign.item(unit.item_id), unit.system_id, assessor_id)
        session, _, seq = store.submit_event(token, seq, Event(EventKind.SUBMIT_ASSESSMENT, judgement))
        done += 1
    return token, session, seq


@pytest.fixture
def campaign() -> Campaign:
    return build_campaign()


@pytest.fixture
def items(campaign):
    return campaign.items


@pytest.fixture
def practice_items(campaign):
    return campaign.practice_items
