"""Command-line entry points.

Every subcommand wraps one library operation.  Success prints a result to
stdout and exits 0; failures print one machine-readable json object to stderr
and exit 1.  The data directory comes from --data-dir or HILMEME_DATA_DIR.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analytics
from .corpus import ingest_corpus, parse_system_outputs, serialize_corpus
from .schema import SCHEMA_VERSION
from .store import CampaignStore

DATA_DIR_ENV = "HILMEME_DATA_DIR"
DEFAULT_DATA_DIR = "hilmeme-data"


def _data_dir(args: argparse.Namespace) -> Path:
    return Path(args.data_dir or os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR)


def _emit(payload) -> None:
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True))


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ingest(args: argparse.Namespace) -> int:
    items = ingest_corpus(Path(args.corpus).read_text(encoding="utf-8"), args.format)
    if args.out:
        Path(args.out).write_text(serialize_corpus(items), encoding="utf-8")
    _emit(
        {
            "items": len(items),
            "mwe_spans": sum(len(i.mwe_spans) for i in items),
            "out": args.out,
        }
    )
    return 0


def cmd_create_campaign(args: argparse.Namespace) -> int:
    from .service import CreateCampaignBody, PracticePayload, build_campaign

    practice_raw = json.loads(Path(args.practice).read_text(encoding="utf-8"))
    body = CreateCampaignBody(
        campaign_id=args.campaign_id,
        corpus_jsonl=Path(args.corpus).read_text(encoding="utf-8"),
        corpus_format=args.format,
        outputs_jsonl=Path(args.outputs).read_text(encoding="utf-8") if args.outputs else "",
        practice=[PracticePayload(**p) for p in practice_raw],
        assessors=[a for a in args.assessors.split(",") if a],
        shuffle_seed=args.seed,
        plain_threshold=args.plain_threshold,
        client_token=args.client_token,
    )
    campaign = build_campaign(body)
    store = CampaignStore(_data_dir(args))
    campaign_id = store.create_campaign(campaign, client_token=args.client_token)
    plan = store.get_campaign(campaign_id).work_plan
    _emit(
        {
            "campaign_id": campaign_id,
            "units": len(plan.units),
            "coverage_gaps": len(plan.missing),
        }
    )
    return 0


def cmd_add_system(args: argparse.Namespace) -> int:
    outputs = parse_system_outputs(Path(args.outputs).read_text(encoding="utf-8"))
    store = CampaignStore(_data_dir(args))
    campaign = store.add_outputs(args.campaign, outputs)
    _emit({"campaign_id": campaign.campaign_id, "units": len(campaign.work_units())})
    return 0


def cmd_add_metric_scores(args: argparse.Namespace) -> int:
    store = CampaignStore(_data_dir(args))
    count = store.add_metric_scores(args.campaign, args.name, Path(args.scores).read_text(encoding="utf-8"))
    _emit({"campaign_id": args.campaign, "metric": args.name, "records": count})
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    store = CampaignStore(_data_dir(args))
    campaign = store.get_campaign(args.campaign)
    judgements = store.judgements(args.campaign)
    reports = analytics.all_system_reports(judgements)
    if args.format == "csv":
        _write_out(analytics.report_to_csv(reports), args.out)
        return 0
    tally = analytics.overall_tally(judgements)
    try:
        agreement = analytics.agreement(judgements)
    except analytics.AnalyticsError:
        agreement = None
    _write_out(analytics.report_to_json(campaign.campaign_id, reports, tally, agreement), args.out)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    store = CampaignStore(_data_dir(args))
    judgements = store.judgements(args.campaign)
    if args.level == analytics.SYSTEM_LEVEL:
        human = analytics.per_system_scores(judgements)
    else:
        human = analytics.per_segment_scores(judgements)
    metric = analytics.load_metric_scores(store.read_metric_scores(args.campaign, args.metric), args.level)
    result = analytics.metric_correlation(human, metric, level=args.level, method=args.method)
    _emit({"schema_version": SCHEMA_VERSION, **result.to_dict()})
    return 0


def cmd_export_termbank(args: argparse.Namespace) -> int:
    store = CampaignStore(_data_dir(args))
    campaign = store.get_campaign(args.campaign)
    entries = analytics.extract_term_bank(
        store.judgements(args.campaign), campaign.items, campaign.plain_threshold
    )
    if args.format == "tsv":
        _write_out(analytics.termbank_to_tsv(entries), args.out)
    else:
        _write_out(analytics.termbank_to_json(entries), args.out)
    return 0


def cmd_export_judgements(args: argparse.Namespace) -> int:
    store = CampaignStore(_data_dir(args))
    _write_out(store.export_judgements(args.campaign), args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(CampaignStore(_data_dir(args)))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hilmeme", description=__doc__)
    parser.add_argument(
        "--data-dir",
        default=None,
        help=f"campaign storage directory (default: ${DATA_DIR_ENV} or ./{DEFAULT_DATA_DIR})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus file, optionally writing canonical json-lines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("create-campaign", help="create a campaign from corpus/outputs/practice files")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
    p.add_argument("--outputs", help="system outputs json-lines file")
    p.add_argument("--practice", required=True, help="json file: list of {item, output, gold}")
    p.add_argument("--assessors", required=True, help="comma-separated assessor ids")
    p.add_argument("--campaign-id")
    p.add_argument("--seed", type=int, default=0, help="work-queue shuffle seed")
    p.add_argument("--plain-threshold", type=float, default=8.0)
    p.add_argument("--client-token")
    p.set_defaults(func=cmd_create_campaign)

    p = sub.add_parser("add-system", help="bind more system outputs to a campaign")
    p.add_argument("--campaign", required=True)
    p.add_argument("--outputs", required=True)
    p.set_defaults(func=cmd_add_system)

    p = sub.add_parser("add-metric-scores", help="store automatic-metric scores for correlation")
    p.add_argument("--campaign", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--scores", required=True, help="json-lines {system_id, item_id?, score}")
    p.set_defaults(func=cmd_add_metric_scores)

    p = sub.add_parser("report", help="per-system report with tallies and agreement")
    p.add_argument("--campaign", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("correlate", help="correlate human scores with a stored metric")
    p.add_argument("--campaign", required=True)
    p.add_argument("--metric", required=True, help="metric name passed to add-metric-scores")
    p.add_argument("--level", choices=[analytics.SYSTEM_LEVEL, analytics.SEGMENT_LEVEL], required=True)
    p.add_argument("--method", choices=["pearson", "spearman", "kendall"], required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("export-termbank", help="export the bilingual MWE term bank")
    p.add_argument("--campaign", required=True)
    p.add_argument("--format", choices=["tsv", "json"], default="tsv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_termbank)

    p = sub.add_parser("export-judgements", help="export the judgement log as json-lines")
    p.add_argument("--campaign", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_judgements)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point for the CLI
        print(
            json.dumps({"error": str(exc), "kind": type(exc).__name__}, ensure_ascii=False),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
