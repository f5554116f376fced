"""MWE-annotated evaluation corpus: ingestion, validation, work-unit binding.

Corpus files are json-lines, one object per line:

    {"item_id": "...", "source": "...", "reference": "...",
     "tokens": ["..."],                      # optional; default whitespace split
     "mwes": [{"id": "...", "start": 2, "end": 4,
               "surface": "...", "refs": ["..."]}],
     "domain": "..."}                        # optional

``start``/``end`` are 0-based token offsets, end-exclusive.  Explicit token
arrays exist for languages without whitespace segmentation.  The TSV
alternative has four tab-separated columns: item_id, source, reference, and
the mwes array embedded as JSON (no header row; cell text may not contain
tabs).  System outputs are json-lines: {"system_id", "item_id", "hypothesis"}.

Ingestion rejects invalid records outright (with the line number); the
finer-grained ``validate_item`` reports every violation of one item as data,
which the ingest path reuses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

JSONL = "jsonl"
TSV = "tsv"
_FORMATS = {JSONL: JSONL, "json-lines": JSONL, TSV: TSV}


class CorpusError(ValueError):
    """A corpus or system-output stream could not be ingested."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class MweSpan:
    """A highlighted source-side MWE with its acceptable reference renderings."""

    span_id: str
    token_start: int
    token_end: int
    surface: str
    reference_renderings: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "reference_renderings", tuple(self.reference_renderings))

    def to_dict(self) -> dict:
        return {
            "id": self.span_id,
            "start": self.token_start,
            "end": self.token_end,
            "surface": self.surface,
            "refs": list(self.reference_renderings),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MweSpan":
        return cls(
            span_id=str(d["id"]),
            token_start=int(d["start"]),
            token_end=int(d["end"]),
            surface=d["surface"],
            reference_renderings=tuple(d.get("refs", ())),
        )


@dataclass(frozen=True)
class EvaluationItem:
    """A source segment, its reference translation, and annotated MWE spans."""

    item_id: str
    source_text: str
    source_tokens: tuple[str, ...]
    reference_text: str
    mwe_spans: tuple[MweSpan, ...] = ()
    domain_tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "source_tokens", tuple(self.source_tokens))
        object.__setattr__(self, "mwe_spans", tuple(self.mwe_spans))

    def span_ids(self) -> set[str]:
        return {s.span_id for s in self.mwe_spans}

    def span(self, span_id: str) -> MweSpan:
        for s in self.mwe_spans:
            if s.span_id == span_id:
                return s
        raise KeyError(span_id)

    def to_dict(self) -> dict:
        out = {
            "item_id": self.item_id,
            "source": self.source_text,
            "reference": self.reference_text,
            "tokens": list(self.source_tokens),
            "mwes": [s.to_dict() for s in self.mwe_spans],
        }
        if self.domain_tag is not None:
            out["domain"] = self.domain_tag
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvaluationItem":
        source = d["source"]
        tokens = tuple(d["tokens"]) if "tokens" in d and d["tokens"] is not None else tuple(source.split())
        spans = []
        for raw in d.get("mwes", ()) or ():
            raw = dict(raw)
            if "surface" not in raw:
                raw["surface"] = " ".join(tokens[int(raw["start"]):int(raw["end"])])
            spans.append(MweSpan.from_dict(raw))
        return cls(
            item_id=str(d["item_id"]),
            source_text=source,
            source_tokens=tokens,
            reference_text=d["reference"],
            mwe_spans=tuple(spans),
            domain_tag=d.get("domain"),
        )


@dataclass(frozen=True)
class SystemOutput:
    """One MT system's candidate translation of one item."""

    system_id: str
    item_id: str
    hypothesis_text: str

    def to_dict(self) -> dict:
        return {"system_id": self.system_id, "item_id": self.item_id, "hypothesis": self.hypothesis_text}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SystemOutput":
        return cls(system_id=str(d["system_id"]), item_id=str(d["item_id"]), hypothesis_text=d["hypothesis"])


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by ``validate_item``."""

    code: str
    message: str
    span_ids: tuple[str, ...] = ()


def _squash_ws(text: str) -> str:
    return "".join(text.split())


def validate_item(item: EvaluationItem) -> list[Violation]:
    """Report every invariant violation of the item; empty list = valid."""
    violations: list[Violation] = []
    n = len(item.source_tokens)
    seen_ids: set[str] = set()
    bounded: list[MweSpan] = []

    for span in item.mwe_spans:
        if span.span_id in seen_ids:
            violations.append(
                Violation("duplicate-span-id", f"span id {span.span_id!r} used twice", (span.span_id,))
            )
        seen_ids.add(span.span_id)

        if span.token_start >= span.token_end:
            violations.append(
                Violation(
                    "empty-span",
                    f"span {span.span_id!r} is empty ({span.token_start}, {span.token_end})",
                    (span.span_id,),
                )
            )
            continue
        if span.token_start < 0 or span.token_end > n:
            violations.append(
                Violation(
                    "span-out-of-bounds",
                    f"span {span.span_id!r} ({span.token_start}, {span.token_end}) "
                    f"exceeds the {n}-token source",
                    (span.span_id,),
                )
            )
            continue
        bounded.append(span)

        if not span.reference_renderings:
            violations.append(
                Violation(
                    "no-reference-renderings",
                    f"span {span.span_id!r} has no reference renderings",
                    (span.span_id,),
                )
            )
        elif any(not r.strip() for r in span.reference_renderings):
            violations.append(
                Violation("blank-rendering", f"span {span.span_id!r} has a blank rendering", (span.span_id,))
            )

        covered = _squash_ws("".join(item.source_tokens[span.token_start:span.token_end]))
        if _squash_ws(span.surface) != covered:
            violations.append(
                Violation(
                    "surface-mismatch",
                    f"span {span.span_id!r} surface {span.surface!r} does not match "
                    f"tokens [{span.token_start}, {span.token_end})",
                    (span.span_id,),
                )
            )

    bounded.sort(key=lambda s: s.token_start)
    for left, right in zip(bounded, bounded[1:]):
        if right.token_start < left.token_end:
            violations.append(
                Violation(
                    "overlapping-spans",
                    f"spans {left.span_id!r} and {right.span_id!r} overlap",
                    (left.span_id, right.span_id),
                )
            )
    return violations


def _iter_lines(stream: str | Iterable[str]) -> Iterable[tuple[int, str]]:
    lines = stream.splitlines() if isinstance(stream, str) else stream
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if line.strip():
            yield lineno, line


def _parse_tsv_record(line: str, lineno: int) -> dict:
    parts = line.split("\t")
    if len(parts) != 4:
        raise CorpusError(f"expected 4 tab-separated columns, found {len(parts)}", lineno)
    item_id, source, reference, mwes_json = parts
    try:
        mwes = json.loads(mwes_json) if mwes_json.strip() else []
    except json.JSONDecodeError as exc:
        raise CorpusError(f"embedded mwes column is not valid JSON: {exc}", lineno) from None
    return {"item_id": item_id, "source": source, "reference": reference, "mwes": mwes}


def ingest_corpus(stream: str | Iterable[str], fmt: str = JSONL) -> list[EvaluationItem]:
    """Parse and validate a corpus stream, in file order.

    Raises CorpusError (with the offending line number) on malformed records,
    duplicate item ids, or any item-invariant violation.
    """
    try:
        fmt = _FORMATS[fmt]
    except KeyError:
        raise CorpusError(f"unknown corpus format {fmt!r} (expected jsonl or tsv)") from None

    items: list[EvaluationItem] = []
    seen: set[str] = set()
    for lineno, line in _iter_lines(stream):
        if fmt == JSONL:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON: {exc}", lineno) from None
            if not isinstance(record, dict):
                raise CorpusError("record must be a JSON object", lineno)
        else:
            record = _parse_tsv_record(line, lineno)

        try:
            item = EvaluationItem.from_dict(record)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"malformed record: {exc!r}", lineno) from None

        if item.item_id in seen:
            raise CorpusError(f"duplicate item_id {item.item_id!r}", lineno)
        seen.add(item.item_id)

        violations = validate_item(item)
        if violations:
            detail = "; ".join(v.message for v in violations)
            raise CorpusError(f"invalid item {item.item_id!r}: {detail}", lineno)
        items.append(item)
    return items


def serialize_corpus(items: Iterable[EvaluationItem]) -> str:
    """Render items as json-lines; ``ingest_corpus`` inverts this exactly."""
    return "".join(json.dumps(item.to_dict(), ensure_ascii=False) + "\n" for item in items)


def parse_system_outputs(stream: str | Iterable[str]) -> list[SystemOutput]:
    """Parse json-lines system outputs; duplicate (system, item) pairs are rejected."""
    outputs: list[SystemOutput] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in _iter_lines(stream):
        try:
            record = json.loads(line)
            output = SystemOutput.from_dict(record)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"malformed system output: {exc!r}", lineno) from None
        key = (output.system_id, output.item_id)
        if key in seen:
            raise CorpusError(f"duplicate output for system {key[0]!r}, item {key[1]!r}", lineno)
        seen.add(key)
        outputs.append(output)
    return outputs


def serialize_system_outputs(outputs: Iterable[SystemOutput]) -> str:
    return "".join(json.dumps(o.to_dict(), ensure_ascii=False) + "\n" for o in outputs)


@dataclass(frozen=True)
class WorkUnit:
    """One (item, system output) pair awaiting judgement."""

    item_id: str
    system_id: str

    def to_dict(self) -> dict:
        return {"item_id": self.item_id, "system_id": self.system_id}


@dataclass(frozen=True)
class WorkPlan:
    """The assessment queue plus any systems-x-items coverage gaps."""

    units: tuple[WorkUnit, ...]
    missing: tuple[WorkUnit, ...]


def bind_outputs(items: Iterable[EvaluationItem], outputs: Iterable[SystemOutput]) -> WorkPlan:
    """Bind outputs to items and lay out the systems-x-items work queue.

    Units come out item-major in file order.  Pairs of the cross product with
    no output are returned as ``missing`` rather than failing the bind.
    """
    items = list(items)
    outputs = list(outputs)
    known = {item.item_id for item in items}

    by_pair: dict[tuple[str, str], SystemOutput] = {}
    system_order: list[str] = []
    for output in outputs:
        if output.item_id not in known:
            raise CorpusError(
                f"output from system {output.system_id!r} references unknown item {output.item_id!r}"
            )
        key = (output.system_id, output.item_id)
        if key in by_pair:
            raise CorpusError(f"duplicate output for system {key[0]!r}, item {key[1]!r}")
        by_pair[key] = output
        if output.system_id not in system_order:
            system_order.append(output.system_id)

    units: list[WorkUnit] = []
    missing: list[WorkUnit] = []
    for item in items:
        for system_id in system_order:
            unit = WorkUnit(item_id=item.item_id, system_id=system_id)
            if (system_id, item.item_id) in by_pair:
                units.append(unit)
            else:
                missing.append(unit)
    return WorkPlan(units=tuple(units), missing=tuple(missing))
