"""Report emission: JSON, CSV (with runtime column), and a markdown summary."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .records import VerificationRecord, record_from_json, record_to_json, sort_records

CSV_COLUMNS = ("suite", "anchor", "lhs", "rhs", "ratio", "claimed", "pass", "seed", "ms")


def emit_json(records: list[VerificationRecord]) -> str:
    docs = [record_to_json(r) for r in sort_records(records)]
    return json.dumps(docs, indent=1)


def parse_json(text: str) -> list[VerificationRecord]:
    return [record_from_json(doc) for doc in json.loads(text)]


def emit_csv(records: list[VerificationRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sort_records(records):
        writer.writerow(
            [
                r.suite,
                r.anchor,
                repr(r.lhs),
                repr(r.rhs),
                repr(r.ratio),
                "" if r.claimed is None else repr(r.claimed),
                str(r.passed).lower(),
                r.seed,
                repr(r.ms),
            ]
        )
    return buf.getvalue()


def emit_markdown(records: list[VerificationRecord]) -> str:
    """Summary grouped by anchor: record count, max ratio, pass tally."""
    groups: dict[str, list[VerificationRecord]] = {}
    for r in sort_records(records):
        groups.setdefault(r.anchor, []).append(r)
    lines = ["# Verification summary", "", "| anchor | records | max ratio | claimed | pass |", "|---|---|---|---|---|"]
    for anchor in sorted(groups):
        rs = groups[anchor]
        max_ratio = max(r.ratio for r in rs)
        claims = sorted({r.claimed for r in rs if r.claimed is not None})
        claimed = ", ".join(f"{c:g}" for c in claims) if claims else "-"
        ok = sum(r.passed for r in rs)
        lines.append(f"| {anchor} | {len(rs)} | {max_ratio:.6g} | {claimed} | {ok}/{len(rs)} |")
    lines.append("")
    return "\n".join(lines)


def emit_report(records: list[VerificationRecord], fmt: str, path: str | Path | None = None) -> str:
    """Render the records in the requested format, optionally writing to a file."""
    if fmt == "json":
        text = emit_json(records)
    elif fmt == "csv":
        text = emit_csv(records)
    elif fmt in ("md", "markdown", "markdown-summary"):
        text = emit_markdown(records)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
