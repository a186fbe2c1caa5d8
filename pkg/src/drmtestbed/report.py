"""Render rip results and audit scorecards as text or JSON.

One renderer, two formats, no hidden state: the same RunReport always
produces the same bytes, so reports diff cleanly across runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .auditor import PRACTICE_FIELDS, PracticesScorecard
from .ripper import RipResult

FORMATS = ("text", "json")


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    rips: list[RipResult] = field(default_factory=list)
    audits: dict[str, PracticesScorecard] = field(default_factory=dict)


def _rip_entry(rip: RipResult) -> dict:
    return {
        "service": rip.service,
        "track": rip.track,
        "succeeded": rip.succeeded,
        "matched_catalog": rip.matched_catalog,
        "recovered_bytes": len(rip.recovered),
        "recovered_sha256": hashlib.sha256(rip.recovered).hexdigest()
        if rip.recovered
        else "",
        "evidence_seqs": list(rip.evidence),
    }


def _render_json(report: RunReport) -> str:
    doc = {
        "rips": [_rip_entry(r) for r in report.rips],
        "audits": [
            {"service": name, "practices": card.as_dict()}
            for name, card in report.audits.items()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _yes_no(value: bool) -> str:
    return "yes" if value else "no"


def _render_text(report: RunReport) -> str:
    lines = ["== stream rip results =="]
    if report.rips:
        rows = [("service", "track", "ripped", "matched", "bytes", "sha256")]
        for rip in report.rips:
            entry = _rip_entry(rip)
            rows.append(
                (
                    rip.service,
                    rip.track,
                    _yes_no(rip.succeeded),
                    _yes_no(rip.matched_catalog),
                    str(entry["recovered_bytes"]),
                    entry["recovered_sha256"][:12] or "-",
                )
            )
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        for row in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    else:
        lines.append("(no rips)")
    lines.append("")
    lines.append("== practices audit ==")
    if report.audits:
        names = list(report.audits)
        head = ["practice"] + names
        rows = [head]
        for practice in PRACTICE_FIELDS:
            rows.append(
                [practice]
                + [_yes_no(getattr(report.audits[n], practice)) for n in names]
            )
        widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
        for row in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    else:
        lines.append("(no audits)")
    return "\n".join(lines) + "\n"


def render_report(report: RunReport, fmt: str = "text") -> str:
    if fmt == "json":
        return _render_json(report)
    if fmt == "text":
        return _render_text(report)
    raise UsageError(f"unknown report format {fmt!r}, want one of {FORMATS}")
