"""Post-TLS stream ripping: reconstruct audio from a passive tap.

The ripper never talks to anything. It reads tap records, reassembles
whatever HLS trees or whole files crossed the wire, and checks the
result against the catalog. A service defeats it exactly when nothing
in the transcript decodes to catalog plaintext.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .catalog import ServiceCatalog
from .hls import AUDIO_MAGIC, ManifestError, parse_index
from .transport import TapRecord


@dataclass
class RipResult:
    service: str
    track: str
    succeeded: bool
    matched_catalog: bool
    recovered: bytes = b""
    evidence: list[int] = field(default_factory=list)  # tap seqs used


def _decode_text(body: bytes) -> str | None:
    try:
        return body.decode("utf-8")
    except UnicodeDecodeError:
        return None


def _index_candidates(records):
    """Assemble every index playlist in the transcript whose chunks all
    crossed the wire too."""
    last_by_path = {}
    for rec in records:
        if rec.response.status == 200:
            last_by_path[rec.request.path] = rec
    out = []
    for rec in records:
        if rec.response.status != 200:
            continue
        text = _decode_text(rec.response.body)
        if text is None or not text.startswith("#EXTM3U"):
            continue
        try:
            index = parse_index(text)
        except ManifestError:
            continue
        if not index.segments:
            continue
        chunks, seqs, complete = [], [rec.seq], True
        for uri, _seconds in index.segments:
            hit = last_by_path.get(urlsplit(uri).path)
            if hit is None:
                complete = False
                break
            chunks.append(hit.response.body)
            seqs.append(hit.seq)
        if complete:
            out.append((b"".join(chunks), sorted(set(seqs))))
    return out


def _body_candidates(records):
    hits = [
        rec
        for rec in records
        if rec.response.status == 200 and rec.response.body.startswith(AUDIO_MAGIC)
    ]
    hits.sort(key=lambda rec: (-len(rec.response.body), rec.seq))
    return [(rec.response.body, [rec.seq]) for rec in hits]


def tap_rip(
    records: list[TapRecord],
    catalog: ServiceCatalog,
    service: str,
    track: str,
) -> RipResult:
    asset = catalog.assets.get(track)
    variants = set(asset.variants.values()) if asset else set()
    candidates = _index_candidates(records) + _body_candidates(records)
    for blob, seqs in candidates:
        if blob in variants:
            return RipResult(
                service=service,
                track=track,
                succeeded=True,
                matched_catalog=True,
                recovered=blob,
                evidence=seqs,
            )
    if candidates:
        blob, seqs = candidates[0]
        return RipResult(
            service=service,
            track=track,
            succeeded=True,
            matched_catalog=False,
            recovered=blob,
            evidence=seqs,
        )
    return RipResult(
        service=service, track=track, succeeded=False, matched_catalog=False
    )
