"""Mechanical practices audit: seven yes/no probes per service, each
one an experiment against the live testbed rather than a hand-filled
table. The probes only use what a client or an on-path observer could
use: public endpoints, static assets, a tap, and the injected clock.
"""

from __future__ import annotations

from dataclasses import dataclass

from .benchmark import LICENSE_PATH
from .clients import ProtocolFailure
from .ripper import tap_rip
from .testbed import ANONYMOUS, DEFAULT_PRINCIPAL, FREE_TIER, Testbed
from .transport import copy_request, read_tap
from .webassets import MINIFIED_BANNER

PRACTICE_FIELDS = (
    "mandatory_user_identification",
    "streamed_content_encryption",
    "hardcoded_keys",
    "drm_scheme",
    "cookie_auth_timeout",
    "premium_access_restrictions",
    "obfuscation_minification",
)

# the five services the comparison table covers, plus the legacy flow,
# which is auditable but was already retired when the table was drawn
AUDIT_SERVICES = ("spotify-benchmark", "wynk-v2", "jiosaavn", "gaana", "hungama")
EXTENDED_AUDIT_SERVICES = AUDIT_SERVICES + ("wynk-v1",)

REPLAY_HORIZON = 7200  # seconds the replay probe jumps forward

_ALIASES = {"benchmark": "spotify-benchmark"}

# how to spot the exchange that acquired stream authorization, per service
_AUTH_EXCHANGE = {
    "wynk-v1": lambda req: req.path.startswith("/streaming/v4/cscgw/"),
    "wynk-v2": lambda req: req.path == "/song/v4/stream",
    "jiosaavn": lambda req: req.path == "/api.php",
    "gaana": lambda req: req.path.endswith("/master.m3u8"),
    "hungama": lambda req: req.path.startswith("/mdnurl/"),
    "spotify-benchmark": lambda req: req.path.startswith("/resolve/"),
}


@dataclass(frozen=True)
class PracticesScorecard:
    mandatory_user_identification: bool
    streamed_content_encryption: bool
    hardcoded_keys: bool
    drm_scheme: bool
    cookie_auth_timeout: bool
    premium_access_restrictions: bool
    obfuscation_minification: bool

    def as_dict(self) -> dict[str, bool]:
        return {name: getattr(self, name) for name in PRACTICE_FIELDS}


def canonical_audit_name(service: str) -> str:
    name = _ALIASES.get(service, service)
    if name not in EXTENDED_AUDIT_SERVICES:
        raise ValueError(f"unknown auditable service {service!r}")
    return name


def _rip_name(audit_name: str) -> str:
    return "benchmark" if audit_name == "spotify-benchmark" else audit_name


def _attempt(tb: Testbed, audit_name: str, track: str, principal: str) -> bool:
    """True when the client walks away with media bytes."""
    try:
        tb.run_client(_rip_name(audit_name), track, principal=principal)
    except ProtocolFailure:
        return False
    return True


def _replay_rejected(tb: Testbed, audit_name: str, records) -> bool:
    """Replay the captured authorization exchange after a clock jump.
    A service only scores here when the verbatim replay stops working."""
    matcher = _AUTH_EXCHANGE[audit_name]
    target = None
    for rec in records:
        if matcher(rec.request):
            target = rec
    if target is None:
        return False
    t0 = tb.env.clock.now()
    tb.env.clock.advance(REPLAY_HORIZON)
    try:
        resp = tb.net.dispatch(
            target.request.headers["host"], copy_request(target.request)
        )
    finally:
        tb.env.clock.set_to(t0)
    return resp.status != 200


def audit(tb: Testbed, service: str) -> PracticesScorecard:
    name = canonical_audit_name(service)
    open_tracks = tb.open_tracks()
    premium_tracks = tb.premium_tracks()
    if not open_tracks or not premium_tracks:
        raise ValueError("audit needs at least one open and one premium track")
    track, premium = open_tracks[0], premium_tracks[0]

    mandatory_id = not _attempt(tb, name, track, ANONYMOUS)

    tap = tb.net.attach_tap()
    try:
        try:
            tb.run_client(_rip_name(name), track, principal=DEFAULT_PRINCIPAL)
        except ProtocolFailure:
            pass  # audit whatever did cross the wire
    finally:
        tb.net.detach_tap(tap)
    records = read_tap(tap)

    rip = tap_rip(records, tb.catalog, name, track)
    encrypted = not rip.matched_catalog
    drm = any(rec.request.path == LICENSE_PATH for rec in records)
    replay_dies = _replay_rejected(tb, name, records)

    bodies = [
        tb.net.get(url).body.decode("utf-8", errors="replace")
        for url in tb.static_asset_urls(_rip_name(name))
    ]
    hardcoded = any(secret in body for body in bodies for secret in tb.secret_material())
    obfuscated = any(MINIFIED_BANNER in body for body in bodies)

    premium_gated = not _attempt(tb, name, premium, FREE_TIER)

    return PracticesScorecard(
        mandatory_user_identification=mandatory_id,
        streamed_content_encryption=encrypted,
        hardcoded_keys=hardcoded,
        drm_scheme=drm,
        cookie_auth_timeout=replay_dies,
        premium_access_restrictions=premium_gated,
        obfuscation_minification=obfuscated,
    )


def audit_all(
    tb: Testbed, services=AUDIT_SERVICES
) -> dict[str, PracticesScorecard]:
    return {name: audit(tb, name) for name in services}
