"""Signed URL grants and the media CDN they guard.

A grant is the CloudFront trio of query parameters: a base64 policy
naming a resource prefix and an expiry epoch, an HMAC-SHA1 signature
over the policy bytes, and a key-pair id. The CDN recomputes the
signature over the *decoded* policy, so no amount of base64 massaging
gets around it, and the path prefix binds a grant to one asset.
"""

from __future__ import annotations

import hmac as _hmac
import json
from dataclasses import dataclass

from .crypto_kit import DecodeError, b64, b64_decode, hmac_sha1
from .hls import (
    IndexManifest,
    MasterManifest,
    MediaAsset,
    render_index,
    render_master,
    segment,
)
from .transport import Clock, HttpRequest, HttpResponse, error_response

POLICY_PARAM = "Policy"
SIGNATURE_PARAM = "Signature"
KEY_PAIR_PARAM = "Key-Pair-Id"

# "never expires" for services whose grants carry no practical timeout
FAR_FUTURE = 4102444800  # 2100-01-01T00:00:00Z


@dataclass(frozen=True)
class SignedGrant:
    policy: str
    signature: str
    key_pair_id: str

    def as_query(self) -> dict[str, str]:
        return {
            POLICY_PARAM: self.policy,
            SIGNATURE_PARAM: self.signature,
            KEY_PAIR_PARAM: self.key_pair_id,
        }

    @classmethod
    def from_query(cls, query: dict[str, str]):
        try:
            return cls(
                policy=query[POLICY_PARAM],
                signature=query[SIGNATURE_PARAM],
                key_pair_id=query[KEY_PAIR_PARAM],
            )
        except KeyError:
            return None


def issue_grant(
    secret: bytes, key_pair_id: str, resource_prefix: str, expires_at: int
) -> SignedGrant:
    policy_doc = json.dumps(
        {"expires": int(expires_at), "resource": resource_prefix},
        separators=(",", ":"),
        sort_keys=True,
    ).encode("ascii")
    return SignedGrant(
        policy=b64(policy_doc),
        signature=b64(hmac_sha1(secret, policy_doc)),
        key_pair_id=key_pair_id,
    )


def verify_grant(
    secret: bytes,
    key_pair_id: str,
    grant: SignedGrant | None,
    resource_path: str,
    now: int,
) -> bool:
    if grant is None or grant.key_pair_id != key_pair_id:
        return False
    try:
        policy_doc = b64_decode(grant.policy)
        given_sig = b64_decode(grant.signature)
    except DecodeError:
        return False
    if not _hmac.compare_digest(given_sig, hmac_sha1(secret, policy_doc)):
        return False
    try:
        policy = json.loads(policy_doc)
        resource = policy["resource"]
        expires = int(policy["expires"])
    except (ValueError, KeyError, TypeError):
        return False
    if now >= expires:
        return False
    return isinstance(resource, str) and resource_path.startswith(resource)


class CdnNode:
    """One media host: pre-rendered HLS trees and whole-file variants,
    every path gated by a grant for that path."""

    def __init__(
        self,
        host: str,
        secret: bytes,
        key_pair_id: str,
        clock: Clock,
        chunk_bytes: int = 32768,
    ):
        self.host = host
        self._secret = secret
        self._key_pair_id = key_pair_id
        self._clock = clock
        self._chunk_bytes = chunk_bytes
        self._content: dict[str, tuple[bytes, str]] = {}  # path -> (body, ctype)
        self._hls_keys: set[str] = set()
        self._file_keys: dict[str, list[int]] = {}

    def url(self, path: str) -> str:
        return f"https://{self.host}{path}"

    # ---- tree construction ------------------------------------------------

    def add_hls_asset(self, key: str, asset: MediaAsset, bitrates=None) -> None:
        rates = sorted(bitrates or asset.variants, reverse=True)
        master_entries = []
        for rate in rates:
            base = f"/hls/{key}/{rate}/"
            chunks, index = segment(
                asset.variant(rate),
                self._chunk_bytes,
                bitrate=rate,
                uri_prefix=self.url(base),
            )
            for i, chunk in enumerate(chunks):
                self._put(f"{base}seg_{i:05d}.ts", chunk, "video/mp2t")
            self._put(
                f"{base}index.m3u8",
                render_index(index).encode("utf-8"),
                "application/vnd.apple.mpegurl",
            )
            # single-variant master, for services that hand out one URI
            # per quality instead of a combined ladder
            solo = MasterManifest(
                entries=[(rate * 1000, self.url(f"{base}index.m3u8"))]
            )
            self._put(
                f"{base}master.m3u8",
                render_master(solo).encode("utf-8"),
                "application/vnd.apple.mpegurl",
            )
            master_entries.append((rate * 1000, self.url(f"{base}index.m3u8")))
        master = MasterManifest(entries=master_entries)
        self._put(
            f"/hls/{key}/master.m3u8",
            render_master(master).encode("utf-8"),
            "application/vnd.apple.mpegurl",
        )
        self._hls_keys.add(key)

    def add_file_asset(self, key: str, asset: MediaAsset, bitrates=None) -> None:
        rates = sorted(bitrates or asset.variants, reverse=True)
        for rate in rates:
            self._put(f"/file/{key}/{rate}.aud", asset.variant(rate), "audio/aud")
        self._file_keys[key] = rates

    def _put(self, path: str, body: bytes, ctype: str) -> None:
        self._content[path] = (body, ctype)

    # ---- grant issuance (service side) -------------------------------------

    def hls_grant(self, key: str, expires_at: int) -> SignedGrant:
        return issue_grant(
            self._secret, self._key_pair_id, f"/hls/{key}/", expires_at
        )

    def file_grant(self, key: str, rate: int, expires_at: int) -> SignedGrant:
        return issue_grant(
            self._secret, self._key_pair_id, f"/file/{key}/{rate}.aud", expires_at
        )

    def master_url(self, key: str) -> str:
        return self.url(f"/hls/{key}/master.m3u8")

    def variant_master_url(self, key: str, rate: int) -> str:
        return self.url(f"/hls/{key}/{rate}/master.m3u8")

    def file_url(self, key: str, rate: int) -> str:
        return self.url(f"/file/{key}/{rate}.aud")

    # ---- serving ------------------------------------------------------------

    def handler(self, request: HttpRequest) -> HttpResponse:
        if request.method != "GET":
            return error_response(400, "GET only")
        entry = self._content.get(request.path)
        if entry is None:
            return error_response(404, "no such object")
        grant = SignedGrant.from_query(request.query)
        if not verify_grant(
            self._secret, self._key_pair_id, grant, request.path, self._clock.now()
        ):
            return error_response(403, "grant rejected")
        body, ctype = entry
        return HttpResponse(status=200, headers={"content-type": ctype}, body=body)
