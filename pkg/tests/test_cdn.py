"""Grant issuance/verification and the CDN node that enforces them."""

from __future__ import annotations

import json
import random

import pytest

from drmtestbed.cdn import (
    FAR_FUTURE,
    KEY_PAIR_PARAM,
    POLICY_PARAM,
    SIGNATURE_PARAM,
    CdnNode,
    SignedGrant,
    issue_grant,
    verify_grant,
)
from drmtestbed.crypto_kit import b64, b64_decode, hmac_sha1
from drmtestbed.hls import MediaAsset, parse_index, parse_master
from drmtestbed.transport import Clock, HttpRequest

SECRET = bytes.fromhex("4f1c6d2a90be77d31e55a8c04962ddc1b07f93e2")
KPID = "KTEST01"


def _grant(prefix="/hls/a/", expires=2000):
    return issue_grant(SECRET, KPID, prefix, expires)


# ------------------------------------------------------------------ grants


def test_grant_policy_is_inspectable_base64_json():
    grant = _grant()
    policy = json.loads(b64_decode(grant.policy))
    assert policy == {"expires": 2000, "resource": "/hls/a/"}
    # signature is HMAC-SHA1 over the decoded policy bytes
    doc = json.dumps(policy, separators=(",", ":"), sort_keys=True).encode()
    assert b64_decode(grant.signature) == hmac_sha1(SECRET, doc)
    assert grant.key_pair_id == KPID


def test_grant_query_round_trip():
    grant = _grant()
    query = grant.as_query()
    assert set(query) == {POLICY_PARAM, SIGNATURE_PARAM, KEY_PAIR_PARAM}
    assert SignedGrant.from_query(query) == grant
    assert SignedGrant.from_query({}) is None
    assert SignedGrant.from_query({POLICY_PARAM: "x"}) is None


def test_verify_accepts_within_scope_and_time():
    grant = _grant("/hls/a/", expires=2000)
    assert verify_grant(SECRET, KPID, grant, "/hls/a/128/seg_00000.ts", 1999)
    assert verify_grant(SECRET, KPID, grant, "/hls/a/master.m3u8", 0)


def test_verify_rejects_expiry_boundary_and_beyond():
    grant = _grant(expires=2000)
    path = "/hls/a/master.m3u8"
    assert not verify_grant(SECRET, KPID, grant, path, 2000)  # now >= expires
    assert not verify_grant(SECRET, KPID, grant, path, 3000)


def test_verify_rejects_out_of_scope_paths():
    grant = _grant("/hls/a/")
    assert not verify_grant(SECRET, KPID, grant, "/hls/b/master.m3u8", 0)
    assert not verify_grant(SECRET, KPID, grant, "/file/a/320.aud", 0)
    exact = issue_grant(SECRET, KPID, "/file/a/320.aud", 2000)
    assert verify_grant(SECRET, KPID, exact, "/file/a/320.aud", 0)
    assert not verify_grant(SECRET, KPID, exact, "/file/a/64.aud", 0)


def test_verify_rejects_wrong_secret_or_key_pair():
    grant = _grant()
    assert not verify_grant(b"other-secret", KPID, grant, "/hls/a/x", 0)
    assert not verify_grant(SECRET, "KOTHER", grant, "/hls/a/x", 0)
    assert not verify_grant(SECRET, KPID, None, "/hls/a/x", 0)


def test_forged_policy_fails_without_the_secret():
    grant = _grant(expires=2000)
    doc = json.dumps({"expires": FAR_FUTURE, "resource": "/"},
                     separators=(",", ":"), sort_keys=True).encode()
    forged = SignedGrant(policy=b64(doc), signature=grant.signature, key_pair_id=KPID)
    assert not verify_grant(SECRET, KPID, forged, "/hls/a/x", 0)


def test_garbage_grants_fail_closed():
    grant = _grant()
    for bad in (
        SignedGrant(policy="!!", signature=grant.signature, key_pair_id=KPID),
        SignedGrant(policy=grant.policy, signature="!!", key_pair_id=KPID),
        SignedGrant(policy=b64(b"not json"), signature=grant.signature, key_pair_id=KPID),
        SignedGrant(policy=b64(b'{"expires": 99}'), signature=grant.signature, key_pair_id=KPID),
        SignedGrant(policy=b64(b'{"expires": "soon", "resource": "/"}'),
                    signature=grant.signature, key_pair_id=KPID),
    ):
        assert not verify_grant(SECRET, KPID, bad, "/hls/a/x", 0)


def test_policy_mutation_fuzz_never_verifies():
    grant = _grant("/hls/a/", expires=FAR_FUTURE)
    raw = b64_decode(grant.policy)
    rng = random.Random(0xCD4)
    accepted = 0
    for _ in range(300):
        mutated = bytearray(raw)
        mutated[rng.randrange(len(mutated))] ^= 1 << rng.randrange(8)
        if bytes(mutated) == raw:
            continue
        candidate = SignedGrant(
            policy=b64(bytes(mutated)), signature=grant.signature, key_pair_id=KPID
        )
        accepted += verify_grant(SECRET, KPID, candidate, "/hls/a/x", 0)
    assert accepted == 0


def test_far_future_constant():
    assert FAR_FUTURE == 4102444800


# ---------------------------------------------------------------- cdn node


@pytest.fixture
def node():
    clock = Clock(1000)
    cdn = CdnNode("cdn.test", SECRET, KPID, clock, chunk_bytes=100)
    asset = MediaAsset("a1", "Asset", {320: b"\xaa" * 250, 64: b"\xbb" * 120})
    cdn.add_hls_asset("a1", asset)
    cdn.add_file_asset("f1", asset)
    return cdn, clock, asset


def _get(cdn, path, query=None):
    return cdn.handler(HttpRequest(method="GET", path=path, query=dict(query or {})))


def test_cdn_serves_granted_hls_tree(node):
    cdn, _clock, asset = node
    query = cdn.hls_grant("a1", expires_at=2000).as_query()

    master = _get(cdn, "/hls/a1/master.m3u8", query)
    assert master.status == 200
    entries = parse_master(master.body.decode()).entries
    assert [bw for bw, _ in entries] == [320000, 64000]

    index = _get(cdn, "/hls/a1/320/index.m3u8", query)
    segs = parse_index(index.body.decode(), variant_bitrate=320).segments
    assert len(segs) == 3  # 250 bytes at 100-byte chunks
    body = b"".join(
        _get(cdn, f"/hls/a1/320/seg_{i:05d}.ts", query).body for i in range(3)
    )
    assert body == asset.variant(320)


def test_cdn_single_variant_masters(node):
    cdn, _clock, _asset = node
    query = cdn.hls_grant("a1", expires_at=2000).as_query()
    solo = _get(cdn, "/hls/a1/64/master.m3u8", query)
    entries = parse_master(solo.body.decode()).entries
    assert entries == [(64000, "https://cdn.test/hls/a1/64/index.m3u8")]
    assert cdn.variant_master_url("a1", 64) == "https://cdn.test/hls/a1/64/master.m3u8"


def test_cdn_file_assets_and_exact_grants(node):
    cdn, _clock, asset = node
    query = cdn.file_grant("f1", 320, expires_at=2000).as_query()
    resp = _get(cdn, "/file/f1/320.aud", query)
    assert resp.status == 200 and resp.body == asset.variant(320)
    # that grant covers exactly one rate
    assert _get(cdn, "/file/f1/64.aud", query).status == 403
    assert cdn.file_url("f1", 320) == "https://cdn.test/file/f1/320.aud"


def test_cdn_refuses_without_grant(node):
    cdn, _clock, _asset = node
    assert _get(cdn, "/hls/a1/master.m3u8").status == 403
    assert _get(cdn, "/file/f1/320.aud").status == 403


def test_cdn_refuses_expired_grant(node):
    cdn, clock, _asset = node
    query = cdn.hls_grant("a1", expires_at=2000).as_query()
    assert _get(cdn, "/hls/a1/master.m3u8", query).status == 200
    clock.set_to(2000)
    assert _get(cdn, "/hls/a1/master.m3u8", query).status == 403


def test_cdn_grant_does_not_leak_across_assets(node):
    cdn, _clock, asset = node
    cdn.add_hls_asset("a2", asset)
    query = cdn.hls_grant("a1", expires_at=2000).as_query()
    assert _get(cdn, "/hls/a2/master.m3u8", query).status == 403


def test_cdn_404_before_grant_evaluation_order(node):
    # unknown object is 404 even with a valid grant; missing grant on a
    # real object is 403
    cdn, _clock, _asset = node
    query = cdn.hls_grant("a1", expires_at=2000).as_query()
    assert _get(cdn, "/hls/a1/999/index.m3u8", query).status == 404
    assert _get(cdn, "/nothing", query).status == 404


def test_cdn_get_only(node):
    cdn, _clock, _asset = node
    resp = cdn.handler(HttpRequest(method="POST", path="/hls/a1/master.m3u8"))
    assert resp.status == 400
