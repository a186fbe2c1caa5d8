"""Reference clients, one per protocol, written the way the services
expect to be spoken to. Each rip_* function drives its service end to
end and returns raw audio bytes; play_benchmark does the same through
the CDM. All of them are pure functions of the env, the network and
their inputs, which is what keeps transcripts reproducible.
"""

from __future__ import annotations

import json

from . import benchmark as bench
from .crypto_kit import (
    aes_cbc_decrypt,
    b64,
    b64_decode,
    hmac_sha1,
    passphrase_seal,
    totp,
)
from .hls import assemble, parse_index, parse_master
from .services import hungama as hungama_mod
from .services import saavn as saavn_mod
from .services import wynk as wynk_mod
from .services.gaana import parse_song_page as parse_gaana_page
from .services.saavn import parse_song_page as parse_saavn_page
from .services.wynk import encode_cip, mix_it, search_id
from .transport import DeterministicEnv, Network, split_url

USER_AGENT = "Mozilla/5.0 (X11; Linux x86_64) testbed-player/1.0"


class ProtocolFailure(Exception):
    """A service answered in a way the protocol does not continue from."""

    def __init__(self, detail: str, status: int = 0):
        super().__init__(detail if not status else f"{detail} (status {status})")
        self.status = status


def _expect_json(resp, detail: str) -> dict:
    if resp.status != 200:
        raise ProtocolFailure(detail, resp.status)
    try:
        return json.loads(resp.body)
    except ValueError as exc:
        raise ProtocolFailure(f"{detail}: unparseable body") from exc


def _fetch_hls(net: Network, entry_url: str, grant_query: dict[str, str]) -> bytes:
    """master (or single-variant master) -> best index -> chunks."""
    resp = net.get(entry_url, extra_query=grant_query)
    if resp.status != 200:
        raise ProtocolFailure("manifest fetch refused", resp.status)
    master = parse_master(resp.body.decode("utf-8"))
    if not master.entries:
        raise ProtocolFailure("manifest lists no variants")
    _bw, index_url = master.best()
    resp = net.get(index_url, extra_query=grant_query)
    if resp.status != 200:
        raise ProtocolFailure("index fetch refused", resp.status)
    index = parse_index(resp.body.decode("utf-8"))
    chunks = []
    for seg_url, _seconds in index.segments:
        seg = net.get(seg_url, extra_query=grant_query)
        if seg.status != 200:
            raise ProtocolFailure("chunk fetch refused", seg.status)
        chunks.append(seg.body)
    return assemble(chunks)


def _grant_query_of(url: str) -> dict[str, str]:
    _host, _path, query = split_url(url)
    return query


# ---- wynk ------------------------------------------------------------------


def _wynk_stream_call(net, env, *, path, sid, uid, token, extra_headers):
    query = dict(wynk_mod.STREAM_QUERY)
    if path == wynk_mod.V2_STREAM_PATH:
        query["id"] = sid
    query_string = "&".join(f"{k}={v}" for k, v in query.items())
    body = "{}"
    msg = wynk_mod.stream_message("POST", path, query_string, body)
    utkn = f"{uid}:{b64(hmac_sha1(token.encode('ascii'), msg.encode('utf-8')))}"
    headers = {"x-bsy-utkn": utkn}
    headers.update(extra_headers)
    resp = net.post(
        f"https://{wynk_mod.HOST_PLAYBACK}{path}?{query_string}",
        body=body.encode("ascii"),
        headers=headers,
    )
    return _expect_json(resp, "stream authorization refused")


def rip_wynk_v1(
    net: Network,
    env: DeterministicEnv,
    song_url: str,
    cp_mapping: dict[str, str],
) -> bytes:
    reg = _expect_json(
        net.post(
            f"https://{wynk_mod.HOST_ACCOUNT}{wynk_mod.V1_LOGIN_PATH}",
            body=json.dumps(
                {"deviceId": env.uuid_like(), "userAgent": USER_AGENT}
            ).encode("utf-8"),
        ),
        "device registration refused",
    )
    sid = search_id(song_url, cp_mapping)
    stream = _wynk_stream_call(
        net,
        env,
        path=f"{wynk_mod.V1_STREAM_PREFIX}{sid}{wynk_mod.V1_STREAM_SUFFIX}",
        sid=sid,
        uid=reg["uid"],
        token=reg["token"],
        extra_headers={},
    )
    return _fetch_hls(net, stream["url"], stream["cookies"])


def wynk_v2_handshake(net: Network, env: DeterministicEnv) -> dict:
    """The priming dance: interleaved webassets fetches, the number
    exchange, then login. Returns the session material M."""
    now = env.now()
    bk = wynk_mod.gen_bk(now, env.rng)
    device_id = wynk_mod.gen_device_id(env.rng)
    first, second = device_id[:36], device_id[36:]
    for half, mark in ((first, "1"), (second, "2")):
        name = mix_it(half.replace("-", ""), bk)
        resp = net.get(f"https://{wynk_mod.HOST_ASSETS}/webassets/{name}_{mark}.jpg")
        if resp.status != 200:
            raise ProtocolFailure("priming fetch refused", resp.status)
    half = len(bk) // 2
    check = _expect_json(
        net.post(
            f"https://{wynk_mod.HOST_CHECK}{wynk_mod.CHECK_PATH}",
            body=json.dumps({"pid": bk[half:]}).encode("utf-8"),
            headers={"tk": str(env.now()), "bk": bk[:half]},
        ),
        "check refused",
    )
    bs = "".join(check[f] for f in wynk_mod.CHECK_FIELDS)
    return _expect_json(
        net.post(
            f"https://{wynk_mod.HOST_LOGIN}{wynk_mod.V2_LOGIN_PATH}",
            body=b"{}",
            headers={"x-bsy-ptot": str(env.now()), "x-bsy-cip": encode_cip(bs)},
        ),
        "login refused",
    )


def rip_wynk_v2(
    net: Network,
    env: DeterministicEnv,
    song_url: str,
    cp_mapping: dict[str, str],
    sk: str = wynk_mod.DEFAULT_SK,
) -> bytes:
    session = wynk_v2_handshake(net, env)
    sid = search_id(song_url, cp_mapping)
    otp = totp(
        (session["dt"] + sk).encode("utf-8"), wynk_mod.TOTP_PARAMS, env.now()
    )
    sealed = passphrase_seal(session["kt"], otp.encode("ascii"), env.rand_bytes(8))
    stream = _wynk_stream_call(
        net,
        env,
        path=wynk_mod.V2_STREAM_PATH,
        sid=sid,
        uid=session["uid"],
        token=session["token"],
        extra_headers={"x-bsy-uuid": session["dt"], "x-bsy-t": b64(sealed)},
    )
    return _fetch_hls(net, stream["url"], stream["cookies"])


# ---- jiosaavn ----------------------------------------------------------------


def rip_saavn(
    net: Network,
    env: DeterministicEnv,
    song_url: str,
    bit_rate: str = "320",
) -> bytes:
    page = net.get(song_url)
    if page.status != 200:
        raise ProtocolFailure("song page refused", page.status)
    song = parse_saavn_page(page.body.decode("utf-8"))
    auth = _expect_json(
        net.get(
            f"https://{saavn_mod.HOST_WWW}{saavn_mod.API_PATH}",
            extra_query={
                "call": saavn_mod.AUTH_CALL,
                "url": song.encrypted_media_url,
                "bit_rate": bit_rate,
            },
        ),
        "auth token refused",
    )
    media = net.get(auth["auth_url"])
    if media.status != 200:
        raise ProtocolFailure("media fetch refused", media.status)
    return media.body


# ---- gaana --------------------------------------------------------------------


def rip_gaana(
    net: Network,
    env: DeterministicEnv,
    song_url: str,
    page_key: bytes,
    page_iv: bytes,
    quality: str = "high",
) -> bytes:
    page = net.get(song_url)
    if page.status != 200:
        raise ProtocolFailure("song page refused", page.status)
    block = parse_gaana_page(page.body.decode("utf-8"))
    if quality not in block.path:
        raise ProtocolFailure(f"quality {quality!r} not on page")
    uri = aes_cbc_decrypt(
        page_key, page_iv, b64_decode(block.path[quality])
    ).decode("utf-8")
    return _fetch_hls(net, uri, _grant_query_of(uri))


# ---- hungama --------------------------------------------------------------------


def rip_hungama(
    net: Network,
    env: DeterministicEnv,
    song_url: str,
    quality: str | None = None,
) -> bytes:
    song_id = song_url.rstrip("/").rsplit("/", 1)[-1]
    data = _expect_json(
        net.get(f"https://{hungama_mod.HOST_WWW}{hungama_mod.PLAYER_DATA_PREFIX}{song_id}"),
        "player data refused",
    )
    token = _grant_query_of(data["file"]).get("token", "")
    if not token:
        raise ProtocolFailure("file url carries no token")
    cookies = {hungama_mod.QUALITY_COOKIE: quality} if quality else {}
    media = _expect_json(
        net.post(
            f"https://{hungama_mod.HOST_WWW}{hungama_mod.MDNURL_PREFIX}{data['media_id']}",
            extra_query={"token": token},
            cookies=cookies,
        ),
        "mdnurl refused",
    )
    resp = net.get(media["media_url"])
    if resp.status != 200:
        raise ProtocolFailure("media fetch refused", resp.status)
    return resp.body


# ---- benchmark -------------------------------------------------------------------


def play_benchmark(
    net: Network,
    env: DeterministicEnv,
    track_id: str,
    credentials: tuple[str, str],
    cdm: bench.Cdm,
) -> bytes:
    username, password = credentials
    login = net.post(
        f"https://{bench.HOST_API}{bench.LOGIN_PATH}",
        body=json.dumps({"username": username, "password": password}).encode(),
    )
    if login.status != 200:
        raise ProtocolFailure("login refused", login.status)
    cookies = dict(login.set_cookies)
    token = _expect_json(
        net.post(f"https://{bench.HOST_API}{bench.TOKEN_PATH}", cookies=cookies),
        "bearer refused",
    )
    resolved = _expect_json(
        net.get(
            f"https://{bench.HOST_API}{bench.RESOLVE_PREFIX}{track_id}",
            headers={"authorization": f"Bearer {token['bearer']}"},
        ),
        "resolve refused",
    )
    uri = resolved["uris"][0]
    first = net.get(uri, headers={"range": f"bytes=0-{bench.SEGMENT_BYTES - 1}"})
    if first.status != 200:
        raise ProtocolFailure("first chunk refused", first.status)
    init = bench.extract_init_data(first.body)
    request_blob = cdm.request_license(init)
    license_resp = net.post(resolved["license_url"], body=request_blob)
    if license_resp.status != 200:
        raise ProtocolFailure("license refused", license_resp.status)
    handle = cdm.install(license_resp.body)

    ciphertext_parts = [first.body[bench.HEADER_BYTES:]]
    offset = len(first.body)
    while True:
        nxt = net.get(
            uri,
            headers={"range": f"bytes={offset}-{offset + bench.SEGMENT_BYTES - 1}"},
        )
        if nxt.status != 200:
            raise ProtocolFailure("chunk fetch refused", nxt.status)
        if not nxt.body:
            break
        ciphertext_parts.append(nxt.body)
        offset += len(nxt.body)
        if len(nxt.body) < bench.SEGMENT_BYTES:
            break
    plain = []
    position = 0
    for part in ciphertext_parts:
        plain.append(cdm.decrypt_segment(handle, part, position=position))
        position += len(part)
    return b"".join(plain)
