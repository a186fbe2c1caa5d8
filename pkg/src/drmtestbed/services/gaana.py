"""Gaana simulation: the song page itself carries AES-CBC encrypted
playback URIs per quality, and the key/IV pair sits in the public player
bundle. Decrypting a path yields a pre-authorized manifest URL, so the
page is the whole handshake.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..catalog import ServiceCatalog, slugify
from ..cdn import FAR_FUTURE, CdnNode
from ..crypto_kit import aes_cbc_encrypt, b64
from ..transport import (
    DeterministicEnv,
    HttpRequest,
    HttpResponse,
    error_response,
)
from ..webassets import render_client_script

HOST_WWW = "gaana.com"
HOST_CDN = "stream.gaana.com"

SONG_PREFIX = "/song/"
ASSET_PATH = "/static/player.min.js"

QUALITY_RATES = {"high": 320, "medium": 128, "low": 64}

_SPAN_OPEN = '<span class="sourcelist" data-type="playSong">'
_SPAN_CLOSE = "</span>"


@dataclass(frozen=True)
class GaanaPathBlock:
    """The decoded playSong JSON: base64 AES-CBC ciphertext per quality."""

    title: str
    path: dict[str, str]


def parse_song_page(html: str) -> GaanaPathBlock:
    start = html.find(_SPAN_OPEN)
    if start < 0:
        raise ValueError("no playSong span on page")
    start += len(_SPAN_OPEN)
    end = html.find(_SPAN_CLOSE, start)
    if end < 0:
        raise ValueError("unterminated playSong span")
    data = json.loads(html[start:end])
    return GaanaPathBlock(title=data["title"], path=dict(data["path"]))


class GaanaService:
    def __init__(
        self,
        catalog: ServiceCatalog,
        env: DeterministicEnv,
        *,
        cdn_secret: bytes,
        page_key: bytes,
        page_iv: bytes,
    ):
        self.catalog = catalog
        self.env = env
        self.page_key = page_key
        self.page_iv = page_iv
        self.cdn = CdnNode(HOST_CDN, cdn_secret, "KGAANA1", env.clock)
        self._by_slug: dict[str, str] = {}
        for asset in catalog.assets.values():
            self.cdn.add_hls_asset(
                asset.asset_id, asset, sorted(QUALITY_RATES.values(), reverse=True)
            )
            self._by_slug[slugify(asset.title)] = asset.asset_id

    def mount(self, net) -> None:
        net.register(HOST_WWW, self._handle_www)
        net.register(self.cdn.host, self.cdn.handler)

    def song_url(self, asset_id: str) -> str:
        return f"https://{HOST_WWW}{SONG_PREFIX}{slugify(self.catalog.asset(asset_id).title)}"

    def _authorized_uri(self, asset_id: str, quality: str) -> str:
        rate = QUALITY_RATES[quality]
        grant = self.cdn.hls_grant(asset_id, FAR_FUTURE)
        query = "&".join(f"{k}={v}" for k, v in grant.as_query().items())
        return f"{self.cdn.variant_master_url(asset_id, rate)}?{query}"

    def _handle_www(self, req: HttpRequest) -> HttpResponse:
        if req.method != "GET":
            return error_response(400, "GET only")
        if req.path == ASSET_PATH:
            body = render_client_script(
                [
                    f'var mediaKey="{self.page_key.hex()}"',
                    f'var mediaIv="{self.page_iv.hex()}"',
                    'var qualities=["high","medium","low"]',
                ]
            )
            return HttpResponse(
                status=200,
                headers={"content-type": "application/javascript"},
                body=body,
            )
        if req.path.startswith(SONG_PREFIX):
            slug = req.path[len(SONG_PREFIX):].strip("/")
            asset_id = self._by_slug.get(slug)
            if asset_id is None:
                return error_response(404, "no such song")
            return self._song_page(asset_id)
        return error_response(404, "no such page")

    def _song_page(self, asset_id: str) -> HttpResponse:
        asset = self.catalog.asset(asset_id)
        path = {
            quality: b64(
                aes_cbc_encrypt(
                    self.page_key,
                    self.page_iv,
                    self._authorized_uri(asset_id, quality).encode("utf-8"),
                )
            )
            for quality in QUALITY_RATES
        }
        block = json.dumps({"title": asset.title, "path": path})
        html = (
            "<!DOCTYPE html><html><head><title>"
            + asset.title
            + "</title></head><body>\n"
            + _SPAN_OPEN
            + block
            + _SPAN_CLOSE
            + "\n</body></html>\n"
        )
        return HttpResponse(
            status=200,
            headers={"content-type": "text/html"},
            body=html.encode("utf-8"),
        )
