"""Wires the whole bench together: one env, one network, five
protocols and the control service, all seeded from a single config.

Everything a harness needs goes through this object so tests, the CLI
and the auditor drive the exact same wiring.
"""

from __future__ import annotations

from . import benchmark as bench
from . import clients
from .catalog import demo_catalog, load_catalog, slugify
from .config import TestbedConfig
from .ripper import RipResult, tap_rip
from .services import GaanaService, HungamaService, SaavnService, WynkService
from .services import gaana as gaana_mod
from .services import hungama as hungama_mod
from .services import saavn as saavn_mod
from .services import wynk as wynk_mod
from .transport import DeterministicEnv, Network, read_tap

RIP_SERVICES = ("wynk-v1", "wynk-v2", "jiosaavn", "gaana", "hungama", "benchmark")

# who the client pretends to be, per probe
ANONYMOUS = "anonymous"
DEFAULT_PRINCIPAL = "default"
FREE_TIER = "free"

_BAD_CREDENTIALS = ("nobody", "wrong-password")


class Testbed:
    def __init__(self, config: TestbedConfig | None = None):
        self.config = config or TestbedConfig()
        cfg = self.config
        self.env = DeterministicEnv(cfg.seed, cfg.clock)
        if cfg.catalog_dir:
            self.catalog = load_catalog(cfg.catalog_dir)
        else:
            self.catalog = demo_catalog(self.env.rng)
        self.net = Network(self.env)

        self.wynk = WynkService(
            self.catalog,
            self.env,
            cdn_secret=cfg.wynk_cdn_secret(),
            sk=cfg.wynk_sk,
            session_ttl=cfg.wynk_session_ttl,
            grant_ttl=cfg.grant_ttl,
            chunk_bytes=cfg.chunk_bytes,
        )
        self.saavn = SaavnService(
            self.catalog,
            self.env,
            cdn_secret=cfg.saavn_cdn_secret(),
            seal_key=cfg.saavn_seal_key(),
            seal_iv=cfg.saavn_seal_iv(),
        )
        self.gaana = GaanaService(
            self.catalog,
            self.env,
            cdn_secret=cfg.gaana_cdn_secret(),
            page_key=cfg.gaana_key(),
            page_iv=cfg.gaana_iv(),
        )
        self.hungama = HungamaService(
            self.catalog,
            self.env,
            cdn_secret=cfg.hungama_cdn_secret(),
            token_secret=cfg.hungama_token_secret(),
            token_ttl=cfg.hungama_token_ttl,
            grant_ttl=cfg.grant_ttl,
        )
        self.benchmark = bench.BenchmarkService(
            self.catalog,
            self.env,
            cdn_secret=cfg.benchmark_cdn_secret(),
            device_key=cfg.device_key(),
            bearer_ttl=cfg.bearer_ttl,
            grant_ttl=cfg.grant_ttl,
        )
        for service in (self.wynk, self.saavn, self.gaana, self.hungama, self.benchmark):
            service.mount(self.net)

    # ---- catalog shortcuts ---------------------------------------------------

    def open_tracks(self) -> list[str]:
        return [a.asset_id for a in self.catalog.assets.values() if not a.premium]

    def premium_tracks(self) -> list[str]:
        return self.catalog.premium_ids()

    # ---- service knowledge -----------------------------------------------------

    def song_url(self, service: str, track: str) -> str:
        if service in ("wynk-v1", "wynk-v2"):
            slug = slugify(self.catalog.asset(track).title)
            return self.wynk.song_url(track, slug)
        if service == "jiosaavn":
            return self.saavn.song_url(track)
        if service == "gaana":
            return self.gaana.song_url(track)
        if service == "hungama":
            return self.hungama.song_url(track)
        raise ValueError(f"no song urls for {service!r}")

    def static_asset_urls(self, service: str) -> list[str]:
        urls = {
            "wynk-v1": [f"https://{wynk_mod.HOST_ASSETS}{wynk_mod.ASSET_PATH}"],
            "wynk-v2": [f"https://{wynk_mod.HOST_ASSETS}{wynk_mod.ASSET_PATH}"],
            "jiosaavn": [f"https://{saavn_mod.HOST_WWW}{saavn_mod.ASSET_PATH}"],
            "gaana": [f"https://{gaana_mod.HOST_WWW}{gaana_mod.ASSET_PATH}"],
            "hungama": [f"https://{hungama_mod.HOST_WWW}{hungama_mod.ASSET_PATH}"],
            "benchmark": [f"https://{bench.HOST_API}{bench.ASSET_PATH}"],
        }
        return urls[service]

    def secret_material(self) -> list[str]:
        """Strings that must never show up in client-visible static assets
        unless the service really does hardcode them."""
        cfg = self.config
        return [
            cfg.gaana_key_hex,
            cfg.gaana_iv_hex,
            cfg.wynk_sk,
            cfg.saavn_seal_key_hex,
            cfg.saavn_seal_iv_hex,
            cfg.hungama_token_secret_hex,
            cfg.wynk_cdn_secret_hex,
            cfg.saavn_cdn_secret_hex,
            cfg.gaana_cdn_secret_hex,
            cfg.hungama_cdn_secret_hex,
            cfg.benchmark_cdn_secret_hex,
            cfg.device_key_hex,
        ]

    def benchmark_credentials(self, principal: str) -> tuple[str, str]:
        if principal == ANONYMOUS:
            return _BAD_CREDENTIALS
        want = "premium" if principal == DEFAULT_PRINCIPAL else "free"
        for user, (password, tier) in self.benchmark.users.items():
            if tier == want:
                return (user, password)
        raise ValueError(f"no {want} user configured")

    # ---- driving clients ----------------------------------------------------------

    def run_client(
        self,
        service: str,
        track: str,
        quality: str | None = None,
        principal: str = DEFAULT_PRINCIPAL,
    ) -> bytes:
        if service not in RIP_SERVICES:
            raise ValueError(f"unknown service {service!r}")
        if track not in self.catalog.assets:
            raise clients.ProtocolFailure(f"unknown track {track!r}")
        if service == "wynk-v1":
            return clients.rip_wynk_v1(
                self.net, self.env, self.song_url(service, track),
                self.catalog.cp_mapping,
            )
        if service == "wynk-v2":
            return clients.rip_wynk_v2(
                self.net, self.env, self.song_url(service, track),
                self.catalog.cp_mapping, sk=self.config.wynk_sk,
            )
        if service == "jiosaavn":
            return clients.rip_saavn(
                self.net, self.env, self.song_url(service, track),
                bit_rate=quality or "320",
            )
        if service == "gaana":
            return clients.rip_gaana(
                self.net, self.env, self.song_url(service, track),
                self.config.gaana_key(), self.config.gaana_iv(),
                quality=quality or "high",
            )
        if service == "hungama":
            return clients.rip_hungama(
                self.net, self.env, self.song_url(service, track), quality=quality
            )
        return clients.play_benchmark(
            self.net,
            self.env,
            track,
            self.benchmark_credentials(principal),
            self.benchmark.make_cdm(),
        )

    def rip(
        self, service: str, track: str, quality: str | None = None
    ) -> tuple[RipResult, str]:
        """Run the reference client under a fresh tap and rip the
        transcript. Returns (result, client_error), client_error empty
        when the client itself got through."""
        tap = self.net.attach_tap()
        client_error = ""
        try:
            self.run_client(service, track, quality=quality)
        except clients.ProtocolFailure as exc:
            client_error = str(exc)
        finally:
            self.net.detach_tap(tap)
        result = tap_rip(read_tap(tap), self.catalog, service, track)
        return result, client_error
