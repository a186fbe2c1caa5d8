"""Testbed wiring: one network, five services, shared catalog."""

from __future__ import annotations

import pytest

from drmtestbed.clients import ProtocolFailure
from drmtestbed.testbed import RIP_SERVICES


class TestWiring:
    def test_rippable_services(self):
        assert RIP_SERVICES == (
            "wynk-v1",
            "wynk-v2",
            "jiosaavn",
            "gaana",
            "hungama",
            "benchmark",
        )

    def test_every_service_shares_the_catalog(self, bed):
        for svc in (bed.wynk, bed.saavn, bed.gaana, bed.hungama, bed.benchmark):
            assert svc.catalog is bed.catalog

    def test_track_partition(self, bed):
        assert bed.open_tracks() == ["trk1", "trk2"]
        assert bed.premium_tracks() == ["trk3"]

    def test_song_urls_embed_the_title_slug(self, bed):
        for service in RIP_SERVICES[:-1]:
            url = bed.song_url(service, "trk1")
            assert url.startswith("https://")
            assert "/song/midnight-local" in url

    def test_wynk_song_url_carries_the_search_id(self, bed):
        assert bed.song_url("wynk-v1", "trk1").endswith("/srch_trk1")

    def test_no_song_url_for_the_benchmark(self, bed):
        with pytest.raises(ValueError):
            bed.song_url("benchmark", "trk1")

    def test_static_assets_are_served(self, bed):
        for service in RIP_SERVICES:
            for url in bed.static_asset_urls(service):
                assert bed.net.get(url).status == 200

    def test_secret_material_is_nonempty_hex_or_sk(self, bed):
        material = bed.secret_material()
        assert bed.config.wynk_sk in material
        assert bed.config.device_key_hex in material
        assert len(material) == len(set(material))


class TestRunClient:
    def test_unknown_service_raises_value_error(self, bed):
        with pytest.raises(ValueError):
            bed.run_client("spotify", "trk1")

    def test_unknown_track_is_a_protocol_failure(self, bed):
        with pytest.raises(ProtocolFailure):
            bed.run_client("gaana", "ghost")

    def test_default_principal_gets_premium_benchmark_audio(self, bed):
        blob = bed.run_client("benchmark", "trk3")
        assert blob == bed.catalog.asset("trk3").variant(320)

    def test_free_tier_is_refused_premium(self, bed):
        with pytest.raises(ProtocolFailure):
            bed.run_client("benchmark", "trk3", principal="free")

    def test_anonymous_cannot_even_log_in(self, bed):
        with pytest.raises(ProtocolFailure):
            bed.run_client("benchmark", "trk1", principal="anonymous")

    def test_benchmark_credentials_lookup(self, bed):
        user, password = bed.benchmark_credentials("default")
        assert bed.benchmark.users[user] == (password, "premium")
        user, password = bed.benchmark_credentials("free")
        assert bed.benchmark.users[user] == (password, "free")
        assert bed.benchmark_credentials("anonymous") == ("nobody", "wrong-password")
