"""key=value config for the harness.

Everything has a working default so `testbed demo` runs with no file at
all; a config file only overrides. Secrets are hex so the file stays
one printable line per key.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass
class TestbedConfig:
    seed: int = 7
    clock: int = 1700000000
    catalog_dir: str = ""
    chunk_bytes: int = 32768
    grant_ttl: int = 3600
    wynk_session_ttl: int = 2592000
    hungama_token_ttl: int = 86400
    bearer_ttl: int = 3600
    wynk_sk: str = "51ymYn1MS"
    wynk_cdn_secret_hex: str = "4f1c6d2a90be77d31e55a8c04962ddc1b07f93e2"
    saavn_cdn_secret_hex: str = "8a25c90bf417de6300982bd15efa4c7761d3a90f"
    gaana_cdn_secret_hex: str = "d6027be93f514cc8a1e7f04db96325aa80ce14d7"
    hungama_cdn_secret_hex: str = "23fa8c11d074b9e655201cdd38e6a7f4490b52e8"
    benchmark_cdn_secret_hex: str = "b85f03ae67c12d94f0261e5b7ad9c480d1537fa6"
    hungama_token_secret_hex: str = "97d11e40ab5f82c6e3094ffd261c7b3a5580ed29"
    saavn_seal_key_hex: str = "3d8a1f650b72c49ee8135a0c9746fd2b"
    saavn_seal_iv_hex: str = "71e04cb82f9ad6135c68020d94b7fae3"
    gaana_key_hex: str = "a45bd1087e92cf36610b54afc3d278e9"
    gaana_iv_hex: str = "0cf3a871469de2b5871e90cd5336ab14"
    device_key_hex: str = "5e21b7da93c604f8ab176ce0421f98d3"

    # -- decoded accessors ---------------------------------------------------

    def _hex(self, name: str, want_len: int | None = None) -> bytes:
        raw = getattr(self, name)
        try:
            data = bytes.fromhex(raw)
        except ValueError as exc:
            raise ConfigError(f"{name} is not hex: {raw!r}") from exc
        if want_len is not None and len(data) != want_len:
            raise ConfigError(f"{name} must be {want_len} bytes, got {len(data)}")
        return data

    def wynk_cdn_secret(self) -> bytes:
        return self._hex("wynk_cdn_secret_hex")

    def saavn_cdn_secret(self) -> bytes:
        return self._hex("saavn_cdn_secret_hex")

    def gaana_cdn_secret(self) -> bytes:
        return self._hex("gaana_cdn_secret_hex")

    def hungama_cdn_secret(self) -> bytes:
        return self._hex("hungama_cdn_secret_hex")

    def benchmark_cdn_secret(self) -> bytes:
        return self._hex("benchmark_cdn_secret_hex")

    def hungama_token_secret(self) -> bytes:
        return self._hex("hungama_token_secret_hex")

    def saavn_seal_key(self) -> bytes:
        return self._hex("saavn_seal_key_hex", 16)

    def saavn_seal_iv(self) -> bytes:
        return self._hex("saavn_seal_iv_hex", 16)

    def gaana_key(self) -> bytes:
        return self._hex("gaana_key_hex", 16)

    def gaana_iv(self) -> bytes:
        return self._hex("gaana_iv_hex", 16)

    def device_key(self) -> bytes:
        return self._hex("device_key_hex", 16)


_INT_FIELDS = {
    f.name for f in fields(TestbedConfig) if f.type == "int"
}


def parse_config(text: str) -> TestbedConfig:
    cfg = TestbedConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if not hasattr(cfg, key):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in _INT_FIELDS:
            try:
                setattr(cfg, key, int(value))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {key} wants an integer") from exc
        else:
            setattr(cfg, key, value)
    return cfg


def load_config(path) -> TestbedConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
