"""Ground-truth media catalog shared by every simulated service.

Variant files carry a 4-byte AUD0 magic so recovered streams are
recognisable in a tap without guessing. On disk a catalog is one file
per variant (<asset_id>.<bitrate>.aud) plus an optional <asset_id>.meta
with title/premium, so a directory round-trips losslessly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from .hls import AUDIO_MAGIC, MediaAsset

DEMO_CP_MAPPING = {"srch": "bsycdn1"}

# (asset_id, title, premium, per-rate approximate sizes)
_DEMO_TRACKS = (
    ("trk1", "Midnight Local", False),
    ("trk2", "Paper Lanterns", False),
    ("trk3", "Gilded Cage", True),
)
_DEMO_SIZES = {320: 90000, 128: 40000, 64: 20000, 32: 10000, 16: 5000}


@dataclass
class ServiceCatalog:
    assets: dict[str, MediaAsset] = field(default_factory=dict)
    cp_mapping: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = list(self.cp_mapping.values())
        if len(values) != len(set(values)):
            raise ValueError("cp_mapping values must be unique")

    def asset(self, asset_id: str) -> MediaAsset:
        return self.assets[asset_id]

    def track_ids(self) -> list[str]:
        return list(self.assets)

    def premium_ids(self) -> list[str]:
        return [a.asset_id for a in self.assets.values() if a.premium]


def slugify(title: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-")
    return slug or "track"


def demo_catalog(rng: Random) -> ServiceCatalog:
    """Three tracks, one premium, sizes jittered off the nominal ladder so
    chunk boundaries never line up by accident."""
    assets = {}
    for asset_id, title, premium in _DEMO_TRACKS:
        variants = {}
        for rate, nominal in _DEMO_SIZES.items():
            size = nominal + rng.randrange(-512, 2048)
            variants[rate] = AUDIO_MAGIC + rng.randbytes(size - len(AUDIO_MAGIC))
        assets[asset_id] = MediaAsset(
            asset_id=asset_id, title=title, variants=variants, premium=premium
        )
    return ServiceCatalog(assets=assets, cp_mapping=dict(DEMO_CP_MAPPING))


def save_catalog(catalog: ServiceCatalog, dirpath) -> None:
    root = Path(dirpath)
    root.mkdir(parents=True, exist_ok=True)
    for asset in catalog.assets.values():
        for rate, blob in sorted(asset.variants.items()):
            (root / f"{asset.asset_id}.{rate}.aud").write_bytes(blob)
        meta = f"title={asset.title}\npremium={'yes' if asset.premium else 'no'}\n"
        (root / f"{asset.asset_id}.meta").write_text(meta, encoding="utf-8")


def load_catalog(dirpath, cp_mapping: dict[str, str] | None = None) -> ServiceCatalog:
    root = Path(dirpath)
    if not root.is_dir():
        raise FileNotFoundError(f"catalog directory {root} not found")
    variants: dict[str, dict[int, bytes]] = {}
    for path in sorted(root.glob("*.aud")):
        stem = path.name[:-4]
        asset_id, _, rate_text = stem.rpartition(".")
        if not asset_id or not rate_text.isdigit():
            raise ValueError(f"bad catalog filename {path.name}")
        variants.setdefault(asset_id, {})[int(rate_text)] = path.read_bytes()
    assets = {}
    for asset_id, rates in variants.items():
        title, premium = asset_id, False
        meta = root / f"{asset_id}.meta"
        if meta.exists():
            for line in meta.read_text(encoding="utf-8").splitlines():
                key, _, value = line.partition("=")
                if key == "title":
                    title = value
                elif key == "premium":
                    premium = value == "yes"
        assets[asset_id] = MediaAsset(
            asset_id=asset_id, title=title, variants=rates, premium=premium
        )
    if not assets:
        raise ValueError(f"no .aud files under {root}")
    return ServiceCatalog(
        assets=assets, cp_mapping=dict(cp_mapping or DEMO_CP_MAPPING)
    )
