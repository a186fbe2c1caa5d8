"""Deterministic desk-scale testbed for auditing streaming-audio
content protection: five rippable content-retrieval protocols, one
DRM-protected control service, a passive tap ripper and a mechanical
practices auditor, all on an in-memory wire with an injected clock."""

from .config import TestbedConfig, load_config
from .testbed import RIP_SERVICES, Testbed

__version__ = "0.1.0"

__all__ = ["Testbed", "TestbedConfig", "load_config", "RIP_SERVICES", "__version__"]
