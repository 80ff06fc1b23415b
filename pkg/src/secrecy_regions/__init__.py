"""
Secrecy Regions - secrecy rate regions for broadcast channels with an eavesdropper.

This package provides:
- Gaussian, degraded discrete and general inner-bound secrecy regions
- Broadcast-strategy power allocation for the slowly fading wiretap channel
- Small-block wiretap codebooks with exact equivocation and error probability

Designed with the same principles throughout:
- Result types at the boundaries, error values carried by one exception inside
- Immutable data structures
- Deterministic, seeded numerics
"""

from secrecy_regions.config import Config, load_config
from secrecy_regions.types import Err, Ok, Result, SecrecyError

__version__ = "0.1.0"
__all__ = ["Ok", "Err", "Result", "SecrecyError", "Config", "load_config", "__version__"]
