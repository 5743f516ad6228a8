"""Exact Greene–Plesser mirror maps, GKZ checks and smoothness criteria."""

__version__ = "0.1.0"

# Bumped whenever an algorithm change could alter a cached report.
CACHE_VERSION = f"{__version__}+alg1"
