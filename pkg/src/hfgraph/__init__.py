"""Hat Heegaard Floer homology over GF(2) and graph cobordism maps."""
from __future__ import annotations

__all__ = ["gf2", "zlinalg", "diagram", "floer", "moves", "graphcob", "textio", "audits", "cli"]
__version__ = "0.1.0"
