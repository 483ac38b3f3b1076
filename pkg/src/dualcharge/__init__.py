"""
Dual charges for multimarginal optimal transport with Coulomb cost,
computed at positive temperature by Langevin-sampled gradient ascent
"""

from __future__ import annotations

import importlib.metadata

__version__ = importlib.metadata.version(__name__)
