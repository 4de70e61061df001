"""grasscrit: Riemannian geometry of the real Grassmannian G(k, n),
nearest-point problems for simple Schubert varieties, and critical-point
complexity of the Grassmann distance to algebraic hypersurfaces."""

from . import core, cutlocus, errors, lowrank, schubert, search, serialize

__version__ = "0.1.0"

__all__ = ["core", "cutlocus", "errors", "lowrank", "schubert", "search", "serialize"]
