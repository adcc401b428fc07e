"""Generalized CRF-structures: Courant calculus, structure checks and metric criteria."""

from .report import CheckReport, PreconditionError, StructureError

__version__ = "0.1.0"

__all__ = ["CheckReport", "PreconditionError", "StructureError", "__version__"]
