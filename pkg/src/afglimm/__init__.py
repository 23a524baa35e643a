"""Bratteli diagrams and primitive ideals for commutative quotients.

Compiles a finite presentation of a compact Hausdorff quotient into an
indexed Bratteli diagram, computes its ideal lattice, and checks the
correspondence between points of the quotient and primitive ideals.
"""

from .diagram import BratteliDiagram, DiagramError, PathSeq, Vertex
from .ideals import IdealSubdiagram, IdealError, is_ideal_subdiagram, join, meet
from .kernels import BACKEND
from .presentation import PointSpec, QuotientPresentation, validate

__all__ = [
    "BACKEND", "BratteliDiagram", "DiagramError", "IdealError", "IdealSubdiagram",
    "PathSeq", "PointSpec", "QuotientPresentation", "Vertex", "is_ideal_subdiagram",
    "join", "meet", "validate",
]
__version__ = "0.1.0"
