"""Oriented graph complexes, their direction-reversing involution and exact homology."""

from ogcomplex.graphs import (
    ZERO,
    AdmissibilityRules,
    GraphClass,
    LabeledGraph,
    SignedClass,
    automorphism_report,
    canonicalize,
    check_admissible,
    new_graph,
    reverse_all,
)

__all__ = [
    "ZERO",
    "AdmissibilityRules",
    "GraphClass",
    "LabeledGraph",
    "SignedClass",
    "automorphism_report",
    "canonicalize",
    "check_admissible",
    "new_graph",
    "reverse_all",
]

__version__ = "0.1.0"
