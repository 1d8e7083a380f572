"""Residue classes and the values of Euler's function."""

from .classifier import (
    Classification,
    FactoredModulus,
    Rationale,
    ResidueClass,
    Verdict,
    Witness,
    classify,
    scan_classes,
    solvable_mod_m,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "FactoredModulus",
    "Rationale",
    "ResidueClass",
    "Verdict",
    "Witness",
    "classify",
    "scan_classes",
    "solvable_mod_m",
]
