"""Exact verification of overpartition identities and the universal mock theta function g2."""

from .qseries import INFINITY, Monomial, NonUnitConstantTerm, TruncatedSeries
from .partitions import FAMILIES, FamilyParams, OverPartition, valid_params

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "Monomial", "NonUnitConstantTerm", "TruncatedSeries",
    "FAMILIES", "FamilyParams", "OverPartition", "valid_params", "__version__",
]
