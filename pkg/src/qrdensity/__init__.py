"""Density of primes for which unions of arithmetic-progression windows are all residues or all non-residues."""

from __future__ import annotations

__version__ = "0.1.0"

from .density import DensityAnalysis, analyze  # noqa: E402
from .errors import (  # noqa: E402
    ConsistencyError,
    DomainError,
    InvalidTupleError,
    QrdError,
    ResourceLimitError,
    SizeLimitError,
    WrongPathError,
)
from .tuples import StandardTuple  # noqa: E402

__all__ = [
    "ConsistencyError",
    "DensityAnalysis",
    "DomainError",
    "InvalidTupleError",
    "QrdError",
    "ResourceLimitError",
    "SizeLimitError",
    "StandardTuple",
    "WrongPathError",
    "analyze",
]
