"""Exception hierarchy shared by every module."""

from __future__ import annotations


class QrdError(Exception):
    """Base class for all errors raised by qrdensity."""


class DomainError(QrdError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidTupleError(DomainError):
    """A standard tuple violates one of its invariants."""


class SizeLimitError(QrdError):
    """An exponential enumeration would exceed its configured cap."""


class ResourceLimitError(QrdError):
    """A table allocation would exceed the configured memory budget."""


class ConsistencyError(QrdError):
    """Two independent computations of the same quantity disagree."""


class WrongPathError(QrdError):
    """A closed-form formula was invoked outside its hypotheses."""
