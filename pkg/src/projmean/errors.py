"""Semantic errors shared across the package."""


class ProjmeanError(Exception):
    """Base error for this package."""


class DomainError(ProjmeanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""
