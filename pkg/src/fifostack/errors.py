"""Exception types shared across the package."""

from __future__ import annotations


class FifoStackError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FifoStackError, ValueError):
    """Malformed instance, solution, digraph or LP text."""


class CapacityError(FifoStackError):
    """A configured node/memory/size budget would be exceeded."""

    def __init__(self, message: str, budget: int | None = None) -> None:
        super().__init__(message)
        self.budget = budget


class NotFoundUnderCut(FifoStackError):
    """No processing survives the open-count cut; the caller should raise it."""

    def __init__(self, cut: int) -> None:
        super().__init__(f"no processing with at most {cut} open pallets")
        self.cut = cut
        self.snapshot = None  # resumable search state, set by the decision search


class ParameterError(FifoStackError, ValueError):
    """Invalid generator parameters."""
