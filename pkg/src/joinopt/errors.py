"""Exception hierarchy shared by the optimizer modules."""

from __future__ import annotations


class JoinOptError(Exception):
    """Base class for every error raised by :mod:`joinopt`."""


class ContractViolation(JoinOptError, ValueError):
    """An operation was called with arguments outside its precondition."""


class CapacityError(ContractViolation):
    """The query has more relations than the exact optimizers accept."""


class NotATreeError(ContractViolation):
    """A tree-only optimizer was given a join graph with a cycle."""


class DisconnectedGraphError(ContractViolation):
    """The join graph (or a requested relation set) is not connected."""


class IncompleteMemoError(JoinOptError, KeyError):
    """A plan could not be extracted because a memo entry is missing."""


class OptimizerTimeout(JoinOptError):
    """Raised internally when an optimizer exhausts its time budget."""


class QueryFormatError(JoinOptError, ValueError):
    """A query file is malformed or fails validation."""
