"""Exception types raised across the package.

Parse-time errors carry the 1-based line number of the offending input
line where one exists.  Search-budget failures carry the best result
found so far, so callers can persist partial output.
"""

from __future__ import annotations


class TncutError(Exception):
    """Base class for all package errors."""


# --- circuit parsing / validation -----------------------------------------

class MalformedLine(TncutError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownGate(TncutError):
    def __init__(self, name: str, line: int):
        super().__init__(f"line {line}: unknown gate {name!r}")
        self.name = name
        self.line = line


class QubitOutOfRange(TncutError):
    def __init__(self, line: int, qubit: int):
        super().__init__(f"line {line}: qubit {qubit} outside layout")
        self.line = line
        self.qubit = qubit


class MomentCollision(TncutError):
    def __init__(self, qubit: int, moment: int):
        super().__init__(f"qubit {qubit} used twice in moment {moment}")
        self.qubit = qubit
        self.moment = moment


# --- network construction ---------------------------------------------------

class ConfigMismatch(TncutError):
    """Open/fixed qubit sets do not partition the layout."""


# --- order finding -----------------------------------------------------------

class TreeNetworkMismatch(TncutError):
    """Contraction tree does not cover the network's nodes."""


class InfeasibleCut(TncutError):
    """No head/tail cut satisfying the cut-size cap was found."""

    def __init__(self, message: str, best_cut_size: int | None = None):
        super().__init__(message)
        self.best_cut_size = best_cut_size


class BudgetExhausted(TncutError):
    """Partition retries ran out before all complexity caps were met."""

    def __init__(self, stage: str, best_tree=None, violation: str = ""):
        super().__init__(f"search budget exhausted at {stage}: {violation}")
        self.stage = stage
        self.best_tree = best_tree
        self.violation = violation


# --- slicing ------------------------------------------------------------------

class CannotReachCap(TncutError):
    """Slicing every contracted index still misses the space target."""


# --- engine ---------------------------------------------------------------------

class ShapeMismatch(TncutError):
    """Internal tensor-shape inconsistency; indicates a bug, not bad input."""


class RangeOutOfBounds(TncutError):
    pass


class RangeGap(TncutError):
    pass


class RangeOverlap(TncutError):
    pass


class ProvenanceMismatch(TncutError):
    """Inputs were produced from different circuits, orders or modes."""


# --- reference simulator -----------------------------------------------------

class TooManyQubits(TncutError):
    pass


class LengthMismatch(TncutError):
    pass


# --- analytics ------------------------------------------------------------------

class EmptyInput(TncutError):
    pass


class NotSorted(TncutError):
    pass


class IncompleteEnumeration(TncutError):
    pass


class ZeroMarginal(TncutError):
    pass
