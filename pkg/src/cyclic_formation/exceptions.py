"""
Exception hierarchy for cyclic-formation.

Library code raises these; only the command-line front end turns them into
exit codes.
"""

from __future__ import annotations

from collections.abc import Sequence


class FormationError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(FormationError, ValueError):
    """A numeric parameter is outside its admissible range."""


class StructuralError(FormationError):
    """A constraint set or development is malformed (rank loss, no spanning tree)."""


class DomainError(FormationError, ValueError):
    """A function was evaluated outside its domain."""


class CollisionError(DomainError):
    """
    Two or more robots came within their bounding radius.

    Attributes:
        pairs: Offending (i, j) robot index pairs, i < j
        min_distance: Smallest pairwise distance observed
    """

    def __init__(self, pairs: Sequence[tuple[int, int]], min_distance: float) -> None:
        self.pairs = [tuple(p) for p in pairs]
        self.min_distance = float(min_distance)
        shown = ", ".join(f"({i}, {j})" for i, j in self.pairs[:5])
        super().__init__(
            f"collision between robots {shown} (min distance {self.min_distance:.4g})"
        )


class ConsistencyError(FormationError):
    """An internal cross-check failed."""


class DivergenceError(FormationError):
    """The integrated state became non-finite."""


class ScenarioError(FormationError):
    """
    A scenario document failed to parse or validate.

    Attributes:
        path: Source file, if known
        line: 1-based line number, if known
        column: 1-based column number, if known
    """

    def __init__(
        self,
        message: str,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        super().__init__(self.format())

    def format(self) -> str:
        """Return the diagnostic as ``path:line:col: message``."""
        location = [str(part) for part in (self.path, self.line, self.column) if part]
        if location:
            return f"{':'.join(location)}: {self.message}"
        return self.message
