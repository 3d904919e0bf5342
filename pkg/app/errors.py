# app/errors.py
"""Exception hierarchy shared by every layer of the workbench.

Library code raises these; only the command layer (app/cli.py) catches them
and turns them into exit codes.
"""


class WorkbenchError(ValueError):
    """Base class for all user-facing input errors."""


class ParseError(WorkbenchError):
    """Concrete syntax could not be read (formula text or JSON document)."""

    def __init__(self, message: str, line: int, column: int,
                 expected: frozenset[str] = frozenset(), origin: str = "<inline>"):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.origin = origin
        detail = f"{origin}:{line}:{column}: {message}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class SchemaError(WorkbenchError):
    """A JSON document is missing a field or carries an ill-typed one."""


class InvariantError(WorkbenchError):
    """A decoded value violates the invariants of its type."""


class UnknownState(InvariantError):
    """A relation or valuation references a state outside the model."""


class UnknownTile(InvariantError):
    """A tiling or tile set references an undeclared tile."""


class InvalidTM(InvariantError):
    """A Turing machine description is not well formed."""


class InvalidTiling(InvariantError):
    """A tiling does not satisfy the adjacency relations of its tile set."""


class NonEliminableStar(WorkbenchError):
    """A Star node sits somewhere the while-do rewrite cannot reach."""

    def __init__(self, subterm, rendered: str | None = None):
        self.subterm = subterm
        super().__init__(f"star cannot be eliminated in subterm: {rendered or repr(subterm)}")


class BudgetExceeded(RuntimeError):
    """A search hit its configured node budget before completing."""

    def __init__(self, explored: int, bound: str):
        self.explored = explored
        self.bound = bound
        super().__init__(f"search budget exhausted after {explored} nodes (reached {bound})")

    def __reduce__(self):
        return type(self), (self.explored, self.bound)


class DecodeError(RuntimeError):
    """A compiled tiling row does not carry exactly one head marker."""
