"""Exception hierarchy.

Validation failures carry a ``witness`` tuple naming the offending elements so
reports can point at the exact cell that breaks an axiom.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class ValidationError(WorkbenchError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = tuple(witness)


# lattices
class NotAPartialOrder(ValidationError):
    pass


class MissingJoin(ValidationError):
    pass


class NoBottom(ValidationError):
    pass


class JoinTableMismatch(ValidationError):
    pass


# quantales
class NotAssociative(ValidationError):
    pass


class NotUnital(ValidationError):
    pass


class NotJoinDistributive(ValidationError):
    pass


class MonoidInvalid(ValidationError):
    pass


# modules
class NotAssociativeAction(ValidationError):
    pass


class NotUnitalAction(ValidationError):
    pass


class NotJoinDistributiveAction(ValidationError):
    pass


class NotCompatible(ValidationError):
    """Left and right actions of a bimodule do not commute."""


class NotAHom(ValidationError):
    pass


class SizeCapExceeded(WorkbenchError):
    pass


class ParseError(WorkbenchError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnknownName(WorkbenchError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown name"


class NotFree(WorkbenchError):
    pass


class NotProgenerator(WorkbenchError):
    pass
