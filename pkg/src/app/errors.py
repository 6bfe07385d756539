"""
Error hierarchy shared by the library and the command layer.

Every error carries an ``error_code`` that ends up in the ``meta`` block of a
command response and decides the process exit code.
"""

from typing import Optional


class AlgebraError(ValueError):
    """Base class for all domain errors raised by excomp."""

    error_code = "ALGEBRA_ERROR"
    exit_code = 2

    def __init__(self, message: str, error_code: Optional[str] = None) -> None:
        super().__init__(message)
        if error_code:
            self.error_code = error_code

    def to_meta(self) -> dict:
        return {"error_code": self.error_code}


class LatticeTooLargeError(AlgebraError):
    error_code = "LATTICE_TOO_LARGE"


class ElementCapError(AlgebraError):
    error_code = "ELEMENT_CAP"


class InvalidActionError(AlgebraError):
    error_code = "INVALID_ACTION"


class NotNormalError(AlgebraError):
    error_code = "NOT_NORMAL"


class ParameterMismatchError(AlgebraError):
    error_code = "PARAMETER_MISMATCH"


class BoundaryPointError(AlgebraError):
    error_code = "BOUNDARY_POINT"


class UnknownOracleTagError(AlgebraError):
    error_code = "UNKNOWN_TAG"


class GroupSpecSyntaxError(AlgebraError):
    """Syntax error in a group-spec string, annotated with the offending position."""

    error_code = "SYNTAX_ERROR"

    def __init__(self, message: str, position: int, text: str = "") -> None:
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")

    def to_meta(self) -> dict:
        return {"error_code": self.error_code, "position": self.position}


class UndecidedError(AlgebraError):
    """A search ran out of budget; the answer is unknown rather than negative."""

    error_code = "UNDECIDED"
    exit_code = 3
