"""
Custom exceptions for the Church synthesis toolkit
"""
from typing import Optional


class ChurchSynthesisException(Exception):
    """Base exception for the toolkit"""
    pass


class FormulaSyntaxError(ChurchSynthesisException):
    """Specification text does not follow the grammar"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnboundVariableError(ChurchSynthesisException):
    """A variable is used without a binder, role or parameter"""

    def __init__(self, name: str, line: Optional[int] = None, column: Optional[int] = None):
        self.name = name
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"unbound variable '{name}'{where}")


class RoleConflictError(ChurchSynthesisException):
    """A name is used both as a first-order and a second-order variable, or has two roles"""
    pass


class WidthMismatchError(ChurchSynthesisException):
    """Alphabet widths of automata or lassos disagree"""
    pass


class TrackOutOfRangeError(ChurchSynthesisException):
    """A track index outside the alphabet width"""
    pass


class CapacityError(ChurchSynthesisException):
    """A construction exceeded the configured state cap or track limit"""
    pass


class UnboundParameterError(ChurchSynthesisException):
    """A parameter of a sentence has no ultimately periodic binding"""
    pass


class InconsistencyError(ChurchSynthesisException):
    """A machine contradicts the formula it is claimed to satisfy"""
    pass


class NotWonError(ChurchSynthesisException):
    """The initial vertex is not won by the requested player"""
    pass


class SolverLimitError(ChurchSynthesisException):
    """Game too large for the brute-force oracle"""
    pass


class SpecFileError(ChurchSynthesisException):
    """Malformed specification file"""
    pass


class MachineFormatError(ChurchSynthesisException):
    """Malformed machine table or automaton text"""
    pass


class LiteralFormatError(ChurchSynthesisException):
    """Malformed 'prefix;period' literal"""
    pass
