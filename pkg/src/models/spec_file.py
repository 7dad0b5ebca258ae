"""
Specification file records
"""
import re
from typing import Dict, List, Optional

from pydantic import BaseModel, validator

from ..core.exceptions import LiteralFormatError
from .predicate import UPPredicate

IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z_0-9']*$")


class SourceText(BaseModel):
    """A piece of formula text with the position of its first character"""
    text: str
    line: int = 1
    column: int = 1


class MacroDefinition(BaseModel):
    name: str
    body: SourceText

    @validator("name")
    def validate_name(cls, v):
        if not IDENTIFIER.match(v):
            raise ValueError(f"'{v}' is not an identifier")
        return v


class SpecFile(BaseModel):
    """
    One synthesis problem: the formula, the input and output roles, UP
    parameter bindings and per-run options.
    """
    formula: SourceText
    input: str
    output: str
    params: Dict[str, str] = {}
    macros: List[MacroDefinition] = []
    state_cap: Optional[int] = None
    seed: Optional[int] = None

    @validator("input", "output")
    def validate_role(cls, v):
        if not IDENTIFIER.match(v):
            raise ValueError(f"'{v}' is not an identifier")
        return v

    @validator("output")
    def validate_distinct(cls, v, values):
        if values.get("input") == v:
            raise ValueError(f"'{v}' cannot be both input and output")
        return v

    @validator("params")
    def validate_params(cls, v, values):
        for name, literal in v.items():
            if not IDENTIFIER.match(name):
                raise ValueError(f"'{name}' is not an identifier")
            if name in (values.get("input"), values.get("output")):
                raise ValueError(f"'{name}' cannot be both a role and a parameter")
            try:
                UPPredicate.from_literal(literal)
            except LiteralFormatError as e:
                raise ValueError(str(e))
        return v

    @validator("state_cap")
    def validate_state_cap(cls, v):
        if v is not None and v < 1:
            raise ValueError("state_cap must be positive")
        return v

    def predicates(self) -> Dict[str, UPPredicate]:
        return {name: UPPredicate.from_literal(literal) for name, literal in self.params.items()}
