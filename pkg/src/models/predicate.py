"""
Ultimately periodic subsets of the natural numbers
"""
from dataclasses import dataclass

from ..core.exceptions import LiteralFormatError
from .automata import Lasso, canonical_word


@dataclass(frozen=True)
class UPPredicate:
    """The set whose characteristic word is prefix . period^omega"""
    prefix: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise LiteralFormatError("period must be nonempty")
        if any(b not in "01" for b in self.prefix + self.period):
            raise LiteralFormatError(f"not a bit word: '{self.prefix};{self.period}'")

    @classmethod
    def from_literal(cls, literal: str) -> "UPPredicate":
        """Parse 'u;v'; an empty prefix may be written as nothing or as 'ε'."""
        text = literal.strip()
        if text.count(";") != 1:
            raise LiteralFormatError(f"expected 'prefix;period', got '{literal}'")
        prefix, period = (part.strip() for part in text.split(";"))
        if prefix == "ε":
            prefix = ""
        if not period:
            raise LiteralFormatError(f"empty period in '{literal}'")
        if any(b not in "01" for b in prefix + period):
            raise LiteralFormatError(f"not a bit word: '{literal}'")
        return cls(prefix, period)

    @classmethod
    def from_lasso(cls, lasso: Lasso) -> "UPPredicate":
        if lasso.width != 1:
            raise LiteralFormatError(f"expected a width-1 lasso, got width {lasso.width}")
        return cls("".join(map(str, lasso.prefix)), "".join(map(str, lasso.cycle)))

    @property
    def literal(self) -> str:
        return f"{self.prefix};{self.period}"

    @property
    def length(self) -> int:
        """Number of phases |u| + |v|"""
        return len(self.prefix) + len(self.period)

    def bit_at(self, n: int) -> int:
        if n < 0:
            raise ValueError("position must be non-negative")
        if n < len(self.prefix):
            return int(self.prefix[n])
        return int(self.period[(n - len(self.prefix)) % len(self.period)])

    def next_phase(self, i: int) -> int:
        """Successor of phase i in [0, |u|+|v|)"""
        return i + 1 if i + 1 < self.length else len(self.prefix)

    def to_lasso(self) -> Lasso:
        return Lasso(tuple(int(b) for b in self.prefix), tuple(int(b) for b in self.period), 1)

    def canonical(self) -> "UPPredicate":
        prefix, period = canonical_word(self.prefix, self.period)
        return UPPredicate("".join(prefix), "".join(period))

    @property
    def is_canonical(self) -> bool:
        return self.canonical() == self

    def __str__(self) -> str:
        return self.literal


EMPTY_PREDICATE = UPPredicate("", "0")
