"""
Omega-automata over bit-tuple alphabets.

A letter of width k is an int in [0, 2^k); bit i of the letter is the
value of track i. States are the ints 0..num_states-1.
"""
import random
from dataclasses import dataclass
from math import gcd
from typing import FrozenSet, Iterable, List, Sequence, Tuple, TypeVar

from ..core.exceptions import TrackOutOfRangeError, WidthMismatchError

T = TypeVar("T")


@dataclass(frozen=True)
class BitAlphabet:
    """Alphabet {0,1}^width"""
    width: int

    def __post_init__(self):
        if self.width < 0:
            raise WidthMismatchError(f"alphabet width must be non-negative, got {self.width}")

    @property
    def size(self) -> int:
        return 1 << self.width

    def letters(self) -> range:
        return range(self.size)

    def bit(self, letter: int, track: int) -> int:
        if not 0 <= track < self.width:
            raise TrackOutOfRangeError(f"track {track} outside width {self.width}")
        return (letter >> track) & 1

    def to_bits(self, letter: int) -> str:
        """Track 0 first"""
        return "".join(str((letter >> i) & 1) for i in range(self.width))

    def from_bits(self, bits: str) -> int:
        if len(bits) != self.width or any(b not in "01" for b in bits):
            raise WidthMismatchError(f"'{bits}' is not a letter of width {self.width}")
        return sum(1 << i for i, b in enumerate(bits) if b == "1")


@dataclass(frozen=True)
class NBA:
    """Nondeterministic Buchi automaton; transitions[state][letter] is a set of states"""
    width: int
    num_states: int
    initial: int
    transitions: Tuple[Tuple[FrozenSet[int], ...], ...]
    accepting: FrozenSet[int]

    def __post_init__(self):
        size = 1 << self.width
        if len(self.transitions) != self.num_states:
            raise ValueError("transition table does not cover every state")
        if any(len(row) != size for row in self.transitions):
            raise ValueError("transition table does not cover every letter")
        if not 0 <= self.initial < self.num_states:
            raise ValueError("initial state out of range")
        if any(not 0 <= q < self.num_states for q in self.accepting):
            raise ValueError("accepting state out of range")

    @property
    def alphabet(self) -> BitAlphabet:
        return BitAlphabet(self.width)

    def successors(self, state: int, letter: int) -> FrozenSet[int]:
        return self.transitions[state][letter]

    def post(self, states: Iterable[int], letter: int) -> FrozenSet[int]:
        result = set()
        for q in states:
            result.update(self.transitions[q][letter])
        return frozenset(result)


@dataclass(frozen=True)
class DPA:
    """
    Deterministic parity automaton with state colors.

    A run is accepting iff the minimal color of the states visited
    infinitely often is even.
    """
    width: int
    num_states: int
    initial: int
    transitions: Tuple[Tuple[int, ...], ...]
    colors: Tuple[int, ...]

    def __post_init__(self):
        size = 1 << self.width
        if len(self.transitions) != self.num_states or len(self.colors) != self.num_states:
            raise ValueError("transition or color table does not cover every state")
        for row in self.transitions:
            if len(row) != size:
                raise ValueError("transition table does not cover every letter")
            if any(not 0 <= q < self.num_states for q in row):
                raise ValueError("transition target out of range")
        if not 0 <= self.initial < self.num_states:
            raise ValueError("initial state out of range")
        if any(c < 0 for c in self.colors):
            raise ValueError("colors must be non-negative")

    @property
    def alphabet(self) -> BitAlphabet:
        return BitAlphabet(self.width)

    @property
    def max_color(self) -> int:
        return max(self.colors)

    def step(self, state: int, letter: int) -> int:
        return self.transitions[state][letter]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def canonical_word(prefix: Sequence[T], cycle: Sequence[T]) -> Tuple[Tuple[T, ...], Tuple[T, ...]]:
    """Minimal cycle by divisor scan, then minimal prefix by trimming from the right."""
    prefix = list(prefix)
    cycle = list(cycle)
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        prefix.pop()
        cycle = [cycle[-1]] + cycle[:-1]
    return tuple(prefix), tuple(cycle)


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word prefix . cycle^omega"""
    prefix: Tuple[int, ...]
    cycle: Tuple[int, ...]
    width: int = 1

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValueError("lasso cycle must be nonempty")
        size = 1 << self.width
        if any(not 0 <= a < size for a in self.prefix + self.cycle):
            raise WidthMismatchError(f"lasso letter outside alphabet of width {self.width}")

    def letter_at(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def letters(self, count: int) -> List[int]:
        return [self.letter_at(n) for n in range(count)]

    def canonical(self) -> "Lasso":
        prefix, cycle = canonical_word(self.prefix, self.cycle)
        return Lasso(prefix, cycle, self.width)

    def unrolled(self, times: int = 1) -> "Lasso":
        """Same word with `times` copies of the cycle moved into the prefix"""
        return Lasso(self.prefix + self.cycle * times, self.cycle, self.width)

    def rotated(self) -> "Lasso":
        """Same word with one letter of the cycle moved into the prefix"""
        return Lasso(self.prefix + self.cycle[:1], self.cycle[1:] + self.cycle[:1], self.width)

    def flipped(self, n: int, index: int = 0) -> "Lasso":
        """Same word with track `index` negated at position n only"""
        if not 0 <= index < self.width:
            raise TrackOutOfRangeError(f"track {index} outside width {self.width}")
        w = self
        if n >= len(self.prefix):
            w = self.unrolled((n - len(self.prefix)) // len(self.cycle) + 1)
        prefix = w.prefix[:n] + (w.prefix[n] ^ (1 << index),) + w.prefix[n + 1 :]
        return Lasso(prefix, w.cycle, self.width)

    def track(self, index: int) -> "Lasso":
        if not 0 <= index < self.width:
            raise TrackOutOfRangeError(f"track {index} outside width {self.width}")
        bit = lambda a: (a >> index) & 1
        return Lasso(tuple(map(bit, self.prefix)), tuple(map(bit, self.cycle)), 1)

    @classmethod
    def zip(cls, lassos: Sequence["Lasso"]) -> "Lasso":
        """Stack lassos as consecutive track groups, first lasso on the lowest tracks."""
        if not lassos:
            return cls((), (0,), 0)
        prefix_len = max(len(w.prefix) for w in lassos)
        period = 1
        for w in lassos:
            period = _lcm(period, len(w.cycle))
        offsets = []
        width = 0
        for w in lassos:
            offsets.append(width)
            width += w.width

        def letter(n: int) -> int:
            return sum(w.letter_at(n) << off for w, off in zip(lassos, offsets))

        prefix = tuple(letter(n) for n in range(prefix_len))
        cycle = tuple(letter(n) for n in range(prefix_len, prefix_len + period))
        return cls(prefix, cycle, width)

    @classmethod
    def sample(cls, rng: random.Random, width: int, max_prefix: int = 3, max_cycle: int = 3) -> "Lasso":
        size = 1 << width
        prefix = tuple(rng.randrange(size) for _ in range(rng.randint(0, max_prefix)))
        cycle = tuple(rng.randrange(size) for _ in range(rng.randint(1, max_cycle)))
        return cls(prefix, cycle, width)

    def __str__(self) -> str:
        if self.width == 1:
            return "".join(map(str, self.prefix)) + ";" + "".join(map(str, self.cycle))
        alphabet = BitAlphabet(self.width)
        render = lambda word: " ".join(alphabet.to_bits(a) for a in word)
        return f"{render(self.prefix)} ; {render(self.cycle)}"
