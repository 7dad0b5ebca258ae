"""
Parity games with two labeled edges per vertex
"""
import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, List, Tuple


class InvalidGame(Exception):
    """Thrown when a game violates the arena shape"""


class Player(str, enum.Enum):
    """Player I picks the input bits, Player II the output bits and wins on even colors"""
    I = "I"
    II = "II"

    @property
    def opponent(self) -> "Player":
        return Player.II if self is Player.I else Player.I

    @property
    def parity(self) -> int:
        """Parity of the minimal recurring color that wins for this player"""
        return 0 if self is Player.II else 1


@dataclass(frozen=True)
class ParityGame:
    """
    Vertices are 0..n-1. edges[v][b] is the target of the edge labeled b.
    A play is won by Player II iff its minimal recurring color is even.
    """
    owners: Tuple[Player, ...]
    colors: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    initial: int = 0
    names: Tuple[Hashable, ...] = ()

    def __post_init__(self):
        n = len(self.owners)
        if len(self.colors) != n or len(self.edges) != n:
            raise InvalidGame("owners, colors and edges must cover the same vertices")
        if self.names and len(self.names) != n:
            raise InvalidGame("vertex names must cover every vertex")
        for v, pair in enumerate(self.edges):
            if len(pair) != 2:
                raise InvalidGame(f"vertex {v} must have exactly two labeled edges")
            if any(not 0 <= w < n for w in pair):
                raise InvalidGame(f"edge from vertex {v} leaves the game")
        if n and not 0 <= self.initial < n:
            raise InvalidGame("initial vertex out of range")

    @property
    def num_vertices(self) -> int:
        return len(self.owners)

    @property
    def vertices(self) -> range:
        return range(len(self.owners))

    def successors(self, v: int) -> Tuple[int, int]:
        return self.edges[v]

    def step(self, v: int, label: int) -> int:
        return self.edges[v][label]

    def owned_by(self, player: Player) -> FrozenSet[int]:
        return frozenset(v for v in self.vertices if self.owners[v] is player)

    def predecessors(self) -> List[List[int]]:
        result: List[List[int]] = [[] for _ in self.vertices]
        for v in self.vertices:
            for w in set(self.edges[v]):
                result[w].append(v)
        return result

    @property
    def is_bipartite(self) -> bool:
        return all(
            self.owners[w] is not self.owners[v] for v in self.vertices for w in self.edges[v]
        )

    def name(self, v: int) -> Hashable:
        return self.names[v] if self.names else v


@dataclass(frozen=True)
class Solution:
    """Winner per vertex and memoryless strategies on each winner's own vertices"""
    winner: Tuple[Player, ...]
    strategy_I: Dict[int, int] = field(default_factory=dict, hash=False)
    strategy_II: Dict[int, int] = field(default_factory=dict, hash=False)

    def region(self, player: Player) -> FrozenSet[int]:
        return frozenset(v for v, p in enumerate(self.winner) if p is player)

    def strategy(self, player: Player) -> Dict[int, int]:
        return self.strategy_I if player is Player.I else self.strategy_II
