"""
Parity game solving with memoryless strategies.

solve() runs the recursive attractor decomposition (Zielonka) under the
min-color convention: Player II wins a play iff its minimal recurring
color is even. brute_force_solve() enumerates memoryless strategies and
serves as a testing oracle for small games.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from ..core.config import settings
from ..core.exceptions import ChurchSynthesisException, SolverLimitError
from ..core.graph import cycles_have_parity, is_nontrivial, reachable, strongly_connected_components
from ..models.game import ParityGame, Player, Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Attractor:
    """Attractor region with the attracting player's edge choices outside the target"""
    region: FrozenSet[int]
    strategy: Dict[int, int] = field(default_factory=dict, hash=False)


class SolverService:
    """Service for parity game solving"""

    def attractor(
        self,
        g: ParityGame,
        target: Iterable[int],
        player: Player,
        within: Optional[FrozenSet[int]] = None,
        predecessors: Optional[List[List[int]]] = None,
    ) -> Attractor:
        """Least superset of target from which `player` forces a visit to target inside `within`"""
        within = frozenset(g.vertices) if within is None else within
        predecessors = predecessors if predecessors is not None else g.predecessors()
        region: Set[int] = {v for v in target if v in within}
        strategy: Dict[int, int] = {}
        remaining = {
            v: len({w for w in g.edges[v] if w in within})
            for v in within
            if g.owners[v] is not player
        }
        queue = deque(sorted(region))
        while queue:
            w = queue.popleft()
            for v in sorted(predecessors[w]):
                if v not in within or v in region:
                    continue
                if g.owners[v] is player:
                    strategy[v] = min(b for b in (0, 1) if g.step(v, b) in region)
                    region.add(v)
                    queue.append(v)
                else:
                    remaining[v] -= 1
                    if remaining[v] == 0:
                        region.add(v)
                        queue.append(v)
        return Attractor(frozenset(region), strategy)

    def solve(self, g: ParityGame) -> Solution:
        predecessors = g.predecessors()
        regions, strategy = self._zielonka(g, frozenset(g.vertices), predecessors)
        winner = tuple(Player.II if v in regions[Player.II] else Player.I for v in g.vertices)
        solution = self._solution(g, winner, strategy)
        logger.debug(
            f"Solved game with {g.num_vertices} vertices: "
            f"|W_I|={len(regions[Player.I])}, |W_II|={len(regions[Player.II])}"
        )
        return solution

    def _zielonka(
        self, g: ParityGame, vertices: FrozenSet[int], predecessors: List[List[int]]
    ) -> Tuple[Dict[Player, FrozenSet[int]], Dict[int, int]]:
        if not vertices:
            return {Player.I: frozenset(), Player.II: frozenset()}, {}

        c = min(g.colors[v] for v in vertices)
        player = Player.II if c % 2 == 0 else Player.I
        opponent = player.opponent
        top = frozenset(v for v in vertices if g.colors[v] == c)

        attr = self.attractor(g, top, player, vertices, predecessors)
        sub_regions, sub_strategy = self._zielonka(g, vertices - attr.region, predecessors)

        if not sub_regions[opponent]:
            strategy = dict(sub_strategy)
            strategy.update(attr.strategy)
            for v in sorted(top):
                if g.owners[v] is player:
                    strategy[v] = min(b for b in (0, 1) if g.step(v, b) in vertices)
            return {player: vertices, opponent: frozenset()}, strategy

        back = self.attractor(g, sub_regions[opponent], opponent, vertices, predecessors)
        rest_regions, rest_strategy = self._zielonka(g, vertices - back.region, predecessors)

        strategy = {
            v: label
            for v, label in sub_strategy.items()
            if v in sub_regions[opponent] and g.owners[v] is opponent
        }
        strategy.update(back.strategy)
        strategy.update(rest_strategy)
        regions = {
            opponent: rest_regions[opponent] | back.region,
            player: rest_regions[player],
        }
        return regions, strategy

    def _solution(self, g: ParityGame, winner: Tuple[Player, ...], strategy: Dict[int, int]) -> Solution:
        strategy_I = {
            v: strategy[v] for v in g.vertices if winner[v] is Player.I and g.owners[v] is Player.I
        }
        strategy_II = {
            v: strategy[v] for v in g.vertices if winner[v] is Player.II and g.owners[v] is Player.II
        }
        return Solution(winner, strategy_I, strategy_II)

    def brute_force_solve(self, g: ParityGame) -> Solution:
        """Enumerate memoryless strategies; only for games up to BRUTE_FORCE_LIMIT vertices"""
        if g.num_vertices > settings.BRUTE_FORCE_LIMIT:
            raise SolverLimitError(
                f"brute force is limited to {settings.BRUTE_FORCE_LIMIT} vertices, "
                f"game has {g.num_vertices}"
            )
        regions: Dict[Player, Set[int]] = {}
        choices: Dict[Player, List[Tuple[Dict[int, int], Set[int]]]] = {}
        for player in (Player.I, Player.II):
            own = sorted(g.owned_by(player))
            regions[player] = set()
            choices[player] = []
            for bits in itertools.product((0, 1), repeat=len(own)):
                choice = dict(zip(own, bits))
                won = self._winning_set(g, choice, player)
                regions[player] |= won
                choices[player].append((choice, won))

        if regions[Player.I] & regions[Player.II] or len(regions[Player.I] | regions[Player.II]) != g.num_vertices:
            raise ChurchSynthesisException("memoryless strategies do not determine this game")

        winner = tuple(Player.II if v in regions[Player.II] else Player.I for v in g.vertices)
        strategy: Dict[int, int] = {}
        for player in (Player.I, Player.II):
            uniform = next((c for c, won in choices[player] if won >= regions[player]), None)
            if uniform is None:
                raise ChurchSynthesisException(f"no uniform memoryless strategy for Player {player.value}")
            strategy.update(uniform)
        return self._solution(g, winner, strategy)

    def _winning_set(self, g: ParityGame, choice: Dict[int, int], player: Player) -> Set[int]:
        """Vertices from which `choice` wins for `player` against every opponent behaviour"""

        def successors(v):
            if v in choice:
                return (g.step(v, choice[v]),)
            return tuple(sorted(set(g.edges[v])))

        bad_parity = 1 - player.parity
        bad: Set[int] = set()
        for c in sorted(set(g.colors)):
            if c % 2 != bad_parity:
                continue
            band = {v for v in g.vertices if g.colors[v] >= c}

            def band_successors(v, band=band):
                return [w for w in successors(v) if w in band]

            for component in strongly_connected_components(sorted(band), band_successors):
                if any(g.colors[v] == c for v in component) and is_nontrivial(component, band_successors):
                    bad.update(component)

        backwards: Dict[int, List[int]] = {v: [] for v in g.vertices}
        for v in g.vertices:
            for w in successors(v):
                backwards[w].append(v)
        losing = set(reachable(sorted(bad), lambda v: backwards[v]))
        return set(g.vertices) - losing

    def verify_solution(self, g: ParityGame, s: Solution) -> bool:
        """Each winner, following their strategy, stays in their region and wins every cycle there."""
        if len(s.winner) != g.num_vertices:
            return False
        for player in (Player.I, Player.II):
            region = s.region(player)
            strategy = s.strategy(player)
            if set(strategy) != {v for v in region if g.owners[v] is player}:
                return False
            if any(label not in (0, 1) for label in strategy.values()):
                return False

            def successors(v, strategy=strategy, player=player):
                if g.owners[v] is player:
                    return (g.step(v, strategy[v]),)
                return tuple(sorted(set(g.edges[v])))

            if any(w not in region for v in region for w in successors(v)):
                return False
            if not cycles_have_parity(sorted(region), successors, lambda v: g.colors[v], player is Player.II):
                return False
        return True


# Global solver service instance
solver_service = SolverService()
