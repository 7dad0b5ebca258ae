"""
Finite quotient of the parameterized game arena.

For a DPA over (X, Y, P) tracks and an ultimately periodic P, a position
n of the infinite arena only matters through its phase, so vertices pair
an automaton state with a phase in [0, |u|+|v|). Player I moves from
(q, i) to (q, a, i) by choosing the X bit a; Player II moves from
(q, a, i) by choosing the Y bit b to (delta(q, (a, b, P(i))), next(i)).
"""
import logging
from typing import Callable, Dict, Hashable, List, Tuple

from ..core.exceptions import WidthMismatchError
from ..models.automata import DPA
from ..models.game import ParityGame, Player
from ..models.predicate import UPPredicate

logger = logging.getLogger(__name__)

X_TRACK, Y_TRACK, P_TRACK = 0, 1, 2


def spec_letter(x: int, y: int, c: int) -> int:
    """Letter of the (X, Y, P) alphabet"""
    return x << X_TRACK | y << Y_TRACK | c << P_TRACK


def phase_of(p: UPPredicate, n: int) -> int:
    if n < p.length:
        return n
    return len(p.prefix) + (n - len(p.prefix)) % len(p.period)


class ArenaService:
    """Service building quotient arenas"""

    def build_arena(self, a: DPA, p: UPPredicate) -> ParityGame:
        if a.width != 3:
            raise WidthMismatchError(f"arena needs a DPA over (X, Y, P) tracks, got width {a.width}")
        index: Dict[Hashable, int] = {}
        order: List[Hashable] = []

        def visit(name: Hashable) -> int:
            if name not in index:
                index[name] = len(order)
                order.append(name)
            return index[name]

        visit(("I", a.initial, 0))
        edges: List[Tuple[int, int]] = []
        i = 0
        while i < len(order):
            name = order[i]
            if name[0] == "I":
                _, q, phase = name
                edges.append(tuple(visit(("II", q, bit, phase)) for bit in (0, 1)))
            else:
                _, q, x, phase = name
                c = p.bit_at(phase)
                nxt = p.next_phase(phase)
                edges.append(
                    tuple(visit(("I", a.step(q, spec_letter(x, y, c)), nxt)) for y in (0, 1))
                )
            i += 1

        owners = tuple(Player.I if name[0] == "I" else Player.II for name in order)
        colors = tuple(a.colors[name[1]] for name in order)
        game = ParityGame(owners, colors, tuple(edges), 0, tuple(order))
        logger.debug(
            f"Built arena with {len(game.owned_by(Player.I))} Player I and "
            f"{len(game.owned_by(Player.II))} Player II vertices for P={p.literal}"
        )
        return game

    def quotient_play(
        self,
        game: ParityGame,
        choose_x: Callable[[Hashable], int],
        choose_y: Callable[[Hashable], int],
        steps: int,
    ) -> List[int]:
        """Colors of the Player I vertices along a play of the quotient arena"""
        colors = []
        v = game.initial
        for _ in range(steps):
            colors.append(game.colors[v])
            w = game.step(v, choose_x(game.name(v)))
            v = game.step(w, choose_y(game.name(w)))
        return colors

    def infinite_arena_play(
        self,
        a: DPA,
        p: UPPredicate,
        choose_x: Callable[[int, int], int],
        choose_y: Callable[[int, int, int], int],
        steps: int,
    ) -> List[int]:
        """
        Colors along a play of the unquotiented arena, whose Player I
        vertices are (q, n) for every position n.
        """
        colors = []
        q = a.initial
        for n in range(steps):
            colors.append(a.colors[q])
            x = choose_x(q, n)
            y = choose_y(q, x, n)
            q = a.step(q, spec_letter(x, y, p.bit_at(n)))
        return colors


# Global arena service instance
arena_service = ArenaService()
