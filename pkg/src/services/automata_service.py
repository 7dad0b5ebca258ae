"""
Constructions on Buchi and parity automata: products, projection,
complementation, lasso membership, emptiness, trimming and minimization.
"""
import logging
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

from ..core.config import settings
from ..core.exceptions import CapacityError, TrackOutOfRangeError, WidthMismatchError
from ..core.graph import (
    is_nontrivial,
    reachable,
    shortest_labeled_path,
    strongly_connected_components,
)
from ..models.automata import DPA, NBA, Lasso

logger = logging.getLogger(__name__)


def insert_bit(letter: int, track: int, bit: int) -> int:
    """Widen `letter` by a new track at index `track`."""
    low = letter & ((1 << track) - 1)
    return ((letter >> track) << (track + 1)) | (bit << track) | low


def remap_letter(letter: int, positions: Sequence[int]) -> int:
    """Old letter whose track j is read from track positions[j] of `letter`."""
    result = 0
    for j, pos in enumerate(positions):
        result |= ((letter >> pos) & 1) << j
    return result


class AutomataService:
    """Service for omega-automata constructions"""

    @property
    def state_cap(self) -> int:
        return settings.STATE_CAP

    # Basic automata

    def universal_dpa(self, width: int) -> DPA:
        return DPA(width, 1, 0, ((0,) * (1 << width),), (0,))

    def empty_dpa(self, width: int) -> DPA:
        return DPA(width, 1, 0, ((0,) * (1 << width),), (1,))

    def empty_nba(self, width: int) -> NBA:
        return NBA(width, 1, 0, ((frozenset(),) * (1 << width),), frozenset())

    def dpa_from_table(
        self,
        width: int,
        step: Callable[[Hashable, int], Hashable],
        color: Callable[[Hashable], int],
        initial: Hashable,
    ) -> DPA:
        """Build a DPA by exploring hashable states from `initial`."""
        index: Dict[Hashable, int] = {initial: 0}
        order = [initial]
        rows: List[Tuple[int, ...]] = []
        letters = range(1 << width)
        i = 0
        while i < len(order):
            state = order[i]
            row = []
            for letter in letters:
                target = step(state, letter)
                if target not in index:
                    if len(order) >= self.state_cap:
                        raise CapacityError(f"automaton exceeds state cap {self.state_cap}")
                    index[target] = len(order)
                    order.append(target)
                row.append(index[target])
            rows.append(tuple(row))
            i += 1
        return DPA(width, len(order), 0, tuple(rows), tuple(color(s) for s in order))

    def nba_from_table(
        self,
        width: int,
        step: Callable[[Hashable, int], Sequence[Hashable]],
        accepting: Callable[[Hashable], bool],
        initial: Hashable,
    ) -> NBA:
        index: Dict[Hashable, int] = {initial: 0}
        order = [initial]
        rows: List[Tuple[FrozenSet[int], ...]] = []
        letters = range(1 << width)
        i = 0
        while i < len(order):
            state = order[i]
            row = []
            for letter in letters:
                targets = set()
                for target in step(state, letter):
                    if target not in index:
                        if len(order) >= self.state_cap:
                            raise CapacityError(f"automaton exceeds state cap {self.state_cap}")
                        index[target] = len(order)
                        order.append(target)
                    targets.add(index[target])
                row.append(frozenset(targets))
            rows.append(tuple(row))
            i += 1
        final = frozenset(i for i, s in enumerate(order) if accepting(s))
        return NBA(width, len(order), 0, tuple(rows), final)

    # Lasso membership

    def dpa_accepts_lasso(self, a: DPA, w: Lasso) -> bool:
        if a.width != w.width:
            raise WidthMismatchError(f"automaton width {a.width} but lasso width {w.width}")
        q = a.initial
        for letter in w.prefix:
            q = a.transitions[q][letter]
        first_seen: Dict[int, int] = {}
        iteration_minima: List[int] = []
        while q not in first_seen:
            first_seen[q] = len(iteration_minima)
            low = None
            for letter in w.cycle:
                q = a.transitions[q][letter]
                c = a.colors[q]
                low = c if low is None else min(low, c)
            iteration_minima.append(low)
        return min(iteration_minima[first_seen[q]:]) % 2 == 0

    def nba_accepts_lasso(self, a: NBA, w: Lasso) -> bool:
        """Accepting-cycle search over the product of the lasso and the automaton"""
        if a.width != w.width:
            raise WidthMismatchError(f"automaton width {a.width} but lasso width {w.width}")
        total = len(w.prefix) + len(w.cycle)

        def successors(node):
            pos, q = node
            nxt = pos + 1 if pos + 1 < total else len(w.prefix)
            return [(nxt, r) for r in sorted(a.transitions[q][w.letter_at(pos)])]

        nodes = reachable([(0, a.initial)], successors)
        for component in strongly_connected_components(nodes, successors):
            if any(q in a.accepting for _, q in component) and is_nontrivial(component, successors):
                return True
        return False

    # Buchi constructions

    def nba_intersect(self, a: NBA, b: NBA) -> NBA:
        """Product with a two-phase counter"""
        self._check_widths(a.width, b.width)

        def step(state, letter):
            p, q, phase = state
            if phase == 0:
                nxt = 1 if p in a.accepting else 0
            else:
                nxt = 0 if q in b.accepting else 1
            return [
                (p2, q2, nxt)
                for p2 in sorted(a.transitions[p][letter])
                for q2 in sorted(b.transitions[q][letter])
            ]

        return self.trim_nba(
            self.nba_from_table(
                a.width, step, lambda s: s[2] == 1 and s[1] in b.accepting, (a.initial, b.initial, 0)
            )
        )

    def nba_union(self, a: NBA, b: NBA) -> NBA:
        """Disjoint union with a fresh initial state"""
        self._check_widths(a.width, b.width)
        offset = 1 + a.num_states
        rows = []
        for letter in range(1 << a.width):
            rows.append(
                frozenset(q + 1 for q in a.transitions[a.initial][letter])
                | frozenset(q + offset for q in b.transitions[b.initial][letter])
            )
        table = [tuple(rows)]
        table.extend(tuple(frozenset(q + 1 for q in cell) for cell in row) for row in a.transitions)
        table.extend(tuple(frozenset(q + offset for q in cell) for cell in row) for row in b.transitions)
        accepting = frozenset(q + 1 for q in a.accepting) | frozenset(q + offset for q in b.accepting)
        return self.trim_nba(NBA(a.width, len(table), 0, tuple(table), accepting))

    def nba_project(self, a: NBA, track: int) -> NBA:
        """Existentially quantify track `track` away"""
        if not 0 <= track < a.width:
            raise TrackOutOfRangeError(f"track {track} outside width {a.width}")
        width = a.width - 1
        table = []
        for row in a.transitions:
            table.append(
                tuple(
                    row[insert_bit(letter, track, 0)] | row[insert_bit(letter, track, 1)]
                    for letter in range(1 << width)
                )
            )
        return self.trim_nba(NBA(width, a.num_states, a.initial, tuple(table), a.accepting))

    def nba_is_empty(self, a: NBA) -> bool:
        def successors(q):
            return sorted(set().union(*a.transitions[q])) if a.transitions[q] else []

        nodes = reachable([a.initial], successors)
        for component in strongly_connected_components(nodes, successors):
            if any(q in a.accepting for q in component) and is_nontrivial(component, successors):
                return False
        return True

    def trim_nba(self, a: NBA) -> NBA:
        """Keep only reachable states that can still reach an accepting cycle."""

        def successors(q):
            return sorted(set().union(*a.transitions[q])) if a.transitions[q] else []

        nodes = reachable([a.initial], successors)
        good = set()
        for component in strongly_connected_components(nodes, successors):
            if any(q in a.accepting for q in component) and is_nontrivial(component, successors):
                good.update(component)
        predecessors: Dict[int, List[int]] = {q: [] for q in nodes}
        for q in nodes:
            for r in successors(q):
                predecessors[r].append(q)
        live = set(reachable(sorted(good), lambda q: predecessors[q]))
        if a.initial not in live:
            return self.empty_nba(a.width)

        def live_successors(q):
            return [r for r in successors(q) if r in live]

        order = reachable([a.initial], live_successors)
        index = {q: i for i, q in enumerate(order)}
        table = tuple(
            tuple(frozenset(index[r] for r in cell if r in live) for cell in a.transitions[q])
            for q in order
        )
        accepting = frozenset(index[q] for q in order if q in a.accepting)
        return self.reduce_nba(NBA(a.width, len(order), 0, table, accepting))

    def reduce_nba(self, a: NBA) -> NBA:
        """Quotient by forward bisimulation that respects acceptance"""
        block = [int(q in a.accepting) for q in range(a.num_states)]
        count = len(set(block))
        while True:
            signatures: Dict[Tuple, int] = {}
            refined = []
            for q in range(a.num_states):
                key = (block[q],) + tuple(
                    frozenset(block[r] for r in cell) for cell in a.transitions[q]
                )
                refined.append(signatures.setdefault(key, len(signatures)))
            block = refined
            if len(signatures) == count:
                break
            count = len(signatures)
        if count == a.num_states:
            return a
        representative: Dict[int, int] = {}
        for q in range(a.num_states):
            representative.setdefault(block[q], q)
        table = tuple(
            tuple(frozenset(block[r] for r in cell) for cell in a.transitions[representative[b]])
            for b in range(count)
        )
        accepting = frozenset(block[q] for q in a.accepting)
        return NBA(a.width, count, block[a.initial], table, accepting)

    def reindex_nba(self, a: NBA, width: int, positions: Sequence[int]) -> NBA:
        """Embed into a wider alphabet; old track j sits at new track positions[j]."""
        if len(positions) != a.width:
            raise WidthMismatchError("one position per old track is required")
        letters = [remap_letter(letter, positions) for letter in range(1 << width)]
        table = tuple(tuple(row[old] for old in letters) for row in a.transitions)
        return NBA(width, a.num_states, a.initial, table, a.accepting)

    # Parity constructions

    def dpa_complement(self, a: DPA) -> DPA:
        return DPA(a.width, a.num_states, a.initial, a.transitions, tuple(c + 1 for c in a.colors))

    def dpa_to_nba(self, a: DPA) -> NBA:
        """Guess the least even color seen infinitely often and the point after which no smaller color occurs"""
        even_colors = sorted({c for c in a.colors if c % 2 == 0})

        def step(state, letter):
            q, mode = state
            target = a.transitions[q][letter]
            c = a.colors[target]
            if mode is None:
                return [(target, None)] + [(target, e) for e in even_colors if c >= e]
            return [(target, mode)] if c >= mode else []

        def accepting(state):
            q, mode = state
            return mode is not None and a.colors[q] == mode

        return self.trim_nba(self.nba_from_table(a.width, step, accepting, (a.initial, None)))

    def nonemptiness_witness(self, a: DPA) -> Optional[Lasso]:
        """An accepted lasso, or None when the language is empty"""
        letters = range(1 << a.width)

        def labeled(q):
            return [(letter, a.transitions[q][letter]) for letter in letters]

        def successors(q):
            return sorted(set(a.transitions[q]))

        nodes = reachable([a.initial], successors)
        for c in sorted({a.colors[q] for q in nodes if a.colors[q] % 2 == 0}):
            band = {q for q in nodes if a.colors[q] >= c}

            def band_successors(q, band=band):
                return [r for r in successors(q) if r in band]

            for component in strongly_connected_components([q for q in nodes if q in band], band_successors):
                anchors = sorted(q for q in component if a.colors[q] == c)
                if not anchors or not is_nontrivial(component, band_successors):
                    continue
                anchor = anchors[0]
                prefix = shortest_labeled_path(a.initial, labeled, lambda q: q == anchor)
                cycle = shortest_labeled_path(
                    anchor, labeled, lambda q: q == anchor, allowed=set(component), require_step=True
                )
                return Lasso(tuple(prefix), tuple(cycle), a.width)
        return None

    def is_weak(self, a: DPA) -> bool:
        """Every cycle stays inside one color parity."""

        def successors(q):
            return sorted(set(a.transitions[q]))

        for component in strongly_connected_components(reachable([a.initial], successors), successors):
            if len({a.colors[q] % 2 for q in component}) > 1:
                return False
        return True

    def dpa_product(self, a: DPA, b: DPA, color: Callable[[int, int], int]) -> DPA:
        self._check_widths(a.width, b.width)
        return self.dpa_from_table(
            a.width,
            lambda s, letter: (a.transitions[s[0]][letter], b.transitions[s[1]][letter]),
            lambda s: color(s[0], s[1]),
            (a.initial, b.initial),
        )

    def dpa_intersect_weak(self, a: DPA, weak: DPA) -> DPA:
        """Intersection with a DPA whose cycles have uniform parity"""
        return self.minimize_dpa(
            self.dpa_product(a, weak, lambda p, q: a.colors[p] if weak.colors[q] % 2 == 0 else 1)
        )

    def dpa_union_weak(self, a: DPA, weak: DPA) -> DPA:
        """Union with a DPA whose cycles have uniform parity"""
        return self.minimize_dpa(
            self.dpa_product(a, weak, lambda p, q: 0 if weak.colors[q] % 2 == 0 else a.colors[p])
        )

    def reindex_dpa(self, a: DPA, width: int, positions: Sequence[int]) -> DPA:
        """Embed into a wider alphabet; old track j sits at new track positions[j]."""
        if len(positions) != a.width:
            raise WidthMismatchError("one position per old track is required")
        letters = [remap_letter(letter, positions) for letter in range(1 << width)]
        table = tuple(tuple(row[old] for old in letters) for row in a.transitions)
        return DPA(width, a.num_states, a.initial, table, a.colors)

    def normalize_colors(self, a: DPA) -> DPA:
        """Monotone, parity-preserving compression of the color range"""
        mapping: Dict[int, int] = {}
        current = None
        for c in sorted(set(a.colors)):
            if current is None:
                current = c % 2
            elif c % 2 != current % 2:
                current += 1
            mapping[c] = current
        return DPA(a.width, a.num_states, a.initial, a.transitions, tuple(mapping[c] for c in a.colors))

    def minimize_dpa(self, a: DPA) -> DPA:
        """Reachable part, normalized colors, Moore partition refinement, BFS numbering"""

        def successors(q):
            return sorted(set(a.transitions[q]))

        order = reachable([a.initial], successors)
        a = self.normalize_colors(a)
        block = {q: a.colors[q] for q in order}
        count = len(set(block.values()))
        while True:
            signatures: Dict[Tuple, int] = {}
            refined = {}
            for q in order:
                sig = (block[q],) + tuple(block[r] for r in a.transitions[q])
                refined[q] = signatures.setdefault(sig, len(signatures))
            block = refined
            if len(signatures) == count:
                break
            count = len(signatures)

        representative: Dict[int, int] = {}
        for q in order:
            representative.setdefault(block[q], q)

        def block_successors(b):
            return [block[r] for r in a.transitions[representative[b]]]

        numbering = {b: i for i, b in enumerate(reachable([block[a.initial]], block_successors))}
        table = [None] * len(numbering)
        colors = [0] * len(numbering)
        for b, i in numbering.items():
            rep = representative[b]
            table[i] = tuple(numbering[block[r]] for r in a.transitions[rep])
            colors[i] = a.colors[rep]
        result = DPA(a.width, len(numbering), 0, tuple(table), tuple(colors))
        return self.normalize_colors(result)

    def determinize(self, a: NBA) -> DPA:
        from .determinization import determinizer

        return determinizer.determinize(a)

    def _check_widths(self, left: int, right: int) -> None:
        if left != right:
            raise WidthMismatchError(f"alphabet widths differ: {left} and {right}")


# Global automata service instance
automata_service = AutomataService()
