"""
Buchi to parity determinization with Safra trees.

A tree is a tuple of (parent index, label) pairs listed in creation
order, so a node's index doubles as its age. One step of the
construction:

    1. every label moves along the letter;
    2. every old node spawns a youngest child holding the successors of
       its accepting states;
    3. labels are intersected with the parent and stripped of the states
       held by older siblings;
    4. nodes with empty labels disappear (the root stays);
    5. a node whose label equals the union of its children's labels is
       flagged and loses all descendants;
    6. survivors are renumbered without gaps.

The emitted color is 2i for the smallest flagged index i, or 2i-1 for the
smallest removed old index i, whichever is smaller; without either event
the color is odd and larger than every other.
"""
import logging
from typing import Dict, FrozenSet, List, Tuple

from ..models.automata import DPA, NBA
from .automata_service import automata_service

logger = logging.getLogger(__name__)

SafraTree = Tuple[Tuple[int, FrozenSet[int]], ...]


class SafraDeterminizer:
    """Service turning NBAs into equivalent DPAs"""

    def determinize(self, a: NBA) -> DPA:
        quiet_color = 2 * (a.num_states + 1) + 1
        cache: Dict[Tuple[SafraTree, int], Tuple[SafraTree, int]] = {}

        def step(state, letter):
            tree, _ = state
            key = (tree, letter)
            if key not in cache:
                cache[key] = self.step(a, tree, letter, quiet_color)
            return cache[key]

        initial = (((-1, frozenset({a.initial})),), quiet_color)
        raw = automata_service.dpa_from_table(a.width, step, lambda state: state[1], initial)
        result = automata_service.minimize_dpa(raw)
        logger.debug(
            f"Determinized NBA with {a.num_states} states into {raw.num_states} Safra states, "
            f"{result.num_states} after minimization"
        )
        return result

    def step(self, a: NBA, tree: SafraTree, letter: int, quiet_color: int) -> Tuple[SafraTree, int]:
        old_count = len(tree)
        parents: List[int] = [parent for parent, _ in tree]
        labels: List[set] = [set(a.post(label, letter)) for _, label in tree]

        for i, (_, label) in enumerate(tree):
            accepting = label & a.accepting
            if accepting:
                spawned = a.post(accepting, letter)
                if spawned:
                    parents.append(i)
                    labels.append(set(spawned))

        count = len(labels)
        children: List[List[int]] = [[] for _ in range(count)]
        for i in range(1, count):
            children[parents[i]].append(i)

        for i in range(1, count):
            labels[i] &= labels[parents[i]]
            for sibling in children[parents[i]]:
                if sibling >= i:
                    break
                labels[i] -= labels[sibling]

        alive = [True] + [bool(labels[i]) for i in range(1, count)]
        removed = [i for i in range(1, old_count) if not alive[i]]
        flagged: List[int] = []

        for i in range(count):
            if not alive[i] or not labels[i]:
                continue
            kids = [c for c in children[i] if alive[c]]
            if not kids:
                continue
            covered = set().union(*(labels[c] for c in kids))
            if covered == labels[i]:
                flagged.append(i)
                stack = list(kids)
                while stack:
                    d = stack.pop()
                    if alive[d]:
                        alive[d] = False
                        if d < old_count:
                            removed.append(d)
                    stack.extend(children[d])

        events = [2 * i for i in flagged] + [2 * i - 1 for i in removed]
        color = min(events) if events else quiet_color

        keep = [i for i in range(count) if alive[i]]
        renumber = {old: new for new, old in enumerate(keep)}
        new_tree = tuple(
            (renumber[parents[i]] if i else -1, frozenset(labels[i])) for i in keep
        )
        return new_tree, color


# Global determinizer instance
determinizer = SafraDeterminizer()
