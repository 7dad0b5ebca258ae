"""
Graph helpers shared by the automata, solver and strategy services.

Strongly connected components use an iterative version of Tarjan's
algorithm with an explicit stack, since automata products easily exceed
Python's recursion depth.
"""
from collections import deque
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

Node = Hashable
Successors = Callable[[Node], Iterable[Node]]
LabeledSuccessors = Callable[[Node], Iterable[Tuple[int, Node]]]


def strongly_connected_components(nodes: Iterable[Node], successors: Successors) -> List[List[Node]]:
    """Partition the nodes reachable from `nodes` into SCCs, sinks first."""
    index: Dict[Node, int] = {}
    lowlink: Dict[Node, int] = {}
    on_stack: Set[Node] = set()
    stack: List[Node] = []
    result: List[List[Node]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]

        while work:
            v, successor_iter = work[-1]
            descended = False
            for w in successor_iter:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    descended = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if descended:
                continue

            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                result.append(component)
    return result


def is_nontrivial(component: Sequence[Node], successors: Successors) -> bool:
    """An SCC carries a cycle iff it has two nodes or a self-loop."""
    if len(component) > 1:
        return True
    node = component[0]
    return any(w == node for w in successors(node))


def reachable(start: Iterable[Node], successors: Successors) -> List[Node]:
    """Nodes reachable from `start` in breadth-first discovery order."""
    seen: Set[Node] = set()
    order: List[Node] = []
    queue = deque()
    for node in start:
        if node not in seen:
            seen.add(node)
            order.append(node)
            queue.append(node)
    while queue:
        v = queue.popleft()
        for w in successors(v):
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def cycles_have_parity(
    nodes: Iterable[Node],
    successors: Successors,
    color: Callable[[Node], int],
    even: bool,
) -> bool:
    """
    True iff every cycle of the graph restricted to `nodes` has a minimal
    color of the requested parity.

    A cycle with minimal color c exists iff some nontrivial SCC of the
    subgraph of colors >= c contains a node colored c.
    """
    node_list = list(nodes)
    node_set = set(node_list)
    bad_parity = 1 if even else 0
    for c in sorted({color(v) for v in node_list}):
        if c % 2 != bad_parity:
            continue
        band = {v for v in node_list if color(v) >= c}

        def band_successors(v, band=band):
            return [w for w in successors(v) if w in band and w in node_set]

        for component in strongly_connected_components(
            [v for v in node_list if v in band], band_successors
        ):
            if any(color(v) == c for v in component) and is_nontrivial(component, band_successors):
                return False
    return True


def shortest_labeled_path(
    start: Node,
    successors: LabeledSuccessors,
    goal: Callable[[Node], bool],
    allowed: Optional[Set[Node]] = None,
    require_step: bool = False,
) -> Optional[List[int]]:
    """
    Labels of a shortest path from `start` to a node satisfying `goal`,
    exploring labels in ascending order. With `require_step` the empty
    path does not count, which finds cycles through `start`.
    """
    if not require_step and goal(start):
        return []
    parents: Dict[Node, Tuple[Node, int]] = {}
    seen: Set[Node] = set() if require_step else {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for label, w in sorted(successors(v), key=lambda edge: edge[0]):
            if allowed is not None and w not in allowed:
                continue
            if w in seen:
                continue
            seen.add(w)
            parents[w] = (v, label)
            if goal(w):
                labels = [label]
                node = v
                while node != start:
                    node, prev_label = parents[node]
                    labels.append(prev_label)
                labels.reverse()
                return labels
            queue.append(w)
    return None
