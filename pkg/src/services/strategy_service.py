"""
Strategies as executable machines.

A memoryless winning strategy of Player II induces a causal operator
from X to Y and one of Player I a strongly causal operator from Y to X;
both are read off the quotient arena as finite-state machines.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Tuple

from ..core.exceptions import NotWonError, WidthMismatchError
from ..core.graph import cycles_have_parity, reachable
from ..models.automata import DPA, Lasso
from ..models.game import ParityGame, Player, Solution
from ..models.machine import CMachine, Machine, SCMachine
from ..models.predicate import UPPredicate
from .arena_service import spec_letter
from .automata_service import automata_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrossPlayReport:
    """Outcome of playing a Player II machine against a Player I machine"""
    x: Lasso
    y: Lasso
    spec_holds: bool

    @property
    def refuted(self) -> Player:
        """Whose claim the common play contradicts"""
        return Player.I if self.spec_holds else Player.II


class StrategyService:
    """Service for machine extraction, execution and verification"""

    # Extraction

    def strategy_to_cmachine(self, g: ParityGame, s: Solution) -> CMachine:
        if s.winner[g.initial] is not Player.II:
            raise NotWonError("initial vertex is not won by Player II")

        def advance(v: int, a: int) -> Tuple[int, int]:
            w = g.step(v, a)
            b = s.strategy_II[w]
            return b, g.step(w, b)

        states = reachable([g.initial], lambda v: [advance(v, a)[1] for a in (0, 1)])
        index = {v: i for i, v in enumerate(states)}
        transitions = []
        outputs = []
        for v in states:
            moves = [advance(v, a) for a in (0, 1)]
            transitions.append(tuple(index[nxt] for _, nxt in moves))
            outputs.append(tuple(b for b, _ in moves))
        machine = self.minimize(CMachine(len(states), 0, tuple(transitions), tuple(outputs)))
        logger.debug(f"Extracted causal machine: {len(states)} states, {machine.num_states} minimized")
        return machine

    def strategy_to_scmachine(self, g: ParityGame, s: Solution) -> SCMachine:
        if s.winner[g.initial] is not Player.I:
            raise NotWonError("initial vertex is not won by Player I")

        def advance(v: int, b: int) -> int:
            return g.step(g.step(v, s.strategy_I[v]), b)

        states = reachable([g.initial], lambda v: [advance(v, b) for b in (0, 1)])
        index = {v: i for i, v in enumerate(states)}
        transitions = tuple(tuple(index[advance(v, b)] for b in (0, 1)) for v in states)
        outputs = tuple(s.strategy_I[v] for v in states)
        machine = self.minimize(SCMachine(len(states), 0, transitions, outputs))
        logger.debug(f"Extracted strongly causal machine: {len(states)} states, {machine.num_states} minimized")
        return machine

    def minimize(self, m: Machine) -> Machine:
        """Reachable part, partition refinement on outputs and successors, BFS numbering"""
        order = reachable([m.initial], lambda q: list(m.transitions[q]))
        block = {q: self._output_signature(m, q) for q in order}
        count = len(set(block.values()))
        while True:
            signatures: Dict[Hashable, int] = {}
            refined = {}
            for q in order:
                key = (block[q], block[m.transitions[q][0]], block[m.transitions[q][1]])
                refined[q] = signatures.setdefault(key, len(signatures))
            block = refined
            if len(signatures) == count:
                break
            count = len(signatures)

        representative: Dict[int, int] = {}
        for q in order:
            representative.setdefault(block[q], q)
        numbering = {
            b: i
            for i, b in enumerate(
                reachable([block[m.initial]], lambda b: [block[r] for r in m.transitions[representative[b]]])
            )
        }
        reps = sorted(numbering, key=numbering.get)
        transitions = tuple(
            tuple(numbering[block[r]] for r in m.transitions[representative[b]]) for b in reps
        )
        if isinstance(m, SCMachine):
            return SCMachine(len(reps), 0, transitions, tuple(m.outputs[representative[b]] for b in reps))
        return CMachine(len(reps), 0, transitions, tuple(m.outputs[representative[b]] for b in reps))

    def _output_signature(self, m: Machine, q: int) -> Hashable:
        return m.outputs[q]

    # Execution

    def run_on_lasso(self, m: Machine, w: Lasso) -> Lasso:
        """Output word of the operator on an ultimately periodic input"""
        if w.width != 1:
            raise WidthMismatchError(f"machines read width-1 words, got width {w.width}")
        q = m.initial
        prefix: List[int] = []
        for a in w.prefix:
            prefix.append(m.output(q, a))
            q = m.step(q, a)
        first_seen: Dict[int, int] = {}
        iterations: List[List[int]] = []
        while q not in first_seen:
            first_seen[q] = len(iterations)
            block = []
            for a in w.cycle:
                block.append(m.output(q, a))
                q = m.step(q, a)
            iterations.append(block)
        start = first_seen[q]
        for block in iterations[:start]:
            prefix.extend(block)
        cycle = [b for block in iterations[start:] for b in block]
        return Lasso(tuple(prefix), tuple(cycle), 1).canonical()

    def sc_fixed_point(self, m: SCMachine) -> Lasso:
        """The unique word w with m(w) = w"""
        q = m.initial
        first_seen: Dict[int, int] = {}
        outputs: List[int] = []
        while q not in first_seen:
            first_seen[q] = len(outputs)
            b = m.output(q)
            outputs.append(b)
            q = m.step(q, b)
        start = first_seen[q]
        return Lasso(tuple(outputs[:start]), tuple(outputs[start:]), 1).canonical()

    def compose(self, f: CMachine, g: SCMachine) -> SCMachine:
        """X -> g(f(X)); strongly causal because g's output reads g's state only"""
        if not isinstance(g, SCMachine):
            raise TypeError("the outer machine of a composition must be strongly causal")
        pairs = [(p, q) for p in range(f.num_states) for q in range(g.num_states)]
        index = {pair: i for i, pair in enumerate(pairs)}
        transitions = tuple(
            tuple(index[(f.step(p, x), g.step(q, f.output(p, x)))] for x in (0, 1)) for p, q in pairs
        )
        outputs = tuple(g.output(q) for _, q in pairs)
        composite = SCMachine(len(pairs), index[(f.initial, g.initial)], transitions, outputs)
        return self.minimize(composite)

    def cross_play(self, f: CMachine, g: SCMachine, spec: DPA, p: UPPredicate) -> CrossPlayReport:
        """
        Play Player II's operator f against Player I's operator g: the
        fixed point X0 of g o f and Y0 = f(X0) satisfy X0 = g(Y0), so the
        specification either holds on (X0, Y0, P), refuting g, or fails,
        refuting f.
        """
        self._check_spec(spec)
        x0 = self.sc_fixed_point(self.compose(f, g))
        y0 = self.run_on_lasso(f, x0)
        word = Lasso.zip([x0, y0, p.to_lasso()])
        holds = automata_service.dpa_accepts_lasso(spec, word)
        return CrossPlayReport(x0, y0, holds)

    # Verification

    def verify_machine_against_dpa(self, m: Machine, spec: DPA, p: UPPredicate, side: Player) -> bool:
        """
        Exact check over the product of machine, automaton and phases with
        the adversary's bit left free: every reachable cycle must have an
        even minimal color for Player II and an odd one for Player I.
        """
        self._check_spec(spec)
        if side is Player.II and not isinstance(m, CMachine):
            raise TypeError("Player II machines are causal machines")
        if side is Player.I and not isinstance(m, SCMachine):
            raise TypeError("Player I machines are strongly causal machines")

        def successors(node):
            q, phase, s = node
            c = p.bit_at(phase)
            nxt = p.next_phase(phase)
            result = []
            for bit in (0, 1):
                if side is Player.II:
                    x, y = bit, m.output(s, bit)
                    s2 = m.step(s, x)
                else:
                    x, y = m.output(s), bit
                    s2 = m.step(s, y)
                result.append((spec.step(q, spec_letter(x, y, c)), nxt, s2))
            return result

        nodes = reachable([(spec.initial, 0, m.initial)], successors)
        return cycles_have_parity(nodes, successors, lambda node: spec.colors[node[0]], side is Player.II)

    def _check_spec(self, spec: DPA) -> None:
        if spec.width != 3:
            raise WidthMismatchError(f"specification automaton must have (X, Y, P) tracks, got width {spec.width}")


# Global strategy service instance
strategy_service = StrategyService()
