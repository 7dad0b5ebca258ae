"""
Winning conditions and winning strategies as formulas.

A DPA with k states over the (X, Y, P) tracks is encoded by ceil(log2 k)
second-order variables whose bits at position t name the automaton state
before letter t. A memoryless strategy on the quotient arena becomes a
family of sets: Player I plays X(t) = 1 iff t in Z_q for the current
state q, Player II plays Y(t) = 1 iff t in Z_q_a where a = X(t).
"""
import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..core.config import settings
from ..core.exceptions import RoleConflictError
from ..models.automata import DPA, Lasso
from ..models.formula import (
    Formula,
    all_names,
    conj,
    disj,
    exists,
    exists_all,
    forall,
    forall_all,
    fresh_name,
    iff,
    implies,
    is_first,
    less,
    member,
    neg,
    normalize,
    substitute_param,
    successor,
)
from ..models.game import ParityGame, Player, Solution
from ..models.predicate import UPPredicate
from .arena_service import arena_service, spec_letter
from .compiler_service import TrackAssignment, compiler_service
from .predicate_service import predicate_service
from .solver_service import solver_service
from .strategy_service import strategy_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrategyEncoding:
    """Strategy variables of one player for a k-state automaton"""
    player: Player
    num_states: int

    @property
    def variables(self) -> Tuple[str, ...]:
        if self.player is Player.I:
            return tuple(f"Z{q}" for q in range(self.num_states))
        return tuple(f"Z{q}_{a}" for q in range(self.num_states) for a in (0, 1))

    def name(self, q: int, a: Optional[int] = None) -> str:
        if self.player is Player.I:
            return f"Z{q}"
        return f"Z{q}_{a}"


@dataclass(frozen=True)
class StrategyDefinition:
    """Winner, strategy sets and the formula defining the winner's operator"""
    winner: Player
    sets: Dict[str, UPPredicate]
    formula: Formula


class _RunEncoding:
    """Binary state tracks R_0..R_{m-1} for a fixed automaton"""

    def __init__(self, a: DPA):
        self.automaton = a
        self.bits = (a.num_states - 1).bit_length() if a.num_states > 1 else 0
        self.tracks = [fresh_name("R") for _ in range(self.bits)]

    def state_is(self, q: int, t: str) -> Formula:
        return conj(
            *(
                member(track, t) if q >> j & 1 else neg(member(track, t))
                for j, track in enumerate(self.tracks)
            )
        )

    def letter_is(self, x: int, y: int, c: int, t: str, names: Tuple[str, str, str]) -> Formula:
        return conj(*(_literal(name, bit, t) for name, bit in zip(names, (x, y, c))))

    def run(self, names: Tuple[str, str, str]) -> Formula:
        """R encodes the unique run of the automaton on (X, Y, P)"""
        a = self.automaton
        t, u = fresh_name("t"), fresh_name("t")
        starts = exists(t, conj(is_first(t), self.state_is(a.initial, t)))
        moves: List[Formula] = []
        for q in range(a.num_states):
            targets: Dict[int, List[Formula]] = {}
            for x in (0, 1):
                for y in (0, 1):
                    for c in (0, 1):
                        target = a.step(q, spec_letter(x, y, c))
                        targets.setdefault(target, []).append(self.letter_is(x, y, c, t, names))
            for target in sorted(targets):
                moves.append(
                    implies(
                        conj(self.state_is(q, t), disj(*targets[target])),
                        self.state_is(target, u),
                    )
                )
        follows = forall_all([t, u], implies(successor(t, u), conj(*moves)))
        return conj(starts, follows)

    def infinitely_often(self, color: int) -> Formula:
        states = [q for q in range(self.automaton.num_states) if self.automaton.colors[q] == color]
        t, u = fresh_name("t"), fresh_name("t")
        return forall(t, exists(u, conj(less(t, u), disj(*(self.state_is(q, u) for q in states)))))

    def even(self) -> Formula:
        """Minimal color seen infinitely often along R is even"""
        colors = sorted(set(self.automaton.colors))
        recurring = {c: self.infinitely_often(c) for c in colors}
        cases = []
        for c in colors:
            if c % 2 == 0:
                cases.append(conj(recurring[c], *(neg(recurring[d]) for d in colors if d < c)))
        return disj(*cases)


def _literal(name: str, bit: int, t: str) -> Formula:
    return member(name, t) if bit else neg(member(name, t))


class DefinabilityService:
    """Service emitting and validating win and strategy formulas"""

    def encoding(self, a: DPA, player: Player) -> StrategyEncoding:
        return StrategyEncoding(player, a.num_states)

    def consistent(
        self,
        run: _RunEncoding,
        player: Player,
        input_name: str,
        output_name: str,
    ) -> Formula:
        """The play follows the strategy encoded by the Z family"""
        encoding = StrategyEncoding(player, run.automaton.num_states)
        t = fresh_name("t")
        states = range(run.automaton.num_states)
        if player is Player.I:
            chosen = disj(*(conj(run.state_is(q, t), member(encoding.name(q), t)) for q in states))
            return forall(t, iff(member(input_name, t), chosen))
        chosen = disj(
            *(
                conj(
                    run.state_is(q, t),
                    disj(
                        conj(member(input_name, t), member(encoding.name(q, 1), t)),
                        conj(neg(member(input_name, t)), member(encoding.name(q, 0), t)),
                    ),
                )
                for q in states
            )
        )
        return forall(t, iff(member(output_name, t), chosen))

    def emit_winst(self, a: DPA, player: Player, param: str = "P") -> Formula:
        """
        Free variables: the strategy family of `player` and `param`. True
        iff the encoded strategy wins every play of the arena of `a`.
        """
        self._check_encoding_names(a, player, param)
        x, y = fresh_name("X"), fresh_name("Y")
        run = _RunEncoding(a)
        names = (x, y, param)
        outcome = run.even() if player is Player.I else neg(run.even())
        losing_play = conj(run.run(names), self.consistent(run, player, x, y), outcome)
        return normalize(neg(exists_all([x, y, *run.tracks], losing_play, second_order=True)))

    def emit_op_formula(
        self,
        a: DPA,
        player: Player,
        input_name: str = "X",
        output_name: str = "Y",
        param: str = "P",
    ) -> Formula:
        """Graph of the operator induced by the strategy family"""
        self._check_encoding_names(a, player, param, input_name, output_name)
        run = _RunEncoding(a)
        names = (input_name, output_name, param)
        body = conj(run.run(names), self.consistent(run, player, input_name, output_name))
        return normalize(exists_all(run.tracks, body, second_order=True))

    def emit_win_sentence(
        self,
        phi: Formula,
        input_name: str = "X",
        output_name: str = "Y",
        param_name: str = "P",
    ) -> Formula:
        """
        Sentence over P that holds iff Player II wins the game of phi:
        no Player I strategy family is winning.
        """
        used = all_names(phi)
        copy = next(name for name in (f"Q{i}" if i else "Q" for i in range(len(used) + 1)) if name not in used)
        renamed = substitute_param(phi, param_name, copy)
        a = compiler_service.compile(renamed, TrackAssignment((input_name, output_name, copy)))
        winst = self.emit_winst(a, Player.I, param=param_name)
        sentence = neg(exists_all(self.encoding(a, Player.I).variables, winst, second_order=True))
        logger.info(f"Emitted win sentence over a {a.num_states}-state automaton")
        return normalize(sentence)

    def encode_strategy(self, a: DPA, game: ParityGame, solution: Solution, p: UPPredicate) -> Dict[str, UPPredicate]:
        """Strategy sets of the initial vertex's winner, 0 wherever the strategy is undefined"""
        winner = solution.winner[game.initial]
        strategy = solution.strategy(winner)
        index = {game.name(v): v for v in game.vertices}
        encoding = self.encoding(a, winner)
        sets: Dict[str, UPPredicate] = {}
        for q in range(a.num_states):
            keys = [(q, None)] if winner is Player.I else [(q, 0), (q, 1)]
            for _, bit in keys:
                bits = []
                for phase in range(p.length):
                    name = ("I", q, phase) if winner is Player.I else ("II", q, bit, phase)
                    v = index.get(name)
                    bits.append(str(strategy.get(v, 0)) if v is not None else "0")
                split = len(p.prefix)
                value = UPPredicate("".join(bits[:split]), "".join(bits[split:])).canonical()
                sets[encoding.name(q, bit)] = value
        return sets

    def emit_strategy_formula(
        self,
        phi: Formula,
        p: UPPredicate,
        input_name: str = "X",
        output_name: str = "Y",
        param_name: str = "P",
    ) -> StrategyDefinition:
        """Formula St(X, Y, P) defining the winner's strategy operator for this P"""
        a = compiler_service.compile(phi, TrackAssignment((input_name, output_name, param_name)))
        game = arena_service.build_arena(a, p)
        solution = solver_service.solve(game)
        winner = solution.winner[game.initial]
        sets = self.encode_strategy(a, game, solution, p)
        op = self.emit_op_formula(a, winner, input_name, output_name, param_name)
        pinned = [predicate_service.up_to_formula(value, name) for name, value in sets.items()]
        formula = normalize(exists_all(list(sets), conj(*pinned, op), second_order=True))
        logger.info(f"Emitted strategy formula for Player {winner.value} with {len(sets)} strategy sets")
        return StrategyDefinition(winner, sets, formula)

    # Validation

    def validate_win_sentence(
        self,
        phi: Formula,
        p: UPPredicate,
        input_name: str = "X",
        output_name: str = "Y",
        param_name: str = "P",
    ) -> Tuple[bool, bool]:
        """(formula verdict, solver verdict) on whether Player II wins for p"""
        sentence = self.emit_win_sentence(phi, input_name, output_name, param_name)
        by_formula = compiler_service.model_check(sentence, {param_name: p})
        a = compiler_service.compile(phi, TrackAssignment((input_name, output_name, param_name)))
        game = arena_service.build_arena(a, p)
        by_solver = solver_service.solve(game).winner[game.initial] is Player.II
        if by_formula != by_solver:
            logger.error(f"Win sentence and solver disagree for P={p.literal}")
        return by_formula, by_solver

    def check_winst(self, a: DPA, player: Player, sets: Mapping[str, UPPredicate], p: UPPredicate, param: str = "P") -> bool:
        params = dict(sets)
        params[param] = p
        return compiler_service.model_check(self.emit_winst(a, player, param), params)

    def validate_strategy_formula(
        self,
        phi: Formula,
        p: UPPredicate,
        inputs: Optional[Sequence[Lasso]] = None,
        input_name: str = "X",
        output_name: str = "Y",
        param_name: str = "P",
        rng: Optional[random.Random] = None,
    ) -> bool:
        """
        The strategy formula must hold on (input, machine output) and fail
        once one output bit at a random position is flipped, for every
        input. Without inputs, SAMPLE_LASSO_COUNT random lassos are drawn.
        """
        rng = rng or random.Random(settings.DEFAULT_SEED)
        if inputs is None:
            inputs = [Lasso.sample(rng, 1) for _ in range(settings.SAMPLE_LASSO_COUNT)]
        definition = self.emit_strategy_formula(phi, p, input_name, output_name, param_name)
        a = compiler_service.compile(phi, TrackAssignment((input_name, output_name, param_name)))
        game = arena_service.build_arena(a, p)
        solution = solver_service.solve(game)
        if definition.winner is Player.II:
            machine = strategy_service.strategy_to_cmachine(game, solution)
            argument, result = input_name, output_name
        else:
            machine = strategy_service.strategy_to_scmachine(game, solution)
            argument, result = output_name, input_name

        for word in inputs:
            out = strategy_service.run_on_lasso(machine, word)
            params = {argument: UPPredicate.from_lasso(word), result: UPPredicate.from_lasso(out), param_name: p}
            if not compiler_service.model_check(definition.formula, params):
                logger.error(f"Strategy formula rejects the machine's output on {word}")
                return False
            n = rng.randrange(len(out.prefix) + 2 * len(out.cycle))
            params[result] = UPPredicate.from_lasso(out.flipped(n))
            if compiler_service.model_check(definition.formula, params):
                logger.error(f"Strategy formula accepts a perturbed output on {word}")
                return False
        return True

    def _check_encoding_names(self, a: DPA, player: Player, *names: str) -> None:
        clash = set(names) & set(self.encoding(a, player).variables)
        if clash:
            raise RoleConflictError(f"'{sorted(clash)[0]}' is reserved for a strategy variable")


# Global definability service instance
definability_service = DefinabilityService()
