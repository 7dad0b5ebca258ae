"""
End-to-end synthesis pipeline and its self-checks.

A specification is compiled to a DPA over (input, output, parameter)
tracks, the quotient arena for the parameter is solved, and the winner's
memoryless strategy becomes a machine. The machine is verified exactly
against the automaton and played against fixed adversary machines.
"""
import logging
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..core.config import override_state_cap, settings
from ..core.exceptions import InconsistencyError, SolverLimitError
from ..models.automata import DPA
from ..models.game import ParityGame, Player, Solution
from ..models.machine import CMachine, Machine, SCMachine
from ..models.predicate import UPPredicate
from .arena_service import arena_service
from .compiler_service import TrackAssignment, compiler_service
from .formula_parser import parse
from .solver_service import solver_service
from .spec_service import SynthesisProblem
from .strategy_service import CrossPlayReport, strategy_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoldenCase:
    name: str
    formula: str
    param: str
    winner: Player


GOLDEN_CORPUS: Tuple[GoldenCase, ...] = (
    GoldenCase("copy", "all t. (in(Y,t) <-> in(X,t))", ";0", Player.II),
    GoldenCase("negate", "all t. (in(Y,t) <-> ~in(X,t))", ";0", Player.II),
    GoldenCase("delay", "all t. (in(Y,t+1) <-> in(X,t))", ";0", Player.II),
    GoldenCase("prediction", "all t. (in(Y,t) <-> in(X,t+1))", ";0", Player.I),
    GoldenCase("response", "all t. (in(X,t) -> in(Y,t+1))", ";0", Player.II),
    GoldenCase("some output", "ex t. in(Y,t)", ";0", Player.II),
    GoldenCase("input everywhere", "all t. in(X,t)", ";0", Player.I),
    GoldenCase("infinitely many outputs", "all t. ex u. (t < u & in(Y,u))", ";0", Player.II),
    GoldenCase(
        "fairness",
        "(all t. ex u. (t < u & in(X,u))) -> (all t. ex u. (t < u & in(Y,u)))",
        ";0",
        Player.II,
    ),
    GoldenCase("echo then flag", "ex t. (in(X,t) & in(Y,t+1))", ";0", Player.I),
    GoldenCase("follow parameter", "all t. (in(P,t) -> in(Y,t))", "01;10", Player.II),
    GoldenCase("predict parameter", "all t. (in(Y,t) <-> in(P,t+1))", "0;1", Player.II),
    GoldenCase(
        "beta true",
        "((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})",
        "1;0",
        Player.II,
    ),
    GoldenCase(
        "beta false",
        "((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})",
        ";0",
        Player.I,
    ),
)


@dataclass
class SynthesisResult:
    """Everything one synthesis run produces"""
    automaton: DPA
    game: ParityGame
    solution: Solution
    winner: Player
    machine: Machine
    verified: bool
    cross_plays: List[CrossPlayReport] = field(default_factory=list)

    @property
    def cross_play_ok(self) -> bool:
        return all(report.refuted is self.winner.opponent for report in self.cross_plays)


def adversary_cmachines(rng: Optional[random.Random] = None, extra: int = 0) -> List[CMachine]:
    """Fixed Player II claims (constants, copy, negation) plus `extra` seeded random ones"""
    machines = [
        CMachine(1, 0, ((0, 0),), ((0, 0),)),
        CMachine(1, 0, ((0, 0),), ((1, 1),)),
        CMachine(1, 0, ((0, 0),), ((0, 1),)),
        CMachine(1, 0, ((0, 0),), ((1, 0),)),
    ]
    for _ in range(extra):
        machines.append(random_cmachine(rng or random.Random(settings.DEFAULT_SEED), 3))
    return machines


def adversary_scmachines(rng: Optional[random.Random] = None, extra: int = 0) -> List[SCMachine]:
    """Fixed Player I claims (constants, alternation, echoes of the last bit) plus random ones"""
    machines = [
        SCMachine(1, 0, ((0, 0),), (0,)),
        SCMachine(1, 0, ((0, 0),), (1,)),
        SCMachine(2, 0, ((1, 1), (0, 0)), (0, 1)),
        SCMachine(2, 0, ((0, 1), (0, 1)), (0, 1)),
        SCMachine(2, 0, ((0, 1), (0, 1)), (1, 0)),
    ]
    for _ in range(extra):
        machines.append(random_scmachine(rng or random.Random(settings.DEFAULT_SEED), 3))
    return machines


def random_cmachine(rng: random.Random, num_states: int) -> CMachine:
    transitions = tuple(tuple(rng.randrange(num_states) for _ in (0, 1)) for _ in range(num_states))
    outputs = tuple(tuple(rng.randrange(2) for _ in (0, 1)) for _ in range(num_states))
    return CMachine(num_states, 0, transitions, outputs)


def random_scmachine(rng: random.Random, num_states: int) -> SCMachine:
    transitions = tuple(tuple(rng.randrange(num_states) for _ in (0, 1)) for _ in range(num_states))
    outputs = tuple(rng.randrange(2) for _ in range(num_states))
    return SCMachine(num_states, 0, transitions, outputs)


class SynthesisService:
    """Service running the synthesis pipeline"""

    def synthesize(
        self, problem: SynthesisProblem, seed: Optional[int] = None, random_adversaries: int = 3
    ) -> SynthesisResult:
        order = TrackAssignment((problem.input_name, problem.output_name, problem.param_name))
        with override_state_cap(problem.state_cap):
            automaton = compiler_service.compile(problem.formula, order)
        game = arena_service.build_arena(automaton, problem.predicate)
        solution = solver_service.solve(game)
        winner = solution.winner[game.initial]

        if winner is Player.II:
            machine: Machine = strategy_service.strategy_to_cmachine(game, solution)
        else:
            machine = strategy_service.strategy_to_scmachine(game, solution)
        verified = strategy_service.verify_machine_against_dpa(machine, automaton, problem.predicate, winner)
        if not verified:
            logger.error(f"Extracted Player {winner.value} machine fails exact verification")
            raise InconsistencyError(f"Player {winner.value} machine fails exact verification")

        if seed is None:
            seed = settings.DEFAULT_SEED if problem.seed is None else problem.seed
        rng = random.Random(seed)
        reports = []
        if winner is Player.II:
            for g in adversary_scmachines(rng, random_adversaries):
                reports.append(strategy_service.cross_play(machine, g, automaton, problem.predicate))
        else:
            for f in adversary_cmachines(rng, random_adversaries):
                reports.append(strategy_service.cross_play(f, machine, automaton, problem.predicate))

        result = SynthesisResult(automaton, game, solution, winner, machine, verified, reports)
        logger.info(
            f"Player {winner.value} wins: {automaton.num_states}-state automaton, "
            f"{game.num_vertices}-vertex arena, {machine.num_states}-state machine"
        )
        return result

    def golden_problem(self, case: GoldenCase) -> SynthesisProblem:
        formula = parse(case.formula, declared=["X", "Y", "P"])
        return SynthesisProblem(formula, "X", "Y", "P", UPPredicate.from_literal(case.param))

    def run_selftest(self, seed: Optional[int] = None) -> List[Tuple[str, bool, str]]:
        """(case name, passed, detail) for every golden case"""
        outcomes = []
        for case in GOLDEN_CORPUS:
            try:
                result = self.synthesize(self.golden_problem(case), seed)
                problems = []
                if result.winner is not case.winner:
                    problems.append(f"winner {result.winner.value}, expected {case.winner.value}")
                if not result.cross_play_ok:
                    problems.append("cross-play refuted the winner")
                if not solver_service.verify_solution(result.game, result.solution):
                    problems.append("solution certificate rejected")
                try:
                    oracle = solver_service.brute_force_solve(result.game)
                    if oracle.winner != result.solution.winner:
                        problems.append("brute-force oracle disagrees")
                except SolverLimitError:
                    pass
                detail = "; ".join(problems) or (
                    f"winner {result.winner.value}, {result.machine.num_states}-state machine"
                )
                outcomes.append((case.name, not problems, detail))
            except Exception as e:
                logger.error(f"Self-test case '{case.name}' raised: {e}")
                outcomes.append((case.name, False, str(e)))
        return outcomes


# Global synthesis service instance
synthesis_service = SynthesisService()
