"""
Command-line entry point: synth, check, simulate, emit-formula, selftest.

Exit status 0 means the command ran, whatever the game verdict; 2 means a
domain error (bad input, capacity, unbound names); 3 means an --expect
mismatch; 1 means a failed internal self-check.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .core.config import override_state_cap, settings
from .core.exceptions import ChurchSynthesisException, InconsistencyError
from .models.formula import to_text
from .models.game import Player
from .models.predicate import UPPredicate
from .services.compiler_service import compiler_service
from .services.definability_service import definability_service
from .services.export_service import export_service
from .services.spec_service import SynthesisProblem, spec_service
from .services.strategy_service import strategy_service
from .services.synthesis_service import synthesis_service

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SELF_CHECK = 1
EXIT_DOMAIN_ERROR = 2
EXIT_EXPECT_MISMATCH = 3


def cmd_synth(args: argparse.Namespace) -> int:
    problem = spec_service.build_problem(spec_service.load(args.spec))
    result = synthesis_service.synthesize(problem, args.seed)

    out = args.out or settings.OUTPUT_DIR
    stem = Path(args.spec).stem
    export_service.write(out, f"{stem}.machine.txt", export_service.machine_to_text(result.machine))
    export_service.write(out, f"{stem}.machine.dot", export_service.machine_to_dot(result.machine))
    export_service.write(out, f"{stem}.dpa.txt", export_service.dpa_to_text(result.automaton))
    export_service.write(out, f"{stem}.solution.txt", export_service.solution_to_text(result.game, result.solution))

    refuted = sum(1 for report in result.cross_plays if report.refuted is result.winner.opponent)
    print(f"winner: {result.winner.value}")
    print(f"parameter: {problem.param_name} = {problem.predicate.literal}")
    print(f"automaton: {result.automaton.num_states} states, max color {result.automaton.max_color}")
    print(f"arena: {result.game.num_vertices} vertices")
    print(f"machine: {result.machine.kind.value} with {result.machine.num_states} states")
    print(f"verification: {'passed' if result.verified else 'failed'}")
    print(f"cross-play: {refuted}/{len(result.cross_plays)} adversaries refuted")

    if not result.cross_play_ok:
        logger.error("Cross-play refuted the synthesized machine")
        return EXIT_SELF_CHECK
    if args.expect and Player(args.expect) is not result.winner:
        print(f"expected winner {args.expect}, got {result.winner.value}")
        return EXIT_EXPECT_MISMATCH
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    bindings = dict(spec_service.parse_binding(b) for b in args.param or [])
    text = _read(args.sentence)
    sentence = spec_service.read_sentence(text, bindings)
    holds = compiler_service.model_check(sentence.formula, sentence.params)
    print("true" if holds else "false")
    if args.expect is not None and (args.expect == "true") != holds:
        return EXIT_EXPECT_MISMATCH
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    machine = export_service.machine_from_text(_read(args.machine))
    word = UPPredicate.from_literal(args.input).to_lasso()
    output = strategy_service.run_on_lasso(machine, word)
    print(f"input:  {''.join(map(str, word.letters(args.steps)))}")
    print(f"output: {''.join(map(str, output.letters(args.steps)))}")
    print(f"lasso:  {UPPredicate.from_lasso(output).literal}")
    return EXIT_OK


def cmd_emit_formula(args: argparse.Namespace) -> int:
    problem = spec_service.build_problem(spec_service.load(args.spec))
    with override_state_cap(problem.state_cap):
        return _emit_formula(problem, args.kind)


def _emit_formula(problem: SynthesisProblem, kind: str) -> int:
    if kind == "win":
        formula = definability_service.emit_win_sentence(
            problem.formula, problem.input_name, problem.output_name, problem.param_name
        )
    else:
        definition = definability_service.emit_strategy_formula(
            problem.formula, problem.predicate, problem.input_name, problem.output_name, problem.param_name
        )
        print(f"# winner: {definition.winner.value}")
        for name, value in definition.sets.items():
            print(f"# {name} = {value.literal}")
        formula = definition.formula
    print(to_text(formula))
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    outcomes = synthesis_service.run_selftest(args.seed)
    for name, passed, detail in outcomes:
        print(f"{'✓' if passed else '✗'} {name}: {detail}")
    failed = sum(1 for _, passed, _ in outcomes if not passed)
    print(f"{len(outcomes) - failed}/{len(outcomes)} cases passed")
    return EXIT_OK if not failed else EXIT_SELF_CHECK


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ChurchSynthesisException(f"cannot read {path}: {e.strerror}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="church-synth",
        description="Synthesis of finite-state operators from monadic specifications",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Solve the game of a spec file and emit the winner's machine")
    synth.add_argument("spec", help="Spec file")
    synth.add_argument("--out", default=None, help="Artifact directory (default: OUTPUT_DIR)")
    synth.add_argument("--expect", choices=[p.value for p in Player], help="Expected winner")
    synth.add_argument("--seed", type=int, default=None, help="Seed for random adversaries")
    synth.set_defaults(handler=cmd_synth)

    check = commands.add_parser("check", help="Model check a sentence over UP parameters")
    check.add_argument("sentence", help="File holding a sentence")
    check.add_argument("--param", action="append", help="Binding NAME=prefix;period. Repeatable.")
    check.add_argument("--expect", choices=["true", "false"], help="Expected truth value")
    check.set_defaults(handler=cmd_check)

    simulate = commands.add_parser("simulate", help="Run a machine table on a UP input")
    simulate.add_argument("machine", help="Machine table file")
    simulate.add_argument("input", help="Input literal prefix;period")
    simulate.add_argument("steps", type=int, help="Number of steps to print")
    simulate.set_defaults(handler=cmd_simulate)

    emit = commands.add_parser("emit-formula", help="Print the win sentence or a strategy formula")
    emit.add_argument("spec", help="Spec file")
    emit.add_argument("--kind", choices=["win", "strategy"], default="win")
    emit.set_defaults(handler=cmd_emit_formula)

    selftest = commands.add_parser("selftest", help="Run the golden corpus end to end")
    selftest.add_argument("--seed", type=int, default=None)
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (args.log_level or settings.LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    if getattr(args, "steps", 0) < 0:
        print("error: steps must be non-negative", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    try:
        return args.handler(args)
    except InconsistencyError as e:
        logger.error(f"Self-check failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SELF_CHECK
    except ChurchSynthesisException as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
