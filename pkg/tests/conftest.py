"""
Test configuration and utilities for the Church synthesis toolkit
"""
import random
from typing import List

import pytest

from src.core.config import settings
from src.models.automata import DPA, NBA, Lasso
from src.models.game import ParityGame, Player
from src.models.machine import CMachine, SCMachine
from src.models.predicate import UPPredicate
from src.services.compiler_service import TrackAssignment, compiler_service
from src.services.formula_parser import parse

COPY_SPEC = "all t. (in(Y,t) <-> in(X,t))"
PREDICTION_SPEC = "all t. (in(Y,t) <-> in(X,t+1))"
PSI_BETA_SPEC = "((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})"
SPEC_ORDER = TrackAssignment(("X", "Y", "P"))


@pytest.fixture(autouse=True)
def restore_settings():
    """Tests may lower limits; put them back afterwards."""
    saved = (
        settings.STATE_CAP,
        settings.MAX_TRACKS,
        settings.MAX_INTERNAL_TRACKS,
        settings.BRUTE_FORCE_LIMIT,
    )
    yield
    (
        settings.STATE_CAP,
        settings.MAX_TRACKS,
        settings.MAX_INTERNAL_TRACKS,
        settings.BRUTE_FORCE_LIMIT,
    ) = saved


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def copy_dpa() -> DPA:
    return TestDataFactory.spec_dpa(COPY_SPEC)


@pytest.fixture
def prediction_dpa() -> DPA:
    return TestDataFactory.spec_dpa(PREDICTION_SPEC)


@pytest.fixture
def psi_beta_dpa() -> DPA:
    return TestDataFactory.spec_dpa(PSI_BETA_SPEC)


@pytest.fixture
def spec_file(tmp_path):
    """Write a spec file and return its path."""

    def write(text: str, name: str = "spec.txt") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


class TestDataFactory:
    """Factory class for creating test data."""

    @staticmethod
    def spec_dpa(text: str) -> DPA:
        """Compile a spec over (X, Y, P) tracks."""
        return compiler_service.compile(parse(text, declared=["X", "Y", "P"]), SPEC_ORDER)

    @staticmethod
    def random_dpa(rng: random.Random, width: int, num_states: int, max_color: int = 3) -> DPA:
        transitions = tuple(
            tuple(rng.randrange(num_states) for _ in range(1 << width)) for _ in range(num_states)
        )
        colors = tuple(rng.randint(0, max_color) for _ in range(num_states))
        return DPA(width, num_states, 0, transitions, colors)

    @staticmethod
    def random_nba(rng: random.Random, width: int, num_states: int, density: float = 0.35) -> NBA:
        transitions = tuple(
            tuple(
                frozenset(r for r in range(num_states) if rng.random() < density)
                for _ in range(1 << width)
            )
            for _ in range(num_states)
        )
        accepting = frozenset(q for q in range(num_states) if rng.random() < 0.4)
        return NBA(width, num_states, 0, transitions, accepting)

    @staticmethod
    def random_game(rng: random.Random, num_vertices: int, max_color: int = 4) -> ParityGame:
        owners = tuple(rng.choice((Player.I, Player.II)) for _ in range(num_vertices))
        colors = tuple(rng.randint(0, max_color) for _ in range(num_vertices))
        edges = tuple(
            (rng.randrange(num_vertices), rng.randrange(num_vertices)) for _ in range(num_vertices)
        )
        return ParityGame(owners, colors, edges)

    @staticmethod
    def random_cmachine(rng: random.Random, num_states: int) -> CMachine:
        transitions = tuple(
            tuple(rng.randrange(num_states) for _ in (0, 1)) for _ in range(num_states)
        )
        outputs = tuple(tuple(rng.randrange(2) for _ in (0, 1)) for _ in range(num_states))
        return CMachine(num_states, 0, transitions, outputs)

    @staticmethod
    def random_scmachine(rng: random.Random, num_states: int) -> SCMachine:
        transitions = tuple(
            tuple(rng.randrange(num_states) for _ in (0, 1)) for _ in range(num_states)
        )
        outputs = tuple(rng.randrange(2) for _ in range(num_states))
        return SCMachine(num_states, 0, transitions, outputs)

    @staticmethod
    def random_lasso(rng: random.Random, width: int, max_prefix: int = 3, max_cycle: int = 3) -> Lasso:
        return Lasso.sample(rng, width, max_prefix, max_cycle)

    @staticmethod
    def random_lassos(rng: random.Random, width: int, count: int = 20) -> List[Lasso]:
        return [TestDataFactory.random_lasso(rng, width) for _ in range(count)]

    @staticmethod
    def random_predicate(rng: random.Random, max_prefix: int = 3, max_period: int = 3) -> UPPredicate:
        return UPPredicate.from_lasso(TestDataFactory.random_lasso(rng, 1, max_prefix, max_period))

    @staticmethod
    def copy_machine() -> CMachine:
        return CMachine(1, 0, ((0, 0),), ((0, 1),))

    @staticmethod
    def delay_machine() -> CMachine:
        """Outputs the previous input bit, 0 first"""
        return CMachine(2, 0, ((0, 1), (0, 1)), ((0, 0), (1, 1)))

    @staticmethod
    def machine_table(kind: str, rows: List[str], num_states: int, initial: int = 0) -> str:
        return "\n".join([f"{kind} {num_states} {initial}"] + rows) + "\n"
