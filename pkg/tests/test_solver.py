"""
Test cases for parity game solving
"""
import pytest

from src.core.config import settings
from src.core.exceptions import SolverLimitError
from src.models.game import InvalidGame, ParityGame, Player, Solution
from src.models.predicate import EMPTY_PREDICATE
from src.services.arena_service import arena_service
from src.services.solver_service import solver_service
from tests.conftest import TestDataFactory

I, II = Player.I, Player.II


class TestGameModel:
    """Test cases for the game representation."""

    def test_invalid_edges(self):
        with pytest.raises(InvalidGame):
            ParityGame((I,), (0,), ((0, 1),))

    def test_mismatched_tables(self):
        with pytest.raises(InvalidGame):
            ParityGame((I, II), (0,), ((0, 0), (1, 1)))

    def test_player_parity(self):
        assert II.parity == 0 and I.parity == 1
        assert I.opponent is II


class TestZielonka:
    """Test cases for the recursive solver."""

    def test_even_self_loop(self):
        g = ParityGame((I,), (0,), ((0, 0),))
        s = solver_service.solve(g)
        assert s.winner == (II,)
        assert s.strategy_II == {}

    def test_player_one_escapes_to_odd_loop(self):
        g = ParityGame((I, II, II), (3, 2, 1), ((1, 2), (1, 1), (2, 2)))
        s = solver_service.solve(g)
        assert s.winner == (I, II, I)
        assert s.strategy_I == {0: 1}

    def test_player_two_reaches_even_loop(self):
        g = ParityGame((II, I, I), (3, 2, 1), ((1, 2), (1, 1), (2, 2)))
        s = solver_service.solve(g)
        assert s.winner == (II, II, I)
        assert s.strategy_II == {0: 0}

    def test_minimal_recurring_color_decides(self):
        # the only cycle visits colors 1 and 2; color 1 is minimal
        g = ParityGame((I, II), (1, 2), ((1, 1), (0, 0)))
        assert solver_service.solve(g).winner == (I, I)

    def test_agrees_with_brute_force(self, rng):
        for _ in range(100):
            g = TestDataFactory.random_game(rng, rng.randint(1, 10))
            s = solver_service.solve(g)
            oracle = solver_service.brute_force_solve(g)
            assert s.winner == oracle.winner
            assert solver_service.verify_solution(g, s)
            assert solver_service.verify_solution(g, oracle)

    def test_solution_of_built_arena(self, copy_dpa, prediction_dpa):
        copy_game = arena_service.build_arena(copy_dpa, EMPTY_PREDICATE)
        prediction_game = arena_service.build_arena(prediction_dpa, EMPTY_PREDICATE)
        assert solver_service.solve(copy_game).winner[copy_game.initial] is II
        assert solver_service.solve(prediction_game).winner[prediction_game.initial] is I


class TestCertificates:
    """Test cases for solution verification and attractors."""

    def test_rejects_flipped_winner(self, rng):
        for _ in range(20):
            g = TestDataFactory.random_game(rng, rng.randint(2, 8))
            s = solver_service.solve(g)
            v = rng.randrange(g.num_vertices)
            winner = list(s.winner)
            winner[v] = winner[v].opponent
            tampered = Solution(tuple(winner), s.strategy_I, s.strategy_II)
            assert not solver_service.verify_solution(g, tampered)

    def test_rejects_wrong_length(self):
        g = ParityGame((I,), (0,), ((0, 0),))
        assert not solver_service.verify_solution(g, Solution((II, II)))

    def test_brute_force_limit(self, rng):
        settings.BRUTE_FORCE_LIMIT = 3
        with pytest.raises(SolverLimitError):
            solver_service.brute_force_solve(TestDataFactory.random_game(rng, 5))

    def test_attractor(self):
        # 0 (I) -> {1, 2}, 1 (II) -> {3, 3}, 2 (II) -> {2, 3}, 3 target
        g = ParityGame((I, II, II, I), (1, 1, 1, 0), ((1, 2), (3, 3), (2, 3), (3, 3)))
        attr = solver_service.attractor(g, [3], II)
        assert attr.region == frozenset({0, 1, 2, 3})
        assert attr.strategy[2] == 1
        opposing = solver_service.attractor(g, [3], I)
        assert opposing.region == frozenset({0, 1, 3})
        assert opposing.strategy == {0: 0}

    def test_attractor_restricted_to_subgame(self):
        g = ParityGame((I, II, II, I), (1, 1, 1, 0), ((1, 2), (3, 3), (2, 3), (3, 3)))
        attr = solver_service.attractor(g, [3], II, within=frozenset({0, 2, 3}))
        assert attr.region == frozenset({0, 2, 3})
        assert attr.strategy == {2: 1}
