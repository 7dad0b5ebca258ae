"""
Test cases for win sentences and strategy formulas
"""
import pytest

from src.core.exceptions import RoleConflictError
from src.models.formula import free_vars
from src.models.game import Player
from src.models.predicate import EMPTY_PREDICATE, UPPredicate
from src.services.arena_service import arena_service
from src.services.definability_service import StrategyEncoding, definability_service
from src.services.formula_parser import parse
from src.services.solver_service import solver_service
from src.services.synthesis_service import GOLDEN_CORPUS
from tests.conftest import COPY_SPEC, PREDICTION_SPEC, PSI_BETA_SPEC, TestDataFactory

ROLES = ["X", "Y", "P"]


def strategy_sets(a, p):
    game = arena_service.build_arena(a, p)
    solution = solver_service.solve(game)
    return solution.winner[game.initial], definability_service.encode_strategy(a, game, solution, p)


class TestEncoding:
    """Test cases for strategy variable naming and sentence shape."""

    def test_variable_names(self):
        assert StrategyEncoding(Player.I, 3).variables == ("Z0", "Z1", "Z2")
        assert StrategyEncoding(Player.II, 2).variables == ("Z0_0", "Z0_1", "Z1_0", "Z1_1")
        assert StrategyEncoding(Player.II, 2).name(1, 0) == "Z1_0"

    def test_win_sentence_mentions_only_the_parameter(self):
        sentence = definability_service.emit_win_sentence(parse(COPY_SPEC, declared=ROLES))
        assert free_vars(sentence) == (frozenset(), frozenset({"P"}))

    def test_winst_free_variables(self, copy_dpa):
        f = definability_service.emit_winst(copy_dpa, Player.II)
        assert free_vars(f)[1] == {"P", "Z0_0", "Z0_1", "Z1_0", "Z1_1"}
        assert not free_vars(f)[0]

    def test_op_formula_free_variables(self, copy_dpa):
        f = definability_service.emit_op_formula(copy_dpa, Player.I)
        assert free_vars(f)[1] == {"X", "Y", "P", "Z0", "Z1"}

    def test_reserved_names(self, copy_dpa):
        with pytest.raises(RoleConflictError):
            definability_service.emit_winst(copy_dpa, Player.I, param="Z1")
        with pytest.raises(RoleConflictError):
            definability_service.emit_op_formula(copy_dpa, Player.II, input_name="Z0_1")

    def test_encoded_copy_strategy(self, copy_dpa):
        winner, sets = strategy_sets(copy_dpa, EMPTY_PREDICATE)
        assert winner is Player.II
        q = copy_dpa.initial
        assert sets[f"Z{q}_0"].literal == ";0"
        assert sets[f"Z{q}_1"].literal == ";1"
        assert all(value.is_canonical for value in sets.values())

    def test_encoded_sets_follow_parameter_phases(self):
        a = TestDataFactory.spec_dpa("all t. (in(P,t) -> in(Y,t))")
        p = UPPredicate.from_literal("01;10")
        winner, sets = strategy_sets(a, p)
        assert winner is Player.II
        q = a.initial
        for bit in (0, 1):
            chosen = sets[f"Z{q}_{bit}"]
            assert all(chosen.bit_at(n) >= p.bit_at(n) for n in range(8))


@pytest.mark.slow
class TestWinSentence:
    """Test cases deciding the game by model checking the win sentence."""

    def test_copy_is_won_by_player_two(self):
        verdicts = definability_service.validate_win_sentence(parse(COPY_SPEC, declared=ROLES), EMPTY_PREDICATE)
        assert verdicts == (True, True)

    def test_prediction_is_won_by_player_one(self):
        verdicts = definability_service.validate_win_sentence(
            parse(PREDICTION_SPEC, declared=ROLES), EMPTY_PREDICATE
        )
        assert verdicts == (False, False)

    @pytest.mark.parametrize("literal, expected", [("1;0", True), (";0", False), ("00;1", True)])
    def test_parameter_dependent_game(self, literal, expected):
        phi = parse(PSI_BETA_SPEC, declared=ROLES)
        verdicts = definability_service.validate_win_sentence(phi, UPPredicate.from_literal(literal))
        assert verdicts == (expected, expected)


@pytest.mark.slow
class TestStrategyFormulas:
    """Test cases for winning-strategy formulas."""

    def test_solver_strategy_satisfies_winst(self, copy_dpa, prediction_dpa):
        winner, sets = strategy_sets(copy_dpa, EMPTY_PREDICATE)
        assert definability_service.check_winst(copy_dpa, winner, sets, EMPTY_PREDICATE)
        winner, sets = strategy_sets(prediction_dpa, EMPTY_PREDICATE)
        assert winner is Player.I
        assert definability_service.check_winst(prediction_dpa, winner, sets, EMPTY_PREDICATE)

    def test_wrong_family_fails_winst(self, copy_dpa):
        _, sets = strategy_sets(copy_dpa, EMPTY_PREDICATE)
        swapped = {name: UPPredicate("", "1" if value.literal == ";0" else "0") for name, value in sets.items()}
        assert not definability_service.check_winst(copy_dpa, Player.II, swapped, EMPTY_PREDICATE)

    @pytest.mark.parametrize("z0, z1", [(";0", ";0"), (";1", ";1"), (";01", ";10")])
    def test_no_player_one_family_wins_copy(self, copy_dpa, z0, z1):
        sets = {"Z0": UPPredicate.from_literal(z0), "Z1": UPPredicate.from_literal(z1)}
        assert not definability_service.check_winst(copy_dpa, Player.I, sets, EMPTY_PREDICATE)

    def test_copy_strategy_formula(self, rng):
        phi = parse(COPY_SPEC, declared=ROLES)
        definition = definability_service.emit_strategy_formula(phi, EMPTY_PREDICATE)
        assert definition.winner is Player.II
        assert free_vars(definition.formula)[1] == {"X", "Y", "P"}
        inputs = TestDataFactory.random_lassos(rng, 1, 20)
        assert definability_service.validate_strategy_formula(phi, EMPTY_PREDICATE, inputs)

    @pytest.mark.parametrize("case", GOLDEN_CORPUS, ids=lambda case: case.name)
    def test_corpus_strategy_formulas(self, case, rng):
        phi = parse(case.formula, declared=ROLES)
        p = UPPredicate.from_literal(case.param)
        inputs = TestDataFactory.random_lassos(rng, 1, 20)
        assert definability_service.validate_strategy_formula(phi, p, inputs, rng=rng)

    def test_sampled_inputs(self):
        phi = parse("all t. (in(Y,t+1) <-> in(X,t))", declared=ROLES)
        assert definability_service.validate_strategy_formula(phi, EMPTY_PREDICATE)


@pytest.mark.slow
class TestCorpusWinSentences:
    """Test cases comparing the win sentence with the solver on every corpus case."""

    @pytest.mark.parametrize("case", GOLDEN_CORPUS, ids=lambda case: case.name)
    def test_sentence_agrees_with_solver(self, case):
        phi = parse(case.formula, declared=ROLES)
        expected = case.winner is Player.II
        verdicts = definability_service.validate_win_sentence(phi, UPPredicate.from_literal(case.param))
        assert verdicts == (expected, expected)
