"""
Test cases for ultimately periodic parameters
"""
import pytest

from src.core.exceptions import InconsistencyError, LiteralFormatError
from src.models.formula import free_vars, selection_formula
from src.models.machine import CMachine
from src.models.predicate import EMPTY_PREDICATE, UPPredicate
from src.services.automata_service import automata_service
from src.services.compiler_service import TrackAssignment, compiler_service
from src.services.formula_parser import parse
from src.services.predicate_service import predicate_service
from src.services.strategy_service import strategy_service
from tests.conftest import TestDataFactory


class TestLiterals:
    """Test cases for parsing and normalizing literals."""

    def test_from_literal(self):
        p = UPPredicate.from_literal("01;10")
        assert (p.prefix, p.period) == ("01", "10")
        assert UPPredicate.from_literal("ε;1") == UPPredicate("", "1")
        assert UPPredicate.from_literal(" ;0 ") == EMPTY_PREDICATE

    @pytest.mark.parametrize("literal", ["0101", "0;", "01;2", "1;0;1", ""])
    def test_bad_literals(self, literal):
        with pytest.raises(LiteralFormatError):
            UPPredicate.from_literal(literal)

    def test_canonicalize(self):
        assert predicate_service.canonicalize(UPPredicate("0", "1010")).literal == ";01"
        assert predicate_service.canonicalize(UPPredicate("111", "1")).literal == ";1"
        assert predicate_service.canonicalize(UPPredicate("10", "0")).literal == "1;0"

    def test_canonical_form_is_stable(self, rng):
        for _ in range(50):
            p = TestDataFactory.random_predicate(rng, 4, 4)
            c = predicate_service.canonicalize(p)
            assert c.is_canonical
            assert c.length <= p.length
            assert all(c.bit_at(n) == p.bit_at(n) for n in range(3 * p.length))

    def test_bit_at_and_phases(self):
        p = UPPredicate.from_literal("01;10")
        assert [predicate_service.bit_at(p, n) for n in range(7)] == [0, 1, 1, 0, 1, 0, 1]
        assert [p.next_phase(i) for i in range(4)] == [1, 2, 3, 2]
        with pytest.raises(ValueError):
            p.bit_at(-1)


class TestEnumeration:
    """Test cases for enumerating predicates."""

    def test_each_predicate_once(self):
        predicates = list(predicate_service.enumerate_predicates(2, 2))
        assert len(predicates) == len(set(predicates))
        assert all(p.is_canonical for p in predicates)
        assert UPPredicate("", "0") in predicates
        assert UPPredicate("0", "1") in predicates

    def test_words_are_distinct(self):
        predicates = list(predicate_service.enumerate_predicates(2, 3))
        prefixes = {tuple(p.bit_at(n) for n in range(16)) for p in predicates}
        assert len(prefixes) == len(predicates)


class TestDefiningFormula:
    """Test cases for the formula pinning a set to a predicate."""

    def test_formula_is_satisfied_exactly_by_its_set(self):
        candidates = list(predicate_service.enumerate_predicates(2, 2))
        order = TrackAssignment(("V",))
        for p in candidates:
            a = compiler_service.compile(predicate_service.up_to_formula(p, "V"), order)
            accepted = [q for q in candidates if automata_service.dpa_accepts_lasso(a, q.to_lasso())]
            assert accepted == [p]

    def test_formula_has_only_the_variable_free(self):
        f = predicate_service.up_to_formula(UPPredicate.from_literal("10;011"), "V")
        assert free_vars(f) == (frozenset(), frozenset({"V"}))
        assert compiler_service.model_check(f, {"V": UPPredicate.from_literal("100;110")})
        assert not compiler_service.model_check(f, {"V": UPPredicate.from_literal("10;01")})


class TestPeriodExtraction:
    """Test cases for reading a parameter off a selecting machine."""

    def test_all_ones_machine(self):
        m = CMachine(1, 0, ((0, 0),), ((1, 1),))
        assert predicate_service.extract_period_from_machine(m).literal == ";1"

    def test_negating_machine_reaches_the_bound(self):
        m = CMachine(1, 0, ((0, 0),), ((1, 0),))
        p = predicate_service.extract_period_from_machine(m)
        assert p.literal == ";10"
        assert len(p.to_lasso().cycle) == 2 * m.num_states

    def test_first_bit_zero(self):
        m = CMachine(1, 0, ((0, 0),), ((1, 1),))
        assert predicate_service.extract_period_from_machine(m, first_bit=0).literal == "0;1"

    def test_random_machines_respect_the_bound(self, rng):
        alpha = selection_formula("X", "P")
        for _ in range(50):
            m = TestDataFactory.random_cmachine(rng, rng.randint(1, 6))
            p = predicate_service.extract_period_from_machine(m)
            w = p.to_lasso()
            assert len(w.cycle) <= 2 * m.num_states
            assert len(w.prefix) + len(w.cycle) <= 2 * m.num_states
            assert p.bit_at(0) == 1
            x = strategy_service.run_on_lasso(m, w)
            assert compiler_service.model_check(alpha, {"X": UPPredicate.from_lasso(x), "P": p})

    def test_contradicted_claim(self):
        m = CMachine(1, 0, ((0, 0),), ((1, 0),))
        with pytest.raises(InconsistencyError):
            predicate_service.extract_period_from_machine(m, alpha=parse("all t. in(X,t)"))
