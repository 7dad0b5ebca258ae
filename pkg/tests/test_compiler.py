"""
Test cases for the formula compiler and the model checker
"""
import pytest

from src.core.config import settings
from src.core.exceptions import CapacityError, UnboundParameterError, UnboundVariableError
from src.models.automata import Lasso
from src.models.formula import free_vars, neg
from src.models.predicate import UPPredicate
from src.services.automata_service import automata_service
from src.services.compiler_service import TrackAssignment, compiler_service
from src.services.formula_parser import parse
from src.services.predicate_service import predicate_service
from src.services.strategy_service import strategy_service
from tests.conftest import SPEC_ORDER, TestDataFactory


def shifted(w: Lasso) -> Lasso:
    """The word w(1) w(2) ..."""
    if w.prefix:
        return Lasso(w.prefix[1:], w.cycle, w.width)
    return Lasso((), w.cycle[1:] + w.cycle[:1], w.width)


def flipped(w: Lasso) -> Lasso:
    return Lasso(tuple(1 - a for a in w.prefix), tuple(1 - a for a in w.cycle), 1)


def accepts(a, *tracks: Lasso) -> bool:
    return automata_service.dpa_accepts_lasso(a, Lasso.zip(list(tracks)))


SENTENCES = [
    "ex t. in(P,t)",
    "all t. ex u. (t < u & in(P,u))",
    "ex t. all u. (t < u -> ~in(P,u))",
    "in(P,0) & ~in(P,1)",
    "all t. (in(P,t) <-> in(Q,t+1))",
    "exset V. (V sub P & ~(V = {}) & all t. (in(V,t) -> in(Q,t)))",
    "P = {0}",
]


class TestCompile:
    """Test cases for compiling specifications over (X, Y, P)."""

    def test_copy_language(self, copy_dpa, rng):
        assert copy_dpa.width == 3
        for _ in range(20):
            x = TestDataFactory.random_lasso(rng, 1)
            p = TestDataFactory.random_lasso(rng, 1)
            assert accepts(copy_dpa, x, x, p)
            assert not accepts(copy_dpa, x, flipped(x), p)

    def test_prediction_language(self, prediction_dpa, rng):
        for _ in range(20):
            x = TestDataFactory.random_lasso(rng, 1)
            p = TestDataFactory.random_lasso(rng, 1)
            assert accepts(prediction_dpa, x, shifted(x), p)
            assert not accepts(prediction_dpa, x, flipped(shifted(x)), p)

    def test_psi_beta_language(self, psi_beta_dpa):
        some = UPPredicate.from_literal("0;1").to_lasso()
        none = UPPredicate.from_literal(";0").to_lasso()
        zero_only = UPPredicate.from_literal("1;0").to_lasso()
        ones = UPPredicate.from_literal(";1").to_lasso()
        assert accepts(psi_beta_dpa, ones, zero_only, some)
        assert not accepts(psi_beta_dpa, ones, ones, some)
        assert accepts(psi_beta_dpa, none, ones, none)
        assert not accepts(psi_beta_dpa, ones, zero_only, none)

    def test_unused_tracks_are_unconstrained(self, rng):
        a = TestDataFactory.spec_dpa("all t. in(Y,t)")
        ones = Lasso((), (1,), 1)
        for _ in range(10):
            x = TestDataFactory.random_lasso(rng, 1)
            p = TestDataFactory.random_lasso(rng, 1)
            assert accepts(a, x, ones, p)

    def test_result_is_minimal(self, copy_dpa):
        assert automata_service.minimize_dpa(copy_dpa) == copy_dpa
        assert copy_dpa.num_states == 2

    def test_first_order_free_variable_gets_singleton_track(self):
        a = compiler_service.compile(parse("in(X,t)"), TrackAssignment(("X", "t"), frozenset({"t"})))
        x = Lasso((0, 1), (0,), 1)
        assert accepts(a, x, Lasso((0, 1), (0,), 1))
        assert not accepts(a, x, Lasso((1,), (0,), 1))
        assert not accepts(a, x, Lasso((), (0,), 1))

    def test_fixed_parameters_are_folded(self):
        f = parse("all t. (in(P,t) -> in(Y,t))")
        p = UPPredicate.from_literal("01;10")
        a = compiler_service.compile(f, TrackAssignment(("Y",)), fixed={"P": p})
        assert a.width == 1
        assert automata_service.dpa_accepts_lasso(a, p.to_lasso())
        assert not automata_service.dpa_accepts_lasso(a, Lasso((), (0,), 1))

    def test_sugar_matches_expansion(self, rng):
        pairs = [
            ("X sub Y", "all t. (in(X,t) -> in(Y,t))"),
            ("X = Y", "all t. (in(X,t) <-> in(Y,t))"),
            ("X = {}", "all t. ~in(X,t)"),
            ("unique t. in(X,t)", "ex t. (in(X,t) & all u. (in(X,u) -> u = t))"),
            (
                "all t. (in(X,t) -> in(Y,t+1))",
                "all t. all u. ((t < u & ~(ex s. (t < s & s < u)) & in(X,t)) -> in(Y,u))",
            ),
        ]
        order = TrackAssignment(("X", "Y"))
        for sugar, expansion in pairs:
            a = compiler_service.compile(parse(sugar), order)
            b = compiler_service.compile(parse(expansion), order)
            for w in TestDataFactory.random_lassos(rng, 2, 15):
                assert automata_service.dpa_accepts_lasso(a, w) == automata_service.dpa_accepts_lasso(b, w)

    def test_missing_track_is_unbound(self):
        with pytest.raises(UnboundVariableError):
            compiler_service.compile(parse("in(X,0) & in(Z,0)"), TrackAssignment(("X",)))

    def test_track_limit(self):
        settings.MAX_TRACKS = 2
        with pytest.raises(CapacityError):
            compiler_service.compile(parse("X = Y"), SPEC_ORDER)

    def test_internal_limit_counts_quantified_tracks_only(self):
        f = parse("exset V. (V sub X & V = Y & V sub P)", declared=["X", "Y", "P"])
        settings.MAX_TRACKS = 3
        settings.MAX_INTERNAL_TRACKS = 4
        compiler_service.clear_cache()
        assert compiler_service.compile(f, SPEC_ORDER).width == 3
        settings.MAX_INTERNAL_TRACKS = 3
        compiler_service.clear_cache()
        with pytest.raises(CapacityError):
            compiler_service.compile(f, SPEC_ORDER)
        compiler_service.clear_cache()

    def test_state_cap_reaches_compiler(self):
        settings.STATE_CAP = 3
        compiler_service.clear_cache()
        with pytest.raises(CapacityError):
            compiler_service.compile(parse("all t. (in(Y,t) <-> in(X,t+3))"), SPEC_ORDER)
        compiler_service.clear_cache()


class TestModelCheck:
    """Test cases for deciding sentences over UP parameters."""

    def test_existence_of_a_one(self):
        f = parse("ex t. in(P,t)")
        assert compiler_service.model_check(f, {"P": UPPredicate.from_literal("1;0")})
        assert not compiler_service.model_check(f, {"P": UPPredicate.from_literal(";0")})

    def test_closed_sentences(self):
        assert compiler_service.model_check(parse("all t. ex u. t < u"), {})
        assert not compiler_service.model_check(parse("ex t. all u. u < t"), {})
        assert compiler_service.model_check(parse("exset V. (ex t. in(V,t))"), {})

    @pytest.mark.parametrize("text", SENTENCES)
    def test_agrees_with_tracked_run(self, text):
        f = parse(text)
        names = sorted(free_vars(f)[1])
        predicates = list(predicate_service.enumerate_predicates(1, 2))
        for p in predicates:
            for q in predicates[:3]:
                params = {"P": p, "Q": q}
                bound = {name: params[name] for name in names}
                assert compiler_service.model_check(f, bound) == compiler_service.model_check_tracked(f, bound)

    @pytest.mark.parametrize("text", SENTENCES)
    def test_negation_flips_the_verdict(self, text, rng):
        f = parse(text)
        for _ in range(5):
            params = {"P": TestDataFactory.random_predicate(rng), "Q": TestDataFactory.random_predicate(rng)}
            used = {name: params[name] for name in free_vars(f)[1]}
            assert compiler_service.model_check(neg(f), used) != compiler_service.model_check(f, used)

    def test_unbound_parameter(self):
        with pytest.raises(UnboundParameterError):
            compiler_service.model_check(parse("ex t. in(P,t)"), {})

    def test_free_position_is_rejected(self):
        with pytest.raises(UnboundVariableError):
            compiler_service.model_check(parse("in(P,t)"), {"P": UPPredicate.from_literal(";1")})

    def test_unique_witness_is_pinned(self):
        p = UPPredicate.from_literal("0;110")
        sentence = parse("exset V. (all t. (in(V,t) <-> in(P,t+1)) & in(V,1))")
        assert compiler_service.model_check(sentence, {"P": p})
        sentence = parse("exset V. (all t. (in(V,t) <-> in(P,t+1)) & in(V,2))")
        assert not compiler_service.model_check(sentence, {"P": p})

    def test_definable_bit_reads_the_defined_set(self):
        p = UPPredicate.from_literal("01;10")
        psi = parse("all t. (in(V,t) <-> in(P,t))")
        for n in range(7):
            assert compiler_service.definable_bit(psi, "V", n, {"P": p}) == bool(p.bit_at(n))


class TestMachineFormula:
    """Test cases for the formula defining a machine's graph."""

    @pytest.mark.parametrize("machine", [TestDataFactory.copy_machine(), TestDataFactory.delay_machine()])
    def test_graph_formula(self, machine, rng):
        a = compiler_service.compile(compiler_service.machine_to_formula(machine), TrackAssignment(("X", "Y")))
        for _ in range(15):
            x = TestDataFactory.random_lasso(rng, 1)
            y = strategy_service.run_on_lasso(machine, x)
            assert accepts(a, x, y)
            assert not accepts(a, x, flipped(y))

    def test_strongly_causal_graph_formula(self, rng):
        m = TestDataFactory.random_scmachine(rng, 2)
        a = compiler_service.compile(compiler_service.machine_to_formula(m, "Y", "X"), TrackAssignment(("X", "Y")))
        for _ in range(10):
            y = TestDataFactory.random_lasso(rng, 1)
            x = strategy_service.run_on_lasso(m, y)
            assert accepts(a, x, y)
            assert not accepts(a, flipped(x), y)


HORIZON = 24
# every test word is periodic from position 3 with a period dividing 6
TAIL = range(12, HORIZON)
SPAN = range(HORIZON)
LITERALS = ["1;0", ";0", ";1", "0;1", ";10", "01;10"]


def bits(w: Lasso):
    return lambda n: w.letter_at(n)


GOLDEN_LANGUAGES = [
    ("all t. (in(X,t) -> in(Y,t))", lambda x, y, p: all(y(n) for n in SPAN if x(n))),
    ("ex t. (in(X,t) & in(Y,t))", lambda x, y, p: any(x(n) and y(n) for n in SPAN)),
    ("all t. (in(Y,t+1) <-> in(X,t))", lambda x, y, p: all(y(n + 1) == x(n) for n in SPAN)),
    ("in(X,0) & ~in(Y,1)", lambda x, y, p: x(0) == 1 and y(1) == 0),
    (
        "ex t. ex u. (t < u & in(X,t) & in(Y,u))",
        lambda x, y, p: any(x(n) and any(y(m) for m in range(n + 1, n + HORIZON)) for n in SPAN),
    ),
    ("ex t. (t <= 2 & in(X,t))", lambda x, y, p: any(x(n) for n in range(3))),
    (
        "all t. all u. ((in(X,t) & in(X,u)) -> t = u)",
        lambda x, y, p: sum(x(n) for n in SPAN) <= 1,
    ),
    ("atmost1 t. in(Y,t)", lambda x, y, p: sum(y(n) for n in SPAN) <= 1),
    ("unique t. in(P,t)", lambda x, y, p: sum(p(n) for n in SPAN) == 1),
    ("Y sub P", lambda x, y, p: all(p(n) for n in SPAN if y(n))),
    ("Y = {0}", lambda x, y, p: y(0) == 1 and not any(y(n) for n in SPAN[1:])),
    ("X = {}", lambda x, y, p: not any(x(n) for n in SPAN)),
    ("X = P", lambda x, y, p: all(x(n) == p(n) for n in SPAN)),
    ("all t. ex u. (t < u & in(X,u))", lambda x, y, p: any(x(n) for n in TAIL)),
    ("ex t. all u. (t < u -> ~in(Y,u))", lambda x, y, p: not any(y(n) for n in TAIL)),
    (
        "all t. (t > 0 -> (in(P,t) <-> in(P,t+2)))",
        lambda x, y, p: all(p(n) == p(n + 2) for n in SPAN[1:]),
    ),
    (
        "exset V. (V sub X & all t. (in(V,t) <-> ~in(V,t+1)))",
        lambda x, y, p: all(x(n) for n in SPAN[::2]) or all(x(n) for n in SPAN[1::2]),
    ),
    ("allset V. (X sub V -> ~(V = {}))", lambda x, y, p: any(x(n) for n in SPAN)),
    (
        "exset V. exset W. (V sub X & W sub Y & ~(V = {}) & ~(W = {})"
        " & all t. all u. ((in(V,t) & in(W,u)) -> t < u))",
        lambda x, y, p: any(x(n) and any(y(m) for m in range(n + 1, n + HORIZON)) for n in SPAN),
    ),
]

PARAMETER_LANGUAGES = [
    ("all t. (in(P,t) -> in(Y,t))", lambda x, y, p: all(y(n) for n in SPAN if p(n))),
    ("Y sub P", lambda x, y, p: all(p(n) for n in SPAN if y(n))),
    ("X = P", lambda x, y, p: all(x(n) == p(n) for n in SPAN)),
    ("unique t. in(P,t)", lambda x, y, p: sum(p(n) for n in SPAN) == 1),
    (
        "all t. (t > 0 -> (in(P,t) <-> in(P,t+2)))",
        lambda x, y, p: all(p(n) == p(n + 2) for n in SPAN[1:]),
    ),
]


def golden_words(rng):
    literal = [UPPredicate.from_literal(text).to_lasso() for text in LITERALS]
    triples = [(w, w, w) for w in literal]
    triples += [(literal[i], literal[-1 - i], literal[(i + 2) % len(literal)]) for i in range(len(literal))]
    triples += [tuple(TestDataFactory.random_lassos(rng, 1, 3)) for _ in range(25)]
    return triples


@pytest.mark.slow
class TestGoldenLanguages:
    """Test cases comparing compiled automata with direct evaluation on lassos."""

    @pytest.mark.parametrize("text, oracle", GOLDEN_LANGUAGES, ids=[text for text, _ in GOLDEN_LANGUAGES])
    def test_language(self, text, oracle, rng):
        a = TestDataFactory.spec_dpa(text)
        for x, y, p in golden_words(rng):
            assert accepts(a, x, y, p) == oracle(bits(x), bits(y), bits(p)), f"{text} on {x}, {y}, {p}"

    @pytest.mark.parametrize("text, oracle", PARAMETER_LANGUAGES, ids=[text for text, _ in PARAMETER_LANGUAGES])
    def test_folded_parameter(self, text, oracle, rng):
        f = parse(text, declared=["X", "Y", "P"])
        for literal in LITERALS:
            p = UPPredicate.from_literal(literal)
            a = compiler_service.compile(f, TrackAssignment(("X", "Y")), fixed={"P": p})
            assert a.width == 2
            for _ in range(20):
                x, y = TestDataFactory.random_lassos(rng, 1, 2)
                assert accepts(a, x, y) == oracle(bits(x), bits(y), bits(p.to_lasso())), f"{text} with P={literal}"
