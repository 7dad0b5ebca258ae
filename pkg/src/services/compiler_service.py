"""
MLO to automata compiler, model checker and machine-to-formula encoder.

Compilation works bottom-up over the normal form. Each subformula is
compiled over its own free variables in lexicographic order and is
widened on demand. Negation is pushed to the leaves as a polarity flag:
atoms are weak DPAs, conjunction under positive polarity intersects,
under negative polarity it unites the negated operands, an existential
quantifier projects a Buchi automaton, and a negated existential pays for
one determinization.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.config import settings
from ..core.exceptions import CapacityError, UnboundParameterError, UnboundVariableError
from ..models.automata import DPA, NBA, Lasso
from ..models.formula import (
    FALSE,
    And,
    Equal,
    Exists,
    Formula,
    Less,
    Member,
    Not,
    at_position,
    conj,
    disj,
    exists,
    exists_all,
    forall,
    forall_all,
    fresh_name,
    free_vars,
    iff,
    implies,
    is_first,
    member,
    neg,
    rename_free,
    successor,
)
from ..models.machine import Machine, SCMachine
from ..models.predicate import UPPredicate
from .automata_service import automata_service

logger = logging.getLogger(__name__)

Automaton = Union[DPA, NBA]

CACHE_LIMIT = 20000


@dataclass(frozen=True)
class TrackAssignment:
    """Variable order of a compiled automaton; track i carries names[i]"""
    names: Tuple[str, ...]
    first_order: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"track assignment is not injective: {self.names}")
        if not self.first_order <= set(self.names):
            raise ValueError("first-order variables must have tracks")

    @classmethod
    def lexicographic(cls, formula: Formula, exclude: Iterable[str] = ()) -> "TrackAssignment":
        first_order, second_order = free_vars(formula)
        skip = set(exclude)
        names = tuple(sorted((first_order | second_order) - skip))
        return cls(names, frozenset(first_order - skip))

    @property
    def width(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class _Compiled:
    names: Tuple[str, ...]
    automaton: Automaton


FixedKey = Tuple[Tuple[str, UPPredicate], ...]


class CompilerService:
    """Service compiling formulas to automata and deciding sentences"""

    def __init__(self):
        self._cache: Dict[Tuple[Formula, bool, FixedKey], _Compiled] = {}

    def clear_cache(self) -> None:
        self._cache.clear()

    # Public operations

    def compile(
        self,
        f: Formula,
        order: Optional[TrackAssignment] = None,
        fixed: Optional[Mapping[str, UPPredicate]] = None,
    ) -> DPA:
        """
        DPA over the tracks of `order` accepting exactly the track words that
        satisfy f. Parameters in `fixed` are folded into the automaton instead
        of getting a track. Tracks of `order` not free in f are unconstrained.
        """
        fixed = dict(fixed or {})
        if order is None:
            order = TrackAssignment.lexicographic(f, exclude=fixed)
        if order.width > settings.MAX_TRACKS:
            raise CapacityError(f"{order.width} tracks exceed the limit of {settings.MAX_TRACKS}")
        first_order, second_order = free_vars(f)
        missing = sorted((first_order | second_order) - set(order.names) - set(fixed))
        if missing:
            raise UnboundVariableError(missing[0])

        compiled = self._build(f, False, fixed)
        singletons = set(order.first_order) | (first_order - set(fixed))
        for name in sorted(singletons):
            compiled = self._combine(compiled, self._singleton(name), union=False)
        positions = [order.index(name) for name in compiled.names]
        automaton = compiled.automaton
        if isinstance(automaton, NBA):
            automaton = automata_service.determinize(automaton)
        result = automata_service.minimize_dpa(
            automata_service.reindex_dpa(automaton, order.width, positions)
        )
        logger.debug(f"Compiled formula over tracks {order.names} to {result.num_states}-state DPA")
        return result

    def model_check(self, f: Formula, params: Mapping[str, UPPredicate]) -> bool:
        """Truth of a sentence over the naturals expanded by UP parameters"""
        first_order, second_order = free_vars(f)
        if first_order:
            raise UnboundVariableError(sorted(first_order)[0])
        missing = sorted(second_order - set(params))
        if missing:
            raise UnboundParameterError(f"parameter '{missing[0]}' has no binding")
        fixed = {name: params[name] for name in second_order}

        negated = False
        while isinstance(f, Not):
            f = f.body
            negated = not negated
        f, fixed = self._pin_unique_witnesses(f, fixed)

        compiled = self._build(f, False, fixed)
        automaton = compiled.automaton
        if isinstance(automaton, NBA):
            holds = not automata_service.nba_is_empty(automaton)
        else:
            holds = automata_service.dpa_accepts_lasso(automaton, Lasso((), (0,), 0))
        return holds != negated

    def model_check_tracked(self, f: Formula, params: Mapping[str, UPPredicate]) -> bool:
        """
        Same verdict as model_check, computed by giving every parameter a
        track and running the compiled DPA on the zipped parameter lasso.
        """
        first_order, second_order = free_vars(f)
        if first_order:
            raise UnboundVariableError(sorted(first_order)[0])
        missing = sorted(second_order - set(params))
        if missing:
            raise UnboundParameterError(f"parameter '{missing[0]}' has no binding")
        order = TrackAssignment(tuple(sorted(second_order)))
        a = self.compile(f, order)
        word = Lasso.zip([params[name].to_lasso() for name in order.names])
        return automata_service.dpa_accepts_lasso(a, word)

    def definable_bit(self, psi: Formula, var: str, n: int, params: Mapping[str, UPPredicate]) -> bool:
        """Whether n belongs to some set satisfying psi(var)"""
        sentence = exists(var, conj(psi, at_position(n, lambda s: member(var, s))), second_order=True)
        return self.model_check(sentence, params)

    def machine_to_formula(self, m: Machine, input_name: str = "X", output_name: str = "Y") -> Formula:
        """
        Formula defining the graph of the machine's operator: one set per
        state holds the positions at which the run is in that state.
        """
        states = [fresh_name("R") for _ in range(m.num_states)]
        t, u = fresh_name("t"), fresh_name("t")

        def letter(t_name: str, a: int) -> Formula:
            return member(input_name, t_name) if a else neg(member(input_name, t_name))

        in_one_state = forall(
            t,
            conj(
                disj(*(member(s, t) for s in states)),
                *(
                    neg(conj(member(states[p], t), member(states[q], t)))
                    for p in range(m.num_states)
                    for q in range(p + 1, m.num_states)
                ),
            ),
        )
        starts = exists(t, conj(is_first(t), member(states[m.initial], t)))
        moves = forall_all(
            [t, u],
            implies(
                successor(t, u),
                conj(
                    *(
                        implies(
                            conj(member(states[q], t), letter(t, a)),
                            member(states[m.transitions[q][a]], u),
                        )
                        for q in range(m.num_states)
                        for a in (0, 1)
                    )
                ),
            ),
        )
        outputs = []
        for q in range(m.num_states):
            if isinstance(m, SCMachine):
                emitted = conj() if m.outputs[q] else FALSE
            else:
                emitted = disj(*(letter(t, a) for a in (0, 1) if m.outputs[q][a]))
            outputs.append(implies(member(states[q], t), iff(member(output_name, t), emitted)))
        emits = forall(t, conj(*outputs))
        return exists_all(states, conj(in_one_state, starts, moves, emits), second_order=True)

    # Compilation core

    def _build(self, f: Formula, negate: bool, fixed: Mapping[str, UPPredicate]) -> _Compiled:
        key = (f, negate, tuple(sorted(fixed.items())))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._build_uncached(f, negate, fixed)
        if len(result.names) > settings.MAX_INTERNAL_TRACKS:
            raise CapacityError(
                f"intermediate automaton needs {len(result.names)} tracks, "
                f"limit is {settings.MAX_INTERNAL_TRACKS}"
            )
        if len(self._cache) >= CACHE_LIMIT:
            self._cache.clear()
        self._cache[key] = result
        return result

    def _build_uncached(self, f: Formula, negate: bool, fixed: Mapping[str, UPPredicate]) -> _Compiled:
        if isinstance(f, Not):
            return self._build(f.body, not negate, fixed)

        if isinstance(f, (Less, Equal, Member)):
            atom = self._atom(f, fixed)
            if negate:
                return _Compiled(atom.names, automata_service.dpa_complement(atom.automaton))
            return atom

        if isinstance(f, And):
            left = self._build(f.left, negate, fixed)
            right = self._build(f.right, negate, fixed)
            return self._combine(left, right, union=negate)

        if isinstance(f, Exists):
            body = self._build(f.body, False, fixed)
            if f.var not in body.names:
                if negate:
                    return self._negate(body)
                return body
            if not f.second_order:
                body = self._combine(body, self._singleton(f.var), union=False)
            track = body.names.index(f.var)
            projected = automata_service.nba_project(self._as_nba(body.automaton), track)
            names = body.names[:track] + body.names[track + 1:]
            result = _Compiled(names, projected)
            if negate:
                return self._negate(result)
            return result

        raise TypeError(f"not a formula node: {f!r}")

    def _negate(self, compiled: _Compiled) -> _Compiled:
        automaton = compiled.automaton
        if isinstance(automaton, NBA):
            automaton = automata_service.determinize(automaton)
        return _Compiled(compiled.names, automata_service.dpa_complement(automaton))

    def _as_nba(self, automaton: Automaton) -> NBA:
        if isinstance(automaton, NBA):
            return automaton
        return automata_service.dpa_to_nba(automaton)

    def _widen(self, compiled: _Compiled, names: Sequence[str]) -> Automaton:
        if tuple(names) == compiled.names:
            return compiled.automaton
        positions = [names.index(n) for n in compiled.names]
        if isinstance(compiled.automaton, DPA):
            return automata_service.reindex_dpa(compiled.automaton, len(names), positions)
        return automata_service.reindex_nba(compiled.automaton, len(names), positions)

    def _combine(self, left: _Compiled, right: _Compiled, union: bool) -> _Compiled:
        names = tuple(sorted(set(left.names) | set(right.names)))
        a = self._widen(left, names)
        b = self._widen(right, names)
        if isinstance(a, DPA) and isinstance(b, DPA):
            if not automata_service.is_weak(b) and automata_service.is_weak(a):
                a, b = b, a
            if automata_service.is_weak(b):
                if union:
                    return _Compiled(names, automata_service.dpa_union_weak(a, b))
                return _Compiled(names, automata_service.dpa_intersect_weak(a, b))
        if union:
            return _Compiled(names, automata_service.nba_union(self._as_nba(a), self._as_nba(b)))
        return _Compiled(names, automata_service.nba_intersect(self._as_nba(a), self._as_nba(b)))

    # Atoms

    def _singleton(self, t: str) -> _Compiled:
        """Track t carries exactly one 1"""
        steps = {("none", 0): "none", ("none", 1): "one", ("one", 0): "one", ("one", 1): "sink"}
        dpa = automata_service.dpa_from_table(
            1,
            lambda s, letter: steps.get((s, letter), "sink"),
            lambda s: 0 if s == "one" else 1,
            "none",
        )
        return _Compiled((t,), dpa)

    def _atom(self, f: Formula, fixed: Mapping[str, UPPredicate]) -> _Compiled:
        if isinstance(f, Member) and f.var in fixed:
            return self._fixed_membership(f.term, fixed[f.var])

        if isinstance(f, (Less, Equal)) and f.left == f.right:
            if isinstance(f, Less):
                return _Compiled((f.left,), automata_service.empty_dpa(1))
            return self._singleton(f.left)

        if isinstance(f, Member):
            names = tuple(sorted((f.var, f.term)))
            var_track, term_track = names.index(f.var), names.index(f.term)

            def step(s, letter):
                at_term = (letter >> term_track) & 1
                if s == "sink" or not at_term:
                    return s
                if s == "done":
                    return "sink"
                return "done" if (letter >> var_track) & 1 else "sink"

            dpa = automata_service.dpa_from_table(2, step, lambda s: 0 if s == "done" else 1, "wait")
            return _Compiled(names, automata_service.minimize_dpa(dpa))

        names = tuple(sorted((f.left, f.right)))
        left_track, right_track = names.index(f.left), names.index(f.right)
        strict = isinstance(f, Less)

        def step(s, letter):
            x = (letter >> left_track) & 1
            y = (letter >> right_track) & 1
            if s == "sink":
                return s
            if s == "wait":
                if x and y:
                    return "sink" if strict else "done"
                if x:
                    return "left" if strict else "sink"
                return "sink" if y else "wait"
            if s == "left":
                if x:
                    return "sink"
                return "done" if y else "left"
            return "sink" if x or y else "done"

        dpa = automata_service.dpa_from_table(2, step, lambda s: 0 if s == "done" else 1, "wait")
        return _Compiled(names, automata_service.minimize_dpa(dpa))

    def _fixed_membership(self, term: str, p: UPPredicate) -> _Compiled:
        """Track `term` is a singleton {n} with n in the fixed predicate p"""

        def step(s, letter):
            if s in ("done", "sink"):
                return s if not letter else "sink"
            if not letter:
                return p.next_phase(s)
            return "done" if p.bit_at(s) else "sink"

        dpa = automata_service.dpa_from_table(1, step, lambda s: 0 if s == "done" else 1, 0)
        return _Compiled((term,), automata_service.minimize_dpa(dpa))

    # Sentences with uniquely determined set witnesses

    def _pin_unique_witnesses(
        self, f: Formula, fixed: Dict[str, UPPredicate]
    ) -> Tuple[Formula, Dict[str, UPPredicate]]:
        """
        In a leading block of set quantifiers, a variable V whose
        parameter-only conjuncts C(V) have exactly one model w is replaced
        by the fixed predicate w. If C(V) has no model the block is false.
        """
        block: List[str] = []
        body = f
        while isinstance(body, Exists) and body.second_order:
            block.append(body.var)
            body = body.body
        if not block:
            return f, fixed

        fixed = dict(fixed)
        conjuncts = _flatten_and(body)
        remaining_vars: List[str] = []
        for var in block:
            own = [c for c in conjuncts if _names(c) <= set(fixed) | {var} and var in _names(c)]
            witness = self._unique_model(conj(*own), var, fixed) if own else None
            if witness is None and own and self._unsatisfiable(conj(*own), var, fixed):
                return FALSE, fixed
            if witness is None:
                remaining_vars.append(var)
                continue
            pinned = fresh_name("pin")
            fixed[pinned] = witness
            conjuncts = [rename_free(c, var, pinned) for c in conjuncts if c not in own]
            logger.debug(f"Pinned set variable {var} to {witness.literal}")
        return exists_all(remaining_vars, conj(*conjuncts), second_order=True), fixed

    def _unique_model(self, c: Formula, var: str, fixed: Mapping[str, UPPredicate]) -> Optional[UPPredicate]:
        a = self.compile(c, TrackAssignment((var,)), fixed)
        witness = automata_service.nonemptiness_witness(a)
        if witness is None:
            return None
        target = UPPredicate.from_lasso(witness).canonical()
        exact = automata_service.minimize_dpa(self._word_dpa(target))
        others = automata_service.dpa_intersect_weak(a, automata_service.dpa_complement(exact))
        if automata_service.nonemptiness_witness(others) is not None:
            return None
        return target

    def _unsatisfiable(self, c: Formula, var: str, fixed: Mapping[str, UPPredicate]) -> bool:
        a = self.compile(c, TrackAssignment((var,)), fixed)
        return automata_service.nonemptiness_witness(a) is None

    def _word_dpa(self, p: UPPredicate) -> DPA:
        """Accepts exactly the characteristic word of p"""
        return automata_service.dpa_from_table(
            1,
            lambda s, letter: "sink" if s == "sink" or letter != p.bit_at(s) else p.next_phase(s),
            lambda s: 1 if s == "sink" else 0,
            0,
        )


def _flatten_and(f: Formula) -> List[Formula]:
    parts: List[Formula] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        else:
            parts.append(g)
    return parts


def _names(f: Formula) -> FrozenSet[str]:
    first_order, second_order = free_vars(f)
    return first_order | second_order


# Global compiler service instance
compiler_service = CompilerService()
