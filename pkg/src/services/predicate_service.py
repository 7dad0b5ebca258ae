"""
Ultimately periodic predicates: canonical forms, definitions by formulas
and period extraction from machines that predict their own input.
"""
import itertools
import logging
from typing import Iterator, Optional

from ..core.exceptions import InconsistencyError
from ..models.formula import (
    Formula,
    at_least,
    at_offset,
    at_position,
    conj,
    forall,
    fresh_name,
    iff,
    implies,
    member,
    neg,
    normalize,
    selection_formula,
)
from ..models.machine import CMachine
from ..models.predicate import UPPredicate
from .compiler_service import compiler_service
from .strategy_service import strategy_service

logger = logging.getLogger(__name__)


class PredicateService:
    """Service for ultimately periodic parameters"""

    def bit_at(self, p: UPPredicate, n: int) -> int:
        return p.bit_at(n)

    def canonicalize(self, p: UPPredicate) -> UPPredicate:
        return p.canonical()

    def enumerate_predicates(self, max_prefix: int, max_period: int) -> Iterator[UPPredicate]:
        """Every canonical predicate with a representation inside the bounds, once each"""
        seen = set()
        for prefix_len in range(max_prefix + 1):
            for period_len in range(1, max_period + 1):
                for prefix in itertools.product("01", repeat=prefix_len):
                    for period in itertools.product("01", repeat=period_len):
                        p = UPPredicate("".join(prefix), "".join(period)).canonical()
                        if p not in seen:
                            seen.add(p)
                            yield p

    def up_to_formula(self, p: UPPredicate, var: str) -> Formula:
        """Formula phi(var) satisfied exactly by the set p"""
        p = p.canonical()
        start = len(p.prefix)
        period = len(p.period)

        def literal(bit: int):
            return lambda s: member(var, s) if bit else neg(member(var, s))

        t = fresh_name("t")
        if period == 1:
            fixed = [at_position(n, literal(p.bit_at(n))) for n in range(start)]
            tail = forall(t, implies(at_least(t, start), literal(p.bit_at(start))(t)))
        else:
            fixed = [at_position(n, literal(p.bit_at(n))) for n in range(p.length)]
            tail = forall(
                t,
                implies(
                    at_least(t, start),
                    iff(member(var, t), at_offset(t, period, lambda w: member(var, w))),
                ),
            )
        return normalize(conj(*fixed, tail))

    def extract_period_from_machine(
        self,
        m: CMachine,
        alpha: Optional[Formula] = None,
        first_bit: int = 1,
        output_name: str = "X",
        param_name: str = "P",
    ) -> UPPredicate:
        """
        Run a causal machine that reads P and claims to output X(t) = P(t+1)
        on its own predictions: a_0 = first_bit, a_{t+1} = out(q_t, a_t).
        Only 2n pairs (state, bit) exist, so the run repeats after at most
        2n steps: prefix plus period is at most 2n and the period can equal
        2n (a 1-state machine negating its input yields ;10).
        """
        bound = 2 * m.num_states
        q, a = m.initial, first_bit
        seen = {}
        bits = []
        while (q, a) not in seen:
            seen[(q, a)] = len(bits)
            bits.append(a)
            q, a = m.step(q, a), m.output(q, a)
        start = seen[(q, a)]
        prefix, cycle = bits[:start], bits[start:]
        if len(cycle) > bound:
            raise InconsistencyError(f"period {len(cycle)} of a {m.num_states}-state machine exceeds {bound}")
        if len(prefix) + len(cycle) > bound:
            raise InconsistencyError(
                f"self-driven run of a {m.num_states}-state machine repeats after {len(bits)} > {bound} steps"
            )
        p = UPPredicate("".join(map(str, prefix)), "".join(map(str, cycle))).canonical()

        claim = alpha if alpha is not None else selection_formula(output_name, param_name)
        x = strategy_service.run_on_lasso(m, p.to_lasso())
        params = {output_name: UPPredicate.from_lasso(x), param_name: p}
        if not compiler_service.model_check(claim, params):
            logger.error(f"Machine output contradicts the claimed formula for P={p.literal}")
            raise InconsistencyError(f"machine output on P={p.literal} violates the claimed formula")
        return p


# Global predicate service instance
predicate_service = PredicateService()
