"""
MLO abstract syntax over the natural numbers with order.

Normal form keeps only the atoms t < u, t = u, t in V together with
negation, conjunction and existential quantification. Every other
connective and derived form is produced by the builders below, which
desugar on construction.
"""
import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from ..core.exceptions import RoleConflictError

RESERVED_PREFIX = "#"

_fresh_counter = itertools.count()


@dataclass(frozen=True)
class Span:
    """Source position of a node, 1-based"""
    line: int
    column: int


class Formula:
    """Base class of formula nodes"""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Member(Formula):
    """First-order term `term` belongs to the set `var`"""
    var: str
    term: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula
    second_order: bool = False
    span: Optional[Span] = field(default=None, compare=False, repr=False)


ATOMS = (Less, Equal, Member)


class Role(str, enum.Enum):
    """Role of a free variable in a synthesis specification"""
    INPUT = "input"
    OUTPUT = "output"
    PARAMETER = "parameter"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class VarRole:
    name: str
    role: Role


def fresh_name(prefix: str = "v") -> str:
    """A name that cannot clash with user identifiers."""
    return f"{RESERVED_PREFIX}{prefix}{next(_fresh_counter)}"


# Constants

TRUE: Formula = Not(Exists("t", Less("t", "t")))
FALSE: Formula = Exists("t", Less("t", "t"))


# Builders

def less(left: str, right: str) -> Formula:
    return Less(left, right)


def equal(left: str, right: str) -> Formula:
    return Equal(left, right)


def member(var: str, term: str) -> Formula:
    return Member(var, term)


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.body
    return Not(f)


def _balanced(parts: List[Formula]) -> Formula:
    if len(parts) == 1:
        return parts[0]
    middle = len(parts) // 2
    return And(_balanced(parts[:middle]), _balanced(parts[middle:]))


def conj(*formulas: Formula) -> Formula:
    """Conjunction as a balanced tree; TRUE operands vanish, FALSE absorbs."""
    parts = []
    for f in formulas:
        if f == FALSE:
            return FALSE
        if f != TRUE:
            parts.append(f)
    if not parts:
        return TRUE
    return _balanced(parts)


def disj(*formulas: Formula) -> Formula:
    return neg(conj(*(neg(f) for f in formulas)))


def implies(premise: Formula, conclusion: Formula) -> Formula:
    return disj(neg(premise), conclusion)


def iff(left: Formula, right: Formula) -> Formula:
    return conj(implies(left, right), implies(right, left))


def exists(var: str, body: Formula, second_order: bool = False) -> Formula:
    return Exists(var, body, second_order)


def forall(var: str, body: Formula, second_order: bool = False) -> Formula:
    return neg(Exists(var, neg(body), second_order))


def exists_all(names: Iterable[str], body: Formula, second_order: bool = False) -> Formula:
    """Existential block; the first name is outermost."""
    result = body
    for name in reversed(list(names)):
        result = Exists(name, result, second_order)
    return result


def forall_all(names: Iterable[str], body: Formula, second_order: bool = False) -> Formula:
    return neg(exists_all(names, neg(body), second_order))


def is_first(t: str) -> Formula:
    """first(t): no position precedes t"""
    s = fresh_name("s")
    return neg(exists(s, less(s, t)))


def successor(t: str, u: str) -> Formula:
    """u = t + 1"""
    s = fresh_name("s")
    return conj(less(t, u), neg(exists(s, conj(less(t, s), less(s, u)))))


def at_offset(t: str, offset: int, body: Callable[[str], Formula]) -> Formula:
    """body applied to the term t + offset"""
    if offset == 0:
        return body(t)
    u = fresh_name("u")
    return exists(u, conj(successor(t, u), at_offset(u, offset - 1, body)))


def at_position(n: int, body: Callable[[str], Formula]) -> Formula:
    """body applied to the numeral n"""
    s = fresh_name("n")
    return exists(s, conj(is_first(s), at_offset(s, n, body)))


def at_least(t: str, n: int) -> Formula:
    """t >= n for a numeral n"""
    if n == 0:
        return TRUE
    return at_position(n, lambda s: neg(less(t, s)))


def subset(small: str, large: str) -> Formula:
    t = fresh_name("t")
    return forall(t, implies(member(small, t), member(large, t)))


def set_equal(left: str, right: str) -> Formula:
    t = fresh_name("t")
    return forall(t, iff(member(left, t), member(right, t)))


def is_empty(var: str) -> Formula:
    t = fresh_name("t")
    return forall(t, neg(member(var, t)))


def is_zero_singleton(var: str) -> Formula:
    """var = {0}"""
    t = fresh_name("t")
    return forall(t, iff(member(var, t), is_first(t)))


def at_most_one(var: str, body: Formula) -> Formula:
    other = fresh_name("t")
    renamed = rename_free(body, var, other)
    return forall_all([var, other], implies(conj(body, renamed), equal(var, other)))


def exists_unique(var: str, body: Formula) -> Formula:
    return conj(exists(var, body), at_most_one(var, body))


def selection_formula(x: str = "X", p: str = "P") -> Formula:
    """x(t) <-> p(t+1) for every t"""
    t = fresh_name("t")
    return forall(t, iff(member(x, t), at_offset(t, 1, lambda u: member(p, u))))


# Syntactic queries

def free_vars(f: Formula) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """Free first-order and second-order variables"""
    first_order: Set[str] = set()
    second_order: Set[str] = set()

    def visit(g: Formula, bound: FrozenSet[str]) -> None:
        if isinstance(g, (Less, Equal)):
            for name in (g.left, g.right):
                if name not in bound:
                    first_order.add(name)
        elif isinstance(g, Member):
            if g.var not in bound:
                second_order.add(g.var)
            if g.term not in bound:
                first_order.add(g.term)
        elif isinstance(g, Not):
            visit(g.body, bound)
        elif isinstance(g, And):
            visit(g.left, bound)
            visit(g.right, bound)
        elif isinstance(g, Exists):
            visit(g.body, bound | {g.var})
        else:
            raise TypeError(f"not a formula node: {g!r}")

    visit(f, frozenset())
    return frozenset(first_order), frozenset(second_order)


def free_names(f: Formula) -> FrozenSet[str]:
    first_order, second_order = free_vars(f)
    return first_order | second_order


def all_names(f: Formula) -> Set[str]:
    """Every variable name occurring in f, bound or free"""
    names: Set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Less, Equal)):
            names.update((g.left, g.right))
        elif isinstance(g, Member):
            names.update((g.var, g.term))
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, And):
            stack.extend((g.left, g.right))
        elif isinstance(g, Exists):
            names.add(g.var)
            stack.append(g.body)
    return names


def bound_set_names(f: Formula) -> Set[str]:
    """Names bound by second-order quantifiers"""
    names: Set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, And):
            stack.extend((g.left, g.right))
        elif isinstance(g, Exists):
            if g.second_order:
                names.add(g.var)
            stack.append(g.body)
    return names


def size(f: Formula) -> int:
    count = 0
    stack = [f]
    while stack:
        g = stack.pop()
        count += 1
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, And):
            stack.extend((g.left, g.right))
        elif isinstance(g, Exists):
            stack.append(g.body)
    return count


def rename_free(f: Formula, old: str, new: str) -> Formula:
    """Replace free occurrences of `old` by `new`; `new` must not be bound in f."""

    def go(g: Formula) -> Formula:
        if isinstance(g, Less):
            return Less(new if g.left == old else g.left, new if g.right == old else g.right, g.span)
        if isinstance(g, Equal):
            return Equal(new if g.left == old else g.left, new if g.right == old else g.right, g.span)
        if isinstance(g, Member):
            return Member(new if g.var == old else g.var, new if g.term == old else g.term, g.span)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Exists):
            if g.var == old:
                return g
            return Exists(g.var, go(g.body), g.second_order, g.span)
        raise TypeError(f"not a formula node: {g!r}")

    return go(f)


def substitute_param(f: Formula, param: str, fresh: str) -> Formula:
    """Replace the free parameter `param` by the second-order variable `fresh`."""
    if fresh in all_names(f):
        raise RoleConflictError(f"substitution target '{fresh}' already occurs in the formula")
    return rename_free(f, param, fresh)


# Canonical naming

def normalize(f: Formula) -> Formula:
    """
    Alpha-rename bound variables so that no binder shadows another binder
    or a free variable and no reserved name survives. User names are kept
    wherever they are already unambiguous, so the result is idempotent.
    """
    free = free_names(f)
    taken = free | {n for n in all_names(f) if not n.startswith(RESERVED_PREFIX)}

    def pick(base: str, path: FrozenSet[str]) -> str:
        i = 1
        while f"{base}{i}" in taken or f"{base}{i}" in path:
            i += 1
        return f"{base}{i}"

    def go(g: Formula, env: Dict[str, str], path: FrozenSet[str]) -> Formula:
        if isinstance(g, Less):
            return Less(env.get(g.left, g.left), env.get(g.right, g.right), g.span)
        if isinstance(g, Equal):
            return Equal(env.get(g.left, g.left), env.get(g.right, g.right), g.span)
        if isinstance(g, Member):
            return Member(env.get(g.var, g.var), env.get(g.term, g.term), g.span)
        if isinstance(g, Not):
            return Not(go(g.body, env, path))
        if isinstance(g, And):
            return And(go(g.left, env, path), go(g.right, env, path))
        if isinstance(g, Exists):
            name = g.var
            if name.startswith(RESERVED_PREFIX) or name in path or name in free:
                name = pick("S" if g.second_order else "t", path)
            inner = dict(env)
            inner[g.var] = name
            return Exists(name, go(g.body, inner, path | {name}), g.second_order, g.span)
        raise TypeError(f"not a formula node: {g!r}")

    return go(f, {}, frozenset())


# Printing

def to_text(f: Formula) -> str:
    """Render in the specification grammar; parse inverts this on normal forms."""
    if isinstance(f, Less):
        return f"{f.left} < {f.right}"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    if isinstance(f, Member):
        return f"in({f.var},{f.term})"
    if isinstance(f, Not):
        inner = to_text(f.body)
        if isinstance(f.body, (And, Exists, Less, Equal)):
            inner = f"({inner})"
        return f"~{inner}"
    if isinstance(f, And):
        left = to_text(f.left)
        right = to_text(f.right)
        if isinstance(f.left, Exists):
            left = f"({left})"
        if isinstance(f.right, (And, Exists)):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(f, Exists):
        keyword = "exset" if f.second_order else "ex"
        return f"{keyword} {f.var}. {to_text(f.body)}"
    raise TypeError(f"not a formula node: {f!r}")
