"""First-order formula syntax trees over a purely relational signature."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Mapping, Union

from ..errors import ArityError, FormulaError


@dataclass(frozen=True)
class Signature:
    """Relation symbols with their arities. Symbols in ``infix`` are written
    between their two arguments; by default that is every non-identifier symbol."""

    arities: Mapping[str, int]
    infix: frozenset = frozenset()

    def __post_init__(self):
        arities = dict(self.arities)
        for name, k in arities.items():
            if not isinstance(k, int) or k < 1:
                raise ArityError(f"arity of {name!r} must be a positive integer")
        infix = set(self.infix) | {s for s in arities if not s.isidentifier()}
        for s in infix:
            if arities.get(s) != 2:
                raise ArityError(f"infix symbol {s!r} must be binary")
        object.__setattr__(self, "arities", arities)
        object.__setattr__(self, "infix", frozenset(infix))

    def __hash__(self):
        return hash((tuple(sorted(self.arities.items())), self.infix))

    def arity(self, name: str) -> int:
        return self.arities[name]


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Rel, Eq, Top, Bot, Not, And, Or, Implies, Exists, Forall]

TRUE = Top()
FALSE = Bot()


@functools.lru_cache(maxsize=None)
def free_vars(phi: Formula) -> frozenset:
    match phi:
        case Rel(_, args):
            return frozenset(args)
        case Eq(l, r):
            return frozenset((l, r))
        case Top() | Bot():
            return frozenset()
        case Not(body):
            return free_vars(body)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(v, body) | Forall(v, body):
            return free_vars(body) - {v}
    raise TypeError(f"not a formula: {phi!r}")


def free_vars_in_order(phi: Formula) -> list[str]:
    """Free variables by first occurrence, left to right."""
    seen: list[str] = []

    def walk(f, bound):
        match f:
            case Rel(_, args):
                terms = args
            case Eq(l, r):
                terms = (l, r)
            case Top() | Bot():
                terms = ()
            case Not(body):
                return walk(body, bound)
            case And(l, r) | Or(l, r) | Implies(l, r):
                walk(l, bound)
                return walk(r, bound)
            case Exists(v, body) | Forall(v, body):
                return walk(body, bound | {v})
        for t in terms:
            if t not in bound and t not in seen:
                seen.append(t)

    walk(phi, frozenset())
    return seen


_SLOT_RE = re.compile(r"^v([1-9][0-9]*)$")


def variable_slots(phi: Formula, n: int | None = None) -> dict[str, int]:
    """Map each free variable to a slot index 0..n-1.

    ``v1, v2, ...`` take their own slot; any other free variable takes the lowest
    unused slot, in order of first occurrence.
    """
    names = free_vars_in_order(phi)
    slots: dict[str, int] = {}
    for name in names:
        m = _SLOT_RE.match(name)
        if m:
            slots[name] = int(m.group(1)) - 1
    taken = set(slots.values())
    nxt = 0
    for name in names:
        if name in slots:
            continue
        while nxt in taken:
            nxt += 1
        slots[name] = nxt
        taken.add(nxt)
    if n is not None:
        over = [v for v, i in slots.items() if i >= n]
        if over:
            raise FormulaError(
                f"free variable {over[0]!r} does not fit in {n} variable slot(s)")
    return slots


def min_vars(phi: Formula) -> int:
    slots = variable_slots(phi)
    return max(slots.values(), default=-1) + 1


# printing: precedence levels, higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3}


def to_text(phi: Formula, signature: Signature | None = None) -> str:
    """Render in the surface syntax; ``parse_formula`` reads it back to an equal tree."""
    infix = signature.infix if signature else frozenset()

    def go(f, ctx: int) -> str:
        match f:
            case Top():
                return "true"
            case Bot():
                return "false"
            case Rel(name, args):
                if name in infix or not name.isidentifier():
                    return f"{args[0]} {name} {args[1]}"
                return f"{name}({', '.join(args)})"
            case Eq(l, r):
                return f"{l} = {r}"
            case Not(body):
                inner = go(body, 4)
                if isinstance(body, Eq) or (
                        isinstance(body, Rel) and (body.name in infix or not body.name.isidentifier())):
                    inner = f"({inner})"
                return "!" + inner
            case And(l, r) | Or(l, r) | Implies(l, r):
                p = _PREC[type(f)]
                op = {And: "&", Or: "|", Implies: "->"}[type(f)]
                if isinstance(f, Implies):
                    # right associative
                    s = f"{go(l, p + 1)} {op} {go(r, p)}"
                else:
                    s = f"{go(l, p)} {op} {go(r, p + 1)}"
                return f"({s})" if p < ctx else s
            case Exists(v, body) | Forall(v, body):
                q = "exists" if isinstance(f, Exists) else "forall"
                s = f"{q} {v}. {go(body, 0)}"
                return f"({s})" if ctx > 0 else s
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, 0)
