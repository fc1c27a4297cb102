"""Brute-force model checking and Stone pairings.

Counts are exact Python integers; the probability that a uniformly random
assignment of ``n`` variable slots satisfies a formula is a reduced Fraction.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import FormulaError, StructureError
from ..gamma import GammaValue, circ
from ..measures import FsFunction, fs_integrate
from .structures import FinStructure
from .syntax import (And, Bot, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Top,
                     free_vars, variable_slots)


class Evaluator:
    """Satisfaction in one structure; closed subformulas are evaluated once."""

    def __init__(self, structure: FinStructure):
        self.structure = structure
        self.domain = structure.domain
        self.relations = structure.relations
        self._closed: dict[Formula, bool] = {}

    def holds(self, phi: Formula, env: dict) -> bool:
        if not free_vars(phi):
            cached = self._closed.get(phi)
            if cached is None:
                cached = self._closed[phi] = self._eval(phi, {})
            return cached
        return self._eval(phi, env)

    def _eval(self, phi: Formula, env: dict) -> bool:
        match phi:
            case Rel(name, args):
                return tuple(env[a] for a in args) in self.relations[name]
            case Eq(l, r):
                return env[l] == env[r]
            case Top():
                return True
            case Bot():
                return False
            case Not(body):
                return not self.holds(body, env)
            case And(l, r):
                return self.holds(l, env) and self.holds(r, env)
            case Or(l, r):
                return self.holds(l, env) or self.holds(r, env)
            case Implies(l, r):
                return (not self.holds(l, env)) or self.holds(r, env)
            case Exists(v, body):
                inner = dict(env)
                for d in self.domain:
                    inner[v] = d
                    if self.holds(body, inner):
                        return True
                return False
            case Forall(v, body):
                inner = dict(env)
                for d in self.domain:
                    inner[v] = d
                    if not self.holds(body, inner):
                        return False
                return True
        raise TypeError(f"not a formula: {phi!r}")


def _check_inputs(a: FinStructure, phi: Formula, n: int) -> dict[str, int]:
    if len(a.domain) == 0:
        raise StructureError("Stone pairings need a non-empty domain")
    if n < 0:
        raise FormulaError("variable count must be non-negative")
    for rel in _relations_in(phi):
        if rel.name not in a.relations:
            raise FormulaError(f"relation {rel.name!r} is not interpreted in the structure")
    return variable_slots(phi, n)


def _relations_in(phi):
    match phi:
        case Rel():
            yield phi
        case Not(body) | Exists(_, body) | Forall(_, body):
            yield from _relations_in(body)
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from _relations_in(l)
            yield from _relations_in(r)


def _count_block(args) -> int:
    a, phi, n, slots, first_values = args
    ev = Evaluator(a)
    count = 0
    rest = list(itertools.product(a.domain, repeat=n - 1))
    for d0 in first_values:
        for tail in rest:
            assignment = (d0,) + tail
            env = {v: assignment[i] for v, i in slots.items()}
            if ev.holds(phi, env):
                count += 1
    return count


def count_satisfying(a: FinStructure, phi: Formula, n: int, workers: int = 1) -> int:
    """Number of assignments in ``A^n`` satisfying ``phi``.

    With ``workers > 1`` the assignment space is split by the value of the first
    slot and the partial counts are summed; the result does not depend on the split.
    """
    slots = _check_inputs(a, phi, n)
    if n == 0:
        return int(Evaluator(a).holds(phi, {}))
    if workers <= 1:
        return _count_block((a, phi, n, slots, a.domain))
    chunks = [a.domain[i::workers] for i in range(workers)]
    chunks = [c for c in chunks if c]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_block, [(a, phi, n, slots, c) for c in chunks]))


def stone_pairing_classical(a: FinStructure, phi: Formula, n: int, workers: int = 1) -> Fraction:
    return Fraction(count_satisfying(a, phi, n, workers), len(a.domain) ** n)


def stone_pairing_gamma(a: FinStructure, phi: Formula, n: int, workers: int = 1) -> GammaValue:
    return circ(stone_pairing_classical(a, phi, n, workers))


@dataclass(frozen=True)
class TypeTable:
    """Assignments of ``n`` slots grouped by which formulas of ``formulas`` they satisfy."""

    structure: FinStructure
    formulas: tuple
    n: int
    counts: dict

    @property
    def classes(self) -> list[tuple[bool, ...]]:
        return list(self.counts)

    @property
    def total(self) -> int:
        return len(self.structure.domain) ** self.n

    def mass(self, pattern) -> GammaValue:
        return circ(Fraction(self.counts[pattern], self.total))

    def masses(self) -> dict:
        return {p: self.mass(p) for p in self.counts}

    def as_fs(self) -> FsFunction:
        return FsFunction(self.masses())

    def cells_where(self, i: int) -> list:
        """Classes in which the ``i``-th formula holds."""
        return [p for p in self.counts if p[i]]

    def integrate(self, i: int) -> GammaValue:
        return fs_integrate(self.as_fs(), self.cells_where(i))


def type_table(a: FinStructure, formulas: Sequence[Formula], n: int) -> TypeTable:
    formulas = tuple(formulas)
    slot_maps = [_check_inputs(a, phi, n) for phi in formulas]
    ev = Evaluator(a)
    counts: dict = {}
    for assignment in itertools.product(a.domain, repeat=n):
        pattern = tuple(
            ev.holds(phi, {v: assignment[i] for v, i in slots.items()})
            for phi, slots in zip(formulas, slot_maps))
        counts[pattern] = counts.get(pattern, 0) + 1
    # canonical order: patterns sorted with satisfied bits first
    counts = dict(sorted(counts.items(), key=lambda kv: tuple(not b for b in kv[0])))
    return TypeTable(a, formulas, n, counts)
