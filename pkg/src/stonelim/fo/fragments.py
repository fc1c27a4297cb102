"""Semantic formula fragments as finite distributive lattices.

Formulas are identified with the set of type cells (structure index, satisfaction
pattern) they hold in, relative to a declared family of structures. Logical
equivalence is undecidable in general, so two formulas are identified exactly
when no structure of the family tells them apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import StructureError
from ..gamma import ZERO
from ..lattice import FinDistLattice, LatticeHom
from ..measures import FsFunction, GammaMeasure, fs_integrate
from .pairing import TypeTable, stone_pairing_gamma, type_table
from .structures import FinStructure, isomorphic
from .syntax import Formula


def _closure(generators: list[frozenset], universe: frozenset) -> set[frozenset]:
    sets = set(generators) | {frozenset(), universe}
    frontier = set(sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in sets:
                for c in (a & b, a | b):
                    if c not in sets:
                        new.add(c)
        sets |= new
        frontier = new
    return sets


@dataclass
class Fragment:
    formulas: tuple
    structures: tuple
    n: int
    tables: tuple
    lattice: FinDistLattice
    element_of: dict = field(repr=False)

    @property
    def cells(self) -> frozenset:
        return self.lattice.top

    def element(self, i: int):
        """Lattice element denoted by the ``i``-th formula."""
        return self.element_of[i]

    def fs_function(self, k: int) -> FsFunction:
        """Mass of each cell under the ``k``-th structure; other structures' cells get 0^o."""
        masses = {}
        for cell in sorted(self.cells, key=_cell_key):
            s, pattern = cell
            masses[cell] = self.tables[s].mass(pattern) if s == k else ZERO
        return FsFunction(masses)

    def measure(self, k: int, validate: bool = True) -> GammaMeasure:
        """The pairing of the ``k``-th structure, as a measure on the fragment lattice."""
        f = self.fs_function(k)
        values = {m: fs_integrate(f, m) for m in self.lattice.elements}
        return GammaMeasure(self.lattice, values, validate=validate)

    def metadata(self) -> dict:
        return {
            "semantics": "relative to the declared structure family",
            "structures": len(self.structures),
            "cells": len(self.cells),
            "lattice_size": len(self.lattice),
            "n": self.n,
        }


def _cell_key(cell):
    s, pattern = cell
    return (s, tuple(not b for b in pattern))


def semantic_fragment(formulas: Sequence[Formula], structures: Sequence[FinStructure],
                      n: int) -> Fragment:
    if not structures:
        raise StructureError("a semantic fragment needs at least one structure")
    formulas = tuple(formulas)
    tables: list[TypeTable] = [type_table(a, formulas, n) for a in structures]
    cells = frozenset((k, p) for k, t in enumerate(tables) for p in t.classes)
    gens = [frozenset(c for c in cells if c[1][i]) for i in range(len(formulas))]
    lattice = FinDistLattice._from_sets(_closure(gens, cells))
    return Fragment(formulas, tuple(structures), n, tuple(tables), lattice,
                    {i: g for i, g in enumerate(gens)})


def fragment_inclusion(small: Fragment, big: Fragment) -> LatticeHom:
    """Embedding of a sub-fragment into a larger one over the same structures.

    Every formula of ``small`` must occur in ``big``. A set of small cells maps
    to the big cells whose restricted pattern lies in it.
    """
    if small.structures != big.structures or small.n != big.n:
        raise StructureError("fragments must share the structure family and variable count")
    try:
        positions = [big.formulas.index(f) for f in small.formulas]
    except ValueError:
        raise StructureError("every formula of the small fragment must occur in the big one") from None

    def restrict(cell):
        s, pattern = cell
        return (s, tuple(pattern[j] for j in positions))

    mapping = {m: frozenset(c for c in big.cells if restrict(c) in m)
               for m in small.lattice.elements}
    return LatticeHom(small.lattice, big.lattice, mapping)


@dataclass
class CollisionReport:
    """Structures of a family whose flavored pairings agree on every formula."""

    groups: list          # lists of structure indices with equal pairing vectors
    non_isomorphic: list  # pairs (i, j) inside a group that are not isomorphic

    @property
    def injective(self) -> bool:
        return not self.non_isomorphic


def pairing_collisions(structures: Sequence[FinStructure], formulas: Sequence[Formula],
                       n: int) -> CollisionReport:
    """Group structures by their pairing vectors and flag non-isomorphic collisions.

    Isomorphic structures always collide, so only non-isomorphic pairs count
    against injectivity.
    """
    by_vector: dict = {}
    for k, a in enumerate(structures):
        vec = tuple(stone_pairing_gamma(a, phi, n) for phi in formulas)
        by_vector.setdefault(vec, []).append(k)
    groups = [g for g in by_vector.values() if len(g) > 1]
    bad = []
    for g in groups:
        reps: list[int] = []
        for k in g:
            match = next((r for r in reps if isomorphic(structures[r], structures[k])), None)
            if match is None:
                bad += [(r, k) for r in reps]
                reps.append(k)
    return CollisionReport(groups, bad)
