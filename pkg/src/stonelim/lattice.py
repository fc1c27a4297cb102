"""Finite posets, finite distributive lattices and Birkhoff duality at finite scale.

Lattices keep explicit meet/join tables indexed by element position, so lattice
operations are table lookups. Elements are arbitrary hashables; ``label`` gives
the string used in files and reports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import networkx as nx

from .errors import LatticeError

DISTRIBUTIVITY_CHECK_BOUND = 64


def label(e) -> str:
    if isinstance(e, frozenset):
        return "{" + ",".join(sorted(label(x) for x in e)) + "}"
    if isinstance(e, tuple):
        return "(" + ",".join(label(x) for x in e) + ")"
    return str(e)


def _closure(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[bool]]:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        leq[i][j] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return leq


class FinPoset:
    """A finite partial order. ``pairs`` may be any generating relation; the
    reflexive-transitive closure is taken and antisymmetry is checked."""

    def __init__(self, elements: Sequence[Hashable], pairs: Iterable[tuple] = ()):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise LatticeError("poset elements must be distinct")
        try:
            idx_pairs = [(self.index[a], self.index[b]) for a, b in pairs]
        except KeyError as exc:
            raise LatticeError(f"unknown element {exc.args[0]!r} in order relation") from None
        self._leq = _closure(len(self.elements), idx_pairs)
        n = len(self.elements)
        for i in range(n):
            for j in range(i + 1, n):
                if self._leq[i][j] and self._leq[j][i]:
                    raise LatticeError(
                        f"order is not antisymmetric: {label(self.elements[i])} "
                        f"and {label(self.elements[j])}")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leq(self, a, b) -> bool:
        return self._leq[self.index[a]][self.index[b]]

    def order_pairs(self) -> list[tuple]:
        return [(a, b) for a in self.elements for b in self.elements if self.leq(a, b)]

    def covers(self) -> list[tuple]:
        """Pairs (a, b) with a < b and nothing strictly in between."""
        n = len(self.elements)
        lt = [[self._leq[i][j] and i != j for j in range(n)] for i in range(n)]
        out = []
        for i in range(n):
            for j in range(n):
                if lt[i][j] and not any(lt[i][k] and lt[k][j] for k in range(n)):
                    out.append((self.elements[i], self.elements[j]))
        return out

    def is_downset(self, s) -> bool:
        return all(a in s for b in s for a in self.elements if self.leq(a, b))

    def downsets(self) -> list[frozenset]:
        """All down-closed subsets, built by adding elements in a linear extension."""
        order = sorted(self.elements, key=lambda e: sum(self.leq(x, e) for x in self.elements))
        result = [frozenset()]
        for e in order:
            below = {x for x in self.elements if self.leq(x, e) and x != e}
            result += [s | {e} for s in result if below <= s]
        return result

    def to_digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.elements)))
        g.add_edges_from((self.index[a], self.index[b]) for a, b in self.covers())
        return g

    def to_json(self) -> dict:
        return {"elements": [label(e) for e in self.elements],
                "leq": [[label(a), label(b)] for a, b in self.covers()]}

    def __repr__(self):
        return f"FinPoset({[label(e) for e in self.elements]})"


class FinDistLattice(FinPoset):
    """A finite bounded distributive lattice.

    Meets and joins are derived from the order. Distributivity is checked
    exhaustively up to ``DISTRIBUTIVITY_CHECK_BOUND`` elements; larger inputs are
    rejected unless ``trusted`` (lattices of sets closed under union and
    intersection, which are distributive by construction).
    """

    def __init__(self, elements, pairs=(), *, trusted: bool = False):
        super().__init__(elements, pairs)
        n = len(self.elements)
        if n == 0:
            raise LatticeError("a lattice needs at least one element")
        if n > DISTRIBUTIVITY_CHECK_BOUND and not trusted:
            raise LatticeError(
                f"{n} elements exceeds the distributivity check bound "
                f"({DISTRIBUTIVITY_CHECK_BOUND}); build it with downset_lattice instead")
        leq = self._leq
        self._meet = [[0] * n for _ in range(n)]
        self._join = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                lower = [k for k in range(n) if leq[k][i] and leq[k][j]]
                upper = [k for k in range(n) if leq[i][k] and leq[j][k]]
                m = [k for k in lower if all(leq[x][k] for x in lower)]
                u = [k for k in upper if all(leq[k][x] for x in upper)]
                if not m or not u:
                    a, b = label(self.elements[i]), label(self.elements[j])
                    raise LatticeError(f"{a} and {b} have no {'meet' if not m else 'join'}")
                self._meet[i][j] = self._meet[j][i] = m[0]
                self._join[i][j] = self._join[j][i] = u[0]
        self._bottom = next(i for i in range(n) if all(leq[i][j] for j in range(n)))
        self._top = next(i for i in range(n) if all(leq[j][i] for j in range(n)))
        if not trusted:
            self._check_distributive()

    @classmethod
    def _from_sets(cls, sets: Iterable[frozenset]) -> "FinDistLattice":
        """Lattice of a family of sets closed under union and intersection."""
        sets = sorted(set(sets), key=lambda s: (len(s), sorted(map(label, s))))
        lat = cls.__new__(cls)
        lat.elements = tuple(sets)
        lat.index = {e: i for i, e in enumerate(sets)}
        n = len(sets)
        lat._leq = [[a <= b for b in sets] for a in sets]
        lat._meet = [[lat.index[a & b] for b in sets] for a in sets]
        lat._join = [[lat.index[a | b] for b in sets] for a in sets]
        lat._bottom = 0
        lat._top = n - 1
        return lat

    def _check_distributive(self) -> None:
        n = len(self.elements)
        M, J = self._meet, self._join
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if M[a][J[b][c]] != J[M[a][b]][M[a][c]]:
                        e = self.elements
                        raise LatticeError(
                            f"not distributive at ({label(e[a])}, {label(e[b])}, {label(e[c])})")

    @property
    def bottom(self):
        return self.elements[self._bottom]

    @property
    def top(self):
        return self.elements[self._top]

    @property
    def is_degenerate(self) -> bool:
        return self._bottom == self._top

    def meet(self, a, b):
        return self.elements[self._meet[self.index[a]][self.index[b]]]

    def join(self, a, b):
        return self.elements[self._join[self.index[a]][self.index[b]]]

    def meet_all(self, xs):
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    def join_all(self, xs):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def same_as(self, other) -> bool:
        """Identical elements in the same positions with the same order."""
        return self is other or (isinstance(other, FinDistLattice)
                                 and self.elements == other.elements and self._leq == other._leq)

    def up(self, a) -> frozenset:
        return frozenset(b for b in self.elements if self.leq(a, b))

    def element(self, name: str):
        """Look an element up by its label."""
        for e in self.elements:
            if label(e) == name:
                return e
        raise LatticeError(f"no element labelled {name!r}")

    def to_json(self) -> dict:
        return {"elements": [label(e) for e in self.elements],
                "leq": [[label(a), label(b)] for a, b in self.covers()]}

    def __repr__(self):
        return f"FinDistLattice({[label(e) for e in self.elements]})"


@dataclass(frozen=True)
class LatticeHom:
    source: FinDistLattice
    target: FinDistLattice
    mapping: Mapping = field(hash=False)

    def __call__(self, a):
        return self.mapping[a]

    def compose(self, inner: "LatticeHom") -> "LatticeHom":
        """``self . inner``: apply ``inner`` first."""
        return LatticeHom(inner.source, self.target,
                          {a: self.mapping[inner.mapping[a]] for a in inner.source.elements})


def identity_hom(lat: FinDistLattice) -> LatticeHom:
    return LatticeHom(lat, lat, {a: a for a in lat.elements})


def downset_lattice(p: FinPoset) -> FinDistLattice:
    """Lattice of down-sets of ``p`` under inclusion."""
    return FinDistLattice._from_sets(p.downsets())


def join_irreducibles(lat: FinDistLattice) -> FinPoset:
    """Non-bottom elements that are not the join of the elements strictly below them."""
    out = []
    for a in lat.elements:
        if a == lat.bottom:
            continue
        below = [b for b in lat.elements if lat.leq(b, a) and b != a]
        if lat.join_all(below) != a:
            out.append(a)
    return FinPoset(out, [(a, b) for a in out for b in out if lat.leq(a, b)])


def prime_filters(lat: FinDistLattice) -> list[frozenset]:
    """Every prime filter of a finite lattice.

    A filter of a finite lattice is principal, so only up-sets of single
    elements need testing; each is checked for primality directly.
    """
    if lat.is_degenerate:
        raise LatticeError("a degenerate lattice (0 = 1) has no prime filters")
    out = []
    for a in lat.elements:
        if a == lat.bottom:
            continue
        f = lat.up(a)
        if all(x in f or y in f
               for x in lat.elements for y in lat.elements if lat.join(x, y) in f):
            out.append(f)
    return out


def is_prime_filter(lat: FinDistLattice, f: frozenset) -> bool:
    if not f or lat.bottom in f:
        return False
    for x in f:
        if not lat.up(x) <= f:
            return False
        for y in f:
            if lat.meet(x, y) not in f:
                return False
    return all(x in f or y in f
               for x in lat.elements for y in lat.elements if lat.join(x, y) in f)


def check_hom(h: LatticeHom) -> bool:
    src, tgt = h.source, h.target
    try:
        if h(src.bottom) != tgt.bottom or h(src.top) != tgt.top:
            return False
        for a, b in itertools.product(src.elements, repeat=2):
            if h(src.meet(a, b)) != tgt.meet(h(a), h(b)):
                return False
            if h(src.join(a, b)) != tgt.join(h(a), h(b)):
                return False
    except (KeyError, LatticeError):
        return False
    return True


def sublattice_closure(lat: FinDistLattice, gens: Iterable) -> tuple[FinDistLattice, LatticeHom]:
    """Smallest bounded sublattice containing ``gens``, with its inclusion."""
    current = set(gens) | {lat.bottom, lat.top}
    for g in current:
        if g not in lat.index:
            raise LatticeError(f"{label(g)} is not an element of the lattice")
    frontier = set(current)
    while frontier:
        new = set()
        for a in frontier:
            for b in current:
                for c in (lat.meet(a, b), lat.join(a, b)):
                    if c not in current:
                        new.add(c)
        current |= new
        frontier = new
    ordered = [e for e in lat.elements if e in current]
    pairs = [(a, b) for a in ordered for b in ordered if lat.leq(a, b)]
    sub = FinDistLattice(ordered, pairs, trusted=True)
    return sub, LatticeHom(sub, lat, {a: a for a in ordered})


def hom_from_monotone_map(f: Mapping, p: FinPoset, q: FinPoset) -> LatticeHom:
    """Preimage map Down(q) -> Down(p) of a monotone ``f: p -> q``."""
    for a in p.elements:
        for b in p.elements:
            if p.leq(a, b) and not q.leq(f[a], f[b]):
                raise LatticeError(f"map is not monotone at ({label(a)}, {label(b)})")
    dp, dq = downset_lattice(p), downset_lattice(q)
    mapping = {s: frozenset(a for a in p.elements if f[a] in s) for s in dq.elements}
    return LatticeHom(dq, dp, mapping)


def is_isomorphic(a: FinPoset, b: FinPoset) -> bool:
    """Order isomorphism, tested as digraph isomorphism of the cover relations."""
    if len(a) != len(b):
        return False
    return nx.is_isomorphic(a.to_digraph(), b.to_digraph())


# small named lattices used by tests and the CLI

def chain_lattice(n: int) -> FinDistLattice:
    """The n-element chain 0 < 1 < ... < n-1, elements named by integers."""
    if n < 1:
        raise LatticeError("a chain needs at least one element")
    names = [str(i) for i in range(n)]
    return FinDistLattice(names, list(zip(names, names[1:])))


def diamond() -> FinDistLattice:
    return FinDistLattice(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])


def boolean_lattice(k: int) -> FinDistLattice:
    return downset_lattice(FinPoset([f"x{i}" for i in range(k)]))


def lattice_from_json(obj: Mapping) -> FinDistLattice:
    if "elements" not in obj:
        raise LatticeError("lattice JSON needs an 'elements' list")
    elements = [str(e) for e in obj["elements"]]
    pairs = [(str(a), str(b)) for a, b in obj.get("leq", [])]
    if obj.get("kind") == "poset":
        return downset_lattice(FinPoset(elements, pairs))
    return FinDistLattice(elements, pairs)


def poset_from_json(obj: Mapping) -> FinPoset:
    return FinPoset([str(e) for e in obj["elements"]],
                    [(str(a), str(b)) for a, b in obj.get("leq", [])])


def builtin_lattice(name: str) -> FinDistLattice:
    """``diamond``, ``chain:N`` or ``boolean:K``."""
    kind, _, arg = name.partition(":")
    if kind == "diamond" and not arg:
        return diamond()
    if kind == "chain" and arg.isdigit():
        return chain_lattice(int(arg))
    if kind == "boolean" and arg.isdigit():
        return boolean_lattice(int(arg))
    raise LatticeError(f"unknown builtin lattice {name!r}")
