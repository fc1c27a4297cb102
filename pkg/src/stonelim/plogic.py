"""Positive logic of probabilistic atoms over a finite distributive lattice.

Atoms are ``P[>=p](a)`` (the measure of ``a`` is at least ``p^o``) and
``P[<q](a)`` (strictly below ``q^o``), combined with finite conjunctions and
disjunctions. Entailment over all flavored measures is out of reach, so it is
decided against explicit measure families: countermodels are genuine,
positive answers hold relative to the family only.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import FilterError, FormulaSyntaxError, LatticeError, MeasureError
from .gamma import GammaValue, circ, format_rational, minus, unit_rational
from .lattice import FinDistLattice, label
from .measures import GammaMeasure, check_gamma, grid_measures, random_gamma_measure

AXIOMS = ("L1", "L2", "L3", "L4", "L5", "L6")


@dataclass(frozen=True, order=True)
class PAtom:
    subject: object
    polarity: str          # "geq" or "lt"
    threshold: Fraction

    def __post_init__(self):
        if self.polarity not in ("geq", "lt"):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        object.__setattr__(self, "threshold", unit_rational(self.threshold))

    def __str__(self):
        op = ">=" if self.polarity == "geq" else "<"
        return f"P[{op}{format_rational(self.threshold)}]({label(self.subject)})"


@dataclass(frozen=True)
class PTop:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class PBot:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class PAnd:
    items: tuple

    def __str__(self):
        return " & ".join(f"({x})" if isinstance(x, POr) else str(x) for x in self.items)


@dataclass(frozen=True)
class POr:
    items: tuple

    def __str__(self):
        return " | ".join(str(x) for x in self.items)


PFormula = Union[PAtom, PTop, PBot, PAnd, POr]


def geq(a, p) -> PAtom:
    return PAtom(a, "geq", p)


def lt(a, q) -> PAtom:
    return PAtom(a, "lt", q)


def conj(*items) -> PFormula:
    return PAnd(tuple(items))


def disj(*items) -> PFormula:
    return POr(tuple(items))


def atoms_of(phi: PFormula) -> list[PAtom]:
    if isinstance(phi, PAtom):
        return [phi]
    if isinstance(phi, (PAnd, POr)):
        return [a for x in phi.items for a in atoms_of(x)]
    return []


def _values(mu) -> Mapping:
    return mu.values if isinstance(mu, GammaMeasure) else mu


def p_satisfies(mu, phi: PFormula, lattice: FinDistLattice | None = None) -> bool:
    """Truth of ``phi`` at the measure ``mu`` (a GammaMeasure or a raw value map)."""
    values = _values(mu)
    if lattice is not None and isinstance(mu, GammaMeasure) and not mu.lattice.same_as(lattice):
        raise LatticeError("measure and formula live on different lattices")
    for atom in atoms_of(phi):
        if atom.subject not in values:
            raise LatticeError(f"atom {atom} mentions an element outside the measure's lattice")
    return _sat(values, phi)


def _sat(values, phi) -> bool:
    if isinstance(phi, PAtom):
        v = values[phi.subject]
        if phi.polarity == "geq":
            return v >= circ(phi.threshold)
        return v < circ(phi.threshold)
    if isinstance(phi, PTop):
        return True
    if isinstance(phi, PBot):
        return False
    if isinstance(phi, PAnd):
        return all(_sat(values, x) for x in phi.items)
    if isinstance(phi, POr):
        return any(_sat(values, x) for x in phi.items)
    raise TypeError(f"not a probabilistic formula: {phi!r}")


# -- axioms -----------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """``antecedent |= consequent``; a missing side is encoded as true/false."""

    axiom: str
    antecedent: PFormula
    consequent: PFormula

    def __str__(self):
        return f"{self.axiom}: {self.antecedent} |= {self.consequent}"


def grid_values(n: int) -> list[Fraction]:
    return [Fraction(k, n) for k in range(n + 1)]


class CompiledAxiom:
    """Instances of one axiom as rows of atom slots, evaluated in bulk.

    Slot layout for ``|D|`` elements and grid ``N``: ``P[>=k/N](a)`` sits at
    ``idx(a) * (N + 1) + k``, the matching ``P<`` atom one block later, then the
    constants true and false. Each row has two antecedent slots (a conjunction)
    and two consequent slots (a disjunction), padded with the constants.
    """

    def __init__(self, axiom: str, lat: FinDistLattice, grid: int):
        if axiom not in AXIOMS:
            raise ValueError(f"unknown axiom {axiom!r}; expected one of {', '.join(AXIOMS)}")
        self.axiom, self.lattice, self.grid = axiom, lat, grid
        self.width = grid + 1
        self.n_geq = len(lat) * self.width
        self.TRUE, self.FALSE = 2 * self.n_geq, 2 * self.n_geq + 1
        self.ante, self.cons = self._rows()

    def geq(self, a, k):
        return self.lattice.index[a] * self.width + k

    def lt(self, a, k):
        return self.n_geq + self.geq(a, k)

    def _rows(self):
        lat, n = self.lattice, self.grid
        T, F_ = self.TRUE, self.FALSE
        ks = range(n + 1)
        ante: list = []
        cons: list = []

        def row(a1, a2, c1, c2):
            ante.append((a1, a2))
            cons.append((c1, c2))

        els = lat.elements
        if self.axiom == "L1":
            for a in els:
                for p in ks:
                    for q in ks:
                        if p <= q:
                            row(self.geq(a, q), T, self.geq(a, p), F_)
        elif self.axiom == "L2":
            for p in ks:
                if p > 0:
                    row(self.geq(lat.bottom, p), T, F_, F_)
            row(T, T, self.geq(lat.bottom, 0), F_)
            for q in ks:
                row(T, T, self.geq(lat.top, q), F_)
        elif self.axiom == "L3":
            for a in els:
                for b in els:
                    if lat.leq(a, b):
                        for q in ks:
                            row(self.geq(a, q), T, self.geq(b, q), F_)
        elif self.axiom in ("L4", "L5"):
            P, Q, R = (x.ravel() for x in np.meshgrid(ks, ks, ks, indexing="ij"))
            S = P + Q - R
            keep = (S >= 0) & (S <= n)
            P, Q, R, S = P[keep], Q[keep], R[keep], S[keep]
            blocks_a, blocks_c = [], []
            for a in els:
                for b in els:
                    j, m = lat.join(a, b), lat.meet(a, b)
                    left = np.stack([self.geq(a, 0) + P, self.geq(b, 0) + Q], axis=1)
                    right = np.stack([self.geq(j, 0) + S, self.geq(m, 0) + R], axis=1)
                    if self.axiom == "L4":
                        blocks_a.append(left)
                        blocks_c.append(right)
                    else:
                        blocks_a.append(right)
                        blocks_c.append(left)
            return np.concatenate(blocks_a), np.concatenate(blocks_c)
        else:  # L6
            for a in els:
                for q in ks:
                    row(self.lt(a, q), self.geq(a, q), F_, F_)
                    row(T, T, self.lt(a, q), self.geq(a, q))
        return np.array(ante, dtype=np.int64), np.array(cons, dtype=np.int64)

    def __len__(self):
        return len(self.ante)

    def truth(self, values: Mapping) -> np.ndarray:
        """Truth of every slot at one value map."""
        n = self.grid
        ks = np.arange(n + 1)
        geq = np.zeros(self.n_geq, dtype=bool)
        for a in self.lattice.elements:
            v = values[a]
            scaled = v.value * n
            top = math.floor(scaled)
            if v.is_minus and scaled.denominator == 1:
                top -= 1
            i = self.lattice.index[a] * self.width
            geq[i:i + self.width] = ks <= top
        return np.concatenate([geq, ~geq, [True, False]])

    def failures(self, values: Mapping) -> np.ndarray:
        t = self.truth(values)
        return np.flatnonzero(t[self.ante].all(axis=1) & ~t[self.cons].any(axis=1))

    def _slot(self, i):
        if i == self.TRUE:
            return PTop()
        if i == self.FALSE:
            return PBot()
        polarity = "geq" if i < self.n_geq else "lt"
        i %= self.n_geq
        a = self.lattice.elements[i // self.width]
        return PAtom(a, polarity, Fraction(i % self.width, self.grid))

    def _side(self, slots, unit, combine):
        parts = [self._slot(int(i)) for i in slots if int(i) != unit]
        if not parts:
            return PTop() if unit == self.TRUE else PBot()
        return parts[0] if len(parts) == 1 else combine(tuple(parts))

    def instance(self, k: int) -> Instance:
        return Instance(self.axiom, self._side(self.ante[k], self.TRUE, PAnd),
                        self._side(self.cons[k], self.FALSE, POr))


def axiom_instances(axiom: str, lat: FinDistLattice, grid: int) -> list[Instance]:
    """All instances of one axiom with thresholds drawn from I_grid.

    A side without atoms is encoded as true (antecedent) or false (consequent).
    """
    c = CompiledAxiom(axiom, lat, grid)
    return [c.instance(k) for k in range(len(c))]


@dataclass(frozen=True)
class SoundnessViolation:
    instance: Instance
    measure_index: int

    def __str__(self):
        return f"measure #{self.measure_index} refutes {self.instance}"


def check_soundness(axiom: str, lat: FinDistLattice, family: Sequence,
                    grid: int | None = None) -> list[SoundnessViolation]:
    """Every instance of ``axiom`` checked at every measure of ``family``.

    Members may be unvalidated value maps, which is how negative controls are
    run. Violations are ordered by measure, then by instance.
    """
    if grid is None:
        grid = default_grid(family)
    compiled = CompiledAxiom(axiom, lat, grid)
    out = []
    for k, mu in enumerate(family):
        for row in compiled.failures(_values(mu)):
            out.append(SoundnessViolation(compiled.instance(int(row)), k))
    return out


def default_grid(family: Iterable, extra: Iterable[Fraction] = ()) -> int:
    """lcm of every denominator appearing in the measures and the extra thresholds."""
    dens = [1]
    for mu in family:
        dens += [v.value.denominator for v in _values(mu).values()]
    dens += [Fraction(x).denominator for x in extra]
    return math.lcm(*dens)


@dataclass(frozen=True)
class Entailment:
    holds: bool
    countermodel: object = None
    family_size: int = 0

    def __str__(self):
        if self.holds:
            return f"holds on family ({self.family_size} measures; family-relative)"
        return f"refuted by {self.countermodel!r}"


def entails(phi: PFormula, psi: PFormula, family: Sequence[GammaMeasure]) -> Entailment:
    """``phi |= psi`` over ``family``; a countermodel is re-checked before it is returned."""
    for mu in family:
        if _sat(_values(mu), phi) and not _sat(_values(mu), psi):
            assert p_satisfies(mu, phi) and not p_satisfies(mu, psi)
            return Entailment(False, mu, len(family))
    return Entailment(True, None, len(family))


# -- filters and measures ------------------------------------------------------

@dataclass(frozen=True)
class AtomFilter:
    """The ``>=``-atoms of a prime filter, restricted to thresholds in I_grid.

    ``resolution`` is the denominator of the value grid the filter is read
    against. When ``grid`` is a proper multiple of it, a threshold set that stops
    strictly between two resolution points stands for the open down-set below
    the upper point, whose join is that point's minus copy.
    """

    lattice: FinDistLattice
    grid: int
    resolution: int
    atoms: frozenset      # of (element, threshold)

    def __post_init__(self):
        if self.grid % self.resolution:
            raise FilterError("the threshold grid must refine the resolution grid")

    def __contains__(self, atom) -> bool:
        if isinstance(atom, PAtom):
            if atom.polarity != "geq":
                return False
            atom = (atom.subject, atom.threshold)
        return atom in self.atoms

    def thresholds(self, a) -> list[Fraction]:
        return sorted(q for x, q in self.atoms if x == a)

    def sorted_atoms(self) -> list[PAtom]:
        idx = self.lattice.index
        return [geq(a, q) for a, q in sorted(self.atoms, key=lambda t: (idx[t[0]], t[1]))]


def filter_from_measure(mu: GammaMeasure, grid: int | None = None,
                        resolution: int | None = None) -> AtomFilter:
    """All ``P[>=q](a)`` with ``q`` on the grid and ``mu(a) >= q^o``.

    By default the resolution is the lcm of the value denominators and the grid
    doubles it, so minus-flavored values are recoverable.
    """
    if resolution is None:
        resolution = mu.denominator() if grid is None else grid
    if grid is None:
        grid = 2 * resolution
    atoms = frozenset((a, q) for a in mu.lattice.elements for q in grid_values(grid)
                      if mu[a] >= circ(q))
    return AtomFilter(mu.lattice, grid, resolution, atoms)


def check_filter(f: AtomFilter) -> str | None:
    """Name of the first violated filter condition, or None."""
    lat = f.lattice
    qs = grid_values(f.grid)
    has = f.atoms.__contains__
    for a in lat.elements:
        if not has((a, Fraction(0))):
            return f"missing P[>=0]({label(a)})"
    for q in qs:
        if not has((lat.top, q)):
            return f"missing P[>={format_rational(q)}]({label(lat.top)})"
        if q > 0 and has((lat.bottom, q)):
            return f"contains P[>={format_rational(q)}]({label(lat.bottom)}) (L2)"
    for a, q in f.atoms:
        for p in qs:
            if p <= q and not has((a, p)):
                return f"not closed under L1 at P[>={format_rational(q)}]({label(a)})"
        for b in lat.elements:
            if lat.leq(a, b) and not has((b, q)):
                return f"not closed under L3 at P[>={format_rational(q)}]({label(a)})"
    atoms = sorted(f.atoms, key=lambda t: (lat.index[t[0]], t[1]))
    for (a, p), (b, q) in itertools.product(atoms, repeat=2):
        j, m = lat.join(a, b), lat.meet(a, b)
        for r in qs:
            s = p + q - r
            if 0 <= s <= 1 and not (has((j, s)) or has((m, r))):
                return (f"not prime for L4 at P[>={format_rational(p)}]({label(a)}), "
                        f"P[>={format_rational(q)}]({label(b)}), r={format_rational(r)}")
    for a, b in itertools.product(lat.elements, repeat=2):
        j, m = lat.join(a, b), lat.meet(a, b)
        for s_, r in itertools.product(f.thresholds(j), f.thresholds(m)):
            for p in qs:
                q = s_ + r - p
                if 0 <= q <= 1 and not (has((a, p)) or has((b, q))):
                    return (f"not prime for L5 at a={label(a)}, b={label(b)}, "
                            f"p={format_rational(p)}, q={format_rational(q)}, r={format_rational(r)}")
    return None


def _join_value(qs: list[Fraction], grid: int, resolution: int) -> GammaValue:
    top = max(qs)
    if (top * resolution).denominator == 1 or top == 1:
        return circ(top)
    step = Fraction(1, resolution)
    upper = (top // step + 1) * step
    return minus(upper)


def measure_from_filter(f: AtomFilter) -> GammaMeasure:
    """``a -> join of q^o over P[>=q](a) in F``, validated as a measure."""
    cond = check_filter(f)
    if cond is not None:
        raise FilterError(f"inconsistent filter: {cond}", cond)
    values = {a: _join_value(f.thresholds(a), f.grid, f.resolution) for a in f.lattice.elements}
    v = check_gamma(f.lattice, values)
    if v is not None:
        raise MeasureError(f"filter does not define a measure: {v}", v)
    return GammaMeasure(f.lattice, values, validate=False)


def separating_atom(f1: AtomFilter, f2: AtomFilter) -> PAtom | None:
    """An atom in ``f1`` but not ``f2``, found as in the injectivity argument.

    Take an element where the decoded value of ``f1`` is not below that of
    ``f2``, the largest threshold ``q`` of ``f1`` there, and the least threshold
    ``p <= q`` missing from ``f2``; closure under L1 puts ``P[>=p]`` in ``f1``.
    """
    if not f1.lattice.same_as(f2.lattice):
        raise LatticeError("filters over different lattices")
    lat = f1.lattice
    for a in lat.elements:
        t1, t2 = set(f1.thresholds(a)), set(f2.thresholds(a))
        missing = sorted(p for p in grid_values(max(f1.grid, f2.grid)) if p not in t2)
        if not t1 or not missing:
            continue
        q = max(t1)
        for p in missing:
            if p <= q and p in t1:
                return geq(a, p)
    return None


def minimal_filter(lat: FinDistLattice, grid: int) -> AtomFilter:
    """Only the forced atoms: ``P[>=0]`` everywhere and every ``P[>=q]`` of the top."""
    atoms = {(a, Fraction(0)) for a in lat.elements}
    atoms |= {(lat.top, q) for q in grid_values(grid)}
    return AtomFilter(lat, grid, grid, frozenset(atoms))


# -- surface syntax -----------------------------------------------------------

_PTOKEN = re.compile(r"\s*(?:(P\[\s*(>=|<)\s*(\d+(?:\s*/\s*\d+)?)\s*\]\s*\(\s*([^()\s]+|\{[^}]*\})\s*\))"
                     r"|(&|\||\(|\)|true|false))")


def parse_pformula(text: str, lat: FinDistLattice) -> PFormula:
    """Parse ``P[>=1/2](a) & P[<1/3](b) | P[>=0](c)``; element names are lattice labels."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _PTOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"cannot parse {text[pos:pos + 12]!r}", pos)
        if m.group(1):
            op, thr, name = m.group(2), m.group(3).replace(" ", ""), m.group(4)
            try:
                subject = lat.element(name)
            except LatticeError:
                raise FormulaSyntaxError(f"unknown lattice element {name!r}", m.start(4)) from None
            tokens.append(("atom", PAtom(subject, "geq" if op == ">=" else "lt", Fraction(thr))))
        else:
            tokens.append((m.group(5), None))
        pos = m.end()
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i][0]

    def take(kind):
        nonlocal i
        if tokens[i][0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tokens[i][0]!r}")
        i += 1
        return tokens[i - 1][1]

    def disjunction():
        items = [conjunction()]
        while peek() == "|":
            take("|")
            items.append(conjunction())
        return items[0] if len(items) == 1 else POr(tuple(items))

    def conjunction():
        items = [primary()]
        while peek() == "&":
            take("&")
            items.append(primary())
        return items[0] if len(items) == 1 else PAnd(tuple(items))

    def primary():
        k = peek()
        if k == "atom":
            return take("atom")
        if k == "true":
            take("true")
            return PTop()
        if k == "false":
            take("false")
            return PBot()
        if k == "(":
            take("(")
            f = disjunction()
            take(")")
            return f
        raise FormulaSyntaxError(f"unexpected {k!r}")

    f = disjunction()
    take("end")
    return f


def measure_family(lat: FinDistLattice, grid: int, random_count: int = 0,
                   seed: int = 0, max_den: int = 4) -> list[GammaMeasure]:
    """Exhaustive I_grid-valued measures followed by ``random_count`` seeded random ones."""
    family = list(grid_measures(lat, grid))
    rng = random.Random(seed)
    family += [random_gamma_measure(lat, rng, max_den=max_den) for _ in range(random_count)]
    return family
