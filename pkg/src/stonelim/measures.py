"""Classical and flavored finitely additive measures on finite distributive lattices."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DomainError, LatticeError, MeasureError
from .gamma import (ONE, ZERO, GammaValue, flavored_grid, gamma_collapse, iota_section,
                    minus, mip, miss, plus, unit_rational)
from .lattice import FinDistLattice, LatticeHom, check_hom, join_irreducibles, label


@dataclass(frozen=True)
class Violation:
    """Why a candidate map fails to be a measure."""

    kind: str
    witness: tuple

    def __str__(self):
        return f"{self.kind} at ({', '.join(label(w) for w in self.witness)})"


def _require_nondegenerate(lat: FinDistLattice) -> None:
    if lat.is_degenerate:
        raise LatticeError("measures need a lattice with 0 != 1")


def _require_total(lat: FinDistLattice, values: Mapping) -> None:
    missing = [e for e in lat.elements if e not in values]
    if missing:
        raise MeasureError(f"map is not total; missing {label(missing[0])}")


def check_classical(lat: FinDistLattice, values: Mapping) -> Violation | None:
    """First violated classical measure axiom, or None if ``values`` is a measure."""
    _require_nondegenerate(lat)
    _require_total(lat, values)
    if values[lat.bottom] != 0:
        return Violation("bottom", (lat.bottom,))
    if values[lat.top] != 1:
        return Violation("top", (lat.top,))
    els = lat.elements
    for a, b in itertools.product(els, repeat=2):
        if lat.leq(a, b) and values[a] > values[b]:
            return Violation("monotone", (a, b))
    for a, b in itertools.product(els, repeat=2):
        if values[a] - values[lat.meet(a, b)] != values[lat.join(a, b)] - values[b]:
            return Violation("modular", (a, b))
    return None


def check_gamma(lat: FinDistLattice, values: Mapping) -> Violation | None:
    """First violated flavored measure axiom, or None.

    Besides the bounds and monotonicity, every pair (a, b) must satisfy
    ``mu(a) -. mu(a^b) <= mu(avb) - mu(b)`` and ``mu(a) - mu(a^b) >= mu(avb) -. mu(b)``.
    """
    _require_nondegenerate(lat)
    _require_total(lat, values)
    if values[lat.bottom] != ZERO:
        return Violation("bottom", (lat.bottom,))
    if values[lat.top] != ONE:
        return Violation("top", (lat.top,))
    els = lat.elements
    for a, b in itertools.product(els, repeat=2):
        if lat.leq(a, b) and not values[a] <= values[b]:
            return Violation("monotone", (a, b))
    seen: dict = {}
    for a, b in itertools.product(els, repeat=2):
        quad = (values[a], values[lat.meet(a, b)], values[lat.join(a, b)], values[b])
        verdict = seen.get(quad)
        if verdict is None:
            va, vm, vj, vb = quad
            if not miss(va, vm) <= mip(vj, vb):
                verdict = "additivity-upper"
            elif not mip(va, vm) >= miss(vj, vb):
                verdict = "additivity-lower"
            else:
                verdict = ""
            seen[quad] = verdict
        if verdict:
            return Violation(verdict, (a, b))
    return None


class _Measure:
    def __init__(self, lattice: FinDistLattice, values: Mapping):
        self.lattice = lattice
        self.values = dict(values)

    def __getitem__(self, a):
        return self.values[a]

    def __call__(self, a):
        return self.values[a]

    def __eq__(self, other):
        return (type(self) is type(other) and self.lattice.same_as(other.lattice)
                and self.values == other.values)

    def __hash__(self):
        return hash((self.lattice.elements, frozenset(self.values.items())))

    def items(self):
        return [(a, self.values[a]) for a in self.lattice.elements]

    def __repr__(self):
        body = ", ".join(f"{label(a)}: {v}" for a, v in self.items())
        return f"{type(self).__name__}({{{body}}})"


class ClassicalMeasure(_Measure):
    """A finitely additive probability measure with exact rational values."""

    def __init__(self, lattice, values, *, validate=True):
        super().__init__(lattice, {a: unit_rational(v) for a, v in values.items()})
        if validate:
            v = check_classical(lattice, self.values)
            if v is not None:
                raise MeasureError(f"not a classical measure: {v}", v)


class GammaMeasure(_Measure):
    """A measure valued in the doubled unit interval.

    ``GammaMeasure.unchecked`` skips validation; it exists for negative controls
    and for candidates that are checked later.
    """

    def __init__(self, lattice, values, *, validate=True):
        super().__init__(lattice, values)
        if validate:
            v = check_gamma(lattice, self.values)
            if v is not None:
                raise MeasureError(f"not a flavored measure: {v}", v)

    @classmethod
    def unchecked(cls, lattice, values) -> "GammaMeasure":
        return cls(lattice, values, validate=False)

    def __le__(self, other: "GammaMeasure") -> bool:
        return all(self.values[a] <= other.values[a] for a in self.lattice.elements)

    def denominator(self) -> int:
        return math.lcm(*(v.value.denominator for v in self.values.values()))


def lift_gamma(mu: GammaMeasure) -> ClassicalMeasure:
    return ClassicalMeasure(mu.lattice, {a: gamma_collapse(v) for a, v in mu.items()})


def lift_iota(m: ClassicalMeasure) -> GammaMeasure:
    return GammaMeasure(m.lattice, {a: iota_section(v) for a, v in m.items()})


def pushforward(h: LatticeHom, mu: GammaMeasure) -> GammaMeasure:
    """Precompose ``mu`` (on ``h.target``) with ``h``, giving a measure on ``h.source``."""
    if not mu.lattice.same_as(h.target):
        raise MeasureError("measure does not live on the target of the homomorphism")
    if not check_hom(h):
        raise LatticeError("not a lattice homomorphism")
    return GammaMeasure(h.source, {a: mu[h(a)] for a in h.source.elements})


def from_weights(lat: FinDistLattice, weights: Mapping) -> ClassicalMeasure:
    """Measure putting mass ``weights[j]`` on each join-irreducible ``j``."""
    _require_nondegenerate(lat)
    ji = join_irreducibles(lat)
    if set(weights) != set(ji.elements):
        raise MeasureError("weights must be given for exactly the join-irreducibles")
    w = {j: Fraction(x) for j, x in weights.items()}
    if any(x < 0 for x in w.values()) or sum(w.values()) != 1:
        raise MeasureError("weights must be non-negative and sum to 1")
    values = {a: sum((w[j] for j in ji.elements if lat.leq(j, a)), Fraction(0))
              for a in lat.elements}
    return ClassicalMeasure(lat, values)


def dirac(lat: FinDistLattice, j) -> ClassicalMeasure:
    ji = join_irreducibles(lat).elements
    return from_weights(lat, {x: Fraction(int(x == j)) for x in ji})


@dataclass(frozen=True)
class FsFunction:
    """Finitely supported flavored mass function on a finite carrier."""

    values: Mapping

    def __post_init__(self):
        try:
            total = plus_all(self.support_values())
        except DomainError:
            raise MeasureError("support values overflow 1^o") from None
        if total != ONE:
            raise MeasureError(f"support values sum to {total}, not 1^o")

    @property
    def carrier(self) -> tuple:
        return tuple(self.values)

    def support(self) -> list:
        return [x for x, v in self.values.items() if v != ZERO]

    def support_values(self) -> list[GammaValue]:
        return [self.values[x] for x in self.support()]


def plus_all(xs: Iterable[GammaValue]) -> GammaValue:
    out = ZERO
    for x in xs:
        out = plus(out, x)
    return out


def fs_integrate(f: FsFunction, subset: Iterable) -> GammaValue:
    """Sum of ``f`` over ``subset`` intersected with the support, in carrier order."""
    subset = set(subset)
    return plus_all(v for x, v in f.values.items() if x in subset and v != ZERO)


def integral_measure(f: FsFunction, lattice: FinDistLattice) -> GammaMeasure:
    """The measure ``M -> sum of f over M`` on a lattice of subsets of the carrier."""
    return GammaMeasure(lattice, {m: fs_integrate(f, m) for m in lattice.elements})


# generators for property tests and soundness families

def random_weights(lat: FinDistLattice, rng: random.Random, max_den: int = 4) -> dict:
    ji = list(join_irreducibles(lat).elements)
    den = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, den) for _ in range(len(ji) - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return {j: Fraction(c, den) for j, c in zip(ji, parts)}


def random_gamma_measure(lat: FinDistLattice, rng: random.Random, *, max_den: int = 4,
                         perturb: int = 2) -> GammaMeasure:
    """Lift of a random weight measure, then up to ``perturb`` attempts to lower
    a non-extremal value q^o to q^-, each kept only if the result still validates."""
    mu = lift_iota(from_weights(lat, random_weights(lat, rng, max_den)))
    values = dict(mu.values)
    candidates = [a for a in lat.elements if a not in (lat.bottom, lat.top)]
    for _ in range(perturb):
        if not candidates:
            break
        a = rng.choice(candidates)
        v = values[a]
        if v.value == 0 or v.is_minus:
            continue
        trial = dict(values)
        trial[a] = minus(v.value)
        if check_gamma(lat, trial) is None:
            values = trial
    return GammaMeasure(lat, values)


def grid_measures(lat: FinDistLattice, n: int) -> list[GammaMeasure]:
    """Every measure on ``lat`` valued in the flavored grid I_n (exhaustive)."""
    _require_nondegenerate(lat)
    inner = [a for a in lat.elements if a not in (lat.bottom, lat.top)]
    vals = flavored_grid(n)
    out = []

    def extend(i, acc):
        if i == len(inner):
            full = dict(acc)
            full[lat.bottom] = ZERO
            full[lat.top] = ONE
            if check_gamma(lat, full) is None:
                out.append(GammaMeasure(lat, full, validate=False))
            return
        a = inner[i]
        for v in vals:
            # prune on monotonicity against already assigned elements
            if all((not lat.leq(b, a) or acc[b] <= v) and (not lat.leq(a, b) or v <= acc[b])
                   for b in acc):
                acc[a] = v
                extend(i + 1, acc)
                del acc[a]

    extend(0, {})
    return out


def parse_measure_values(lat: FinDistLattice, values: Mapping[str, str], parse) -> dict:
    out = {}
    for name, text in values.items():
        try:
            out[lat.element(name)] = parse(text)
        except DomainError as exc:
            raise MeasureError(f"bad value for {name!r}: {exc}") from None
    return out
