"""Rational part of the doubled unit interval.

Every rational q in (0, 1] appears twice, as an approximated value q^- and an
achieved value q^o, with q^- immediately below q^o. Zero only exists as 0^o,
which is the bottom. Values are immutable; all operations are pure.

Textual form: ``1/2^-``, ``3/4^o``; bare ``0`` and ``1`` mean ``0^o`` and ``1^o``.
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import DomainError

__all__ = [
    "Flavor", "GammaValue", "BasicClopen", "Grid",
    "unit_rational", "minus", "circ", "ZERO", "ONE",
    "compare", "mip", "miss", "plus", "gamma_collapse", "iota_section",
    "in_clopen", "grid_projection", "finite_join", "finite_meet",
    "flavored_grid", "parse_gamma", "format_gamma", "parse_rational", "format_rational",
]


class Flavor(str, enum.Enum):
    MINUS = "-"
    CIRC = "o"


def unit_rational(x) -> Fraction:
    """Coerce ``x`` to a reduced fraction and check it lies in [0, 1]."""
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    q = Fraction(x)
    if not 0 <= q <= 1:
        raise DomainError(f"{q} is outside [0, 1]")
    return q


@functools.total_ordering
@dataclass(frozen=True)
class GammaValue:
    value: Fraction
    flavor: Flavor = Flavor.CIRC

    def __post_init__(self):
        object.__setattr__(self, "value", unit_rational(self.value))
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.flavor is Flavor.MINUS and self.value == 0:
            raise DomainError("0^- does not exist; 0^o is the bottom element")

    @property
    def is_minus(self) -> bool:
        return self.flavor is Flavor.MINUS

    def key(self) -> tuple[Fraction, int]:
        return (self.value, 0 if self.is_minus else 1)

    def __lt__(self, other):
        if not isinstance(other, GammaValue):
            return NotImplemented
        return self.key() < other.key()

    def __str__(self):
        return format_gamma(self)

    def __repr__(self):
        return f"GammaValue({format_gamma(self)!r})"


def minus(x) -> GammaValue:
    return GammaValue(x, Flavor.MINUS)


def circ(x) -> GammaValue:
    return GammaValue(x, Flavor.CIRC)


ZERO = circ(0)
ONE = circ(1)


def compare(x: GammaValue, y: GammaValue) -> int:
    """Three-way comparison: -1, 0 or 1."""
    kx, ky = x.key(), y.key()
    return (kx > ky) - (kx < ky)


def _check_domain(x: GammaValue, y: GammaValue, op: str) -> None:
    if not y <= x:
        raise DomainError(f"{x} {op} {y} is undefined: need {y} <= {x}")


def mip(x: GammaValue, y: GammaValue) -> GammaValue:
    """Partial minus, defined when ``y <= x``.

    On rational carriers the difference is always rational, so subtracting a
    minus-flavored value always lands on the achieved copy.
    """
    _check_domain(x, y, "-")
    d = x.value - y.value
    if y.is_minus:
        return circ(d)
    return GammaValue(d, x.flavor)


def miss(x: GammaValue, y: GammaValue) -> GammaValue:
    """Dual partial minus: join of ``x - q^o`` over ``y < q^o <= x``.

    Closed forms on rational carriers; ``tests/test_gamma_oracle.py`` checks them
    against the join evaluated on refining grids.
    """
    _check_domain(x, y, "-.")
    d = x.value - y.value
    if y.is_minus and not x.is_minus:
        return circ(d)
    # the threshold q may approach y from above but never reach it
    return minus(d) if d > 0 else ZERO


def plus(x: GammaValue, y: GammaValue) -> GammaValue:
    """Partial addition, defined when ``x <= 1^o - y``; left adjoint to ``- y``."""
    if not x <= mip(ONE, y):
        raise DomainError(f"{x} + {y} is undefined: need {x} <= {mip(ONE, y)}")
    flavor = Flavor.MINUS if (x.is_minus or y.is_minus) else Flavor.CIRC
    return GammaValue(x.value + y.value, flavor)


def gamma_collapse(x: GammaValue) -> Fraction:
    return x.value


def iota_section(r) -> GammaValue:
    return circ(unit_rational(r))


@dataclass(frozen=True)
class BasicClopen:
    """``upCirc p`` is the up-set of p^o; ``downMinus q`` is the down-set of q^-."""

    kind: str
    threshold: Fraction

    def __post_init__(self):
        if self.kind not in ("upCirc", "downMinus"):
            raise ValueError(f"unknown clopen kind {self.kind!r}")
        object.__setattr__(self, "threshold", unit_rational(self.threshold))
        if self.kind == "downMinus" and self.threshold == 0:
            raise DomainError("downMinus needs a positive threshold")

    def __contains__(self, x: GammaValue) -> bool:
        return in_clopen(x, self)

    def __str__(self):
        return f"{self.kind} {format_rational(self.threshold)}"


def in_clopen(x: GammaValue, c: BasicClopen) -> bool:
    if c.kind == "upCirc":
        return circ(c.threshold) <= x
    return x <= minus(c.threshold)


@dataclass(frozen=True)
class Grid:
    """The chain I_n = {0, 1/n, ..., 1}, as achieved values."""

    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("grid denominator must be positive")

    @property
    def elements(self) -> tuple[GammaValue, ...]:
        n = self.denominator
        return tuple(circ(Fraction(k, n)) for k in range(n + 1))

    def __iter__(self) -> Iterator[GammaValue]:
        return iter(self.elements)

    def __len__(self):
        return self.denominator + 1

    def __contains__(self, x) -> bool:
        if isinstance(x, GammaValue):
            if x.is_minus:
                return False
            x = x.value
        return (Fraction(x) * self.denominator).denominator == 1 and 0 <= x <= 1


def grid_projection(x: GammaValue, source: Grid | int, target: Grid | int) -> GammaValue:
    """Floor map from I_{mn} onto I_n."""
    source = source if isinstance(source, Grid) else Grid(source)
    target = target if isinstance(target, Grid) else Grid(target)
    if source.denominator % target.denominator:
        raise DomainError(
            f"I_{source.denominator} does not project onto I_{target.denominator}")
    if x not in source:
        raise DomainError(f"{x} is not an element of I_{source.denominator}")
    n = target.denominator
    return circ(Fraction(math.floor(x.value * n), n))


def finite_join(xs: Iterable[GammaValue]) -> GammaValue:
    return max(xs, default=ZERO)


def finite_meet(xs: Iterable[GammaValue]) -> GammaValue:
    xs = list(xs)
    if not xs:
        raise DomainError("the empty meet is not defined")
    return min(xs)


def flavored_grid(n: int) -> list[GammaValue]:
    """I_n with every positive point doubled, in increasing order (2n + 1 values)."""
    out = [ZERO]
    for k in range(1, n + 1):
        q = Fraction(k, n)
        out += [minus(q), circ(q)]
    return out


_GAMMA_RE = re.compile(r"^\s*(\d+)(?:\s*/\s*(\d+))?\s*(?:\^\s*([-o]))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = re.fullmatch(r"\s*(\d+)\s*(?:/\s*(\d+))?\s*", text)
    if not m:
        raise DomainError(f"cannot parse rational {text!r}")
    den = int(m.group(2) or 1)
    if den == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return unit_rational(Fraction(int(m.group(1)), den))


def parse_gamma(text: str) -> GammaValue:
    """Parse ``p/q^-`` or ``p/q^o``; an unflavored value is read as achieved."""
    m = _GAMMA_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse flavored value {text!r}")
    num, den, flav = m.groups()
    den = int(den or 1)
    if den == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return GammaValue(Fraction(int(num), den), Flavor(flav or "o"))


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def format_gamma(x: GammaValue) -> str:
    return f"{format_rational(x.value)}^{x.flavor.value}"
