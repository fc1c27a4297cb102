"""Structure sequences and convergence analysis of their pairings.

Convergence can only be judged on a finite prefix, so every verdict is
relative to the analyzed window. The analysis runs in three steps:

1. Split the last ``window`` values into the fewest interleaved subsequences
   (period ``p``) that are each monotone.
2. Extrapolate each subsequence's limit by fitting ``x_k = (a k + b) / (c k + d)``
   through its last three terms. The fit is exact for pairings whose counts
   grow linearly along the sequence.
3. Classical: converged when all extrapolated accumulation values lie within
   ``eps`` of a common target, diverged when two lie more than ``2 eps`` apart.
   Flavored: with the candidate rational limit ``r`` fixed, sort the tail into
   the two sides of the clopen ``upCirc r``. One side only means convergence to
   ``r^-`` or ``r^o``. Both sides recurring means divergence, with ``upCirc r``
   entered and exited as the witness.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import StructureError
from .fo.pairing import stone_pairing_classical
from .fo.structures import FinStructure, load_structure
from .fo.syntax import Formula, Signature
from .gamma import (BasicClopen, GammaValue, circ, format_gamma, format_rational, in_clopen,
                    minus)

LADDER_SIGNATURE = Signature({"<": 2})
DEFAULT_OSCILLATIONS = 5


def _strict_chain(names: Sequence[str]) -> set[tuple[str, str]]:
    return {(a, b) for i, a in enumerate(names) for b in names[i + 1:]}


def chain(n: int) -> FinStructure:
    """An ``n``-element chain with ``<`` the strict order."""
    if n < 1:
        raise StructureError("chain length must be at least 1")
    names = [f"c{i}" for i in range(1, n + 1)]
    return FinStructure(LADDER_SIGNATURE, tuple(names), {"<": frozenset(_strict_chain(names))},
                        name=f"chain({n})")


def ladder(n: int) -> FinStructure:
    """The n-th poset of the ladder sequence.

    ``ladder(2k-1)`` is a (k+1)-element chain; ``ladder(2k)`` is the same chain
    plus one isolated point.
    """
    if n < 1:
        raise StructureError("ladder index must be at least 1")
    k = (n + 1) // 2
    names = [f"c{i}" for i in range(1, k + 2)]
    rel = _strict_chain(names)
    if n % 2 == 0:
        names.append("iso")
    return FinStructure(LADDER_SIGNATURE, tuple(names), {"<": frozenset(rel)}, name=f"ladder({n})")


GENERATORS = {"ladder": ladder, "chain": chain}


@dataclass(frozen=True)
class StructureSequence:
    """A generator id with an index range, or an explicit list of structure files."""

    generator: str
    indices: tuple[int, ...] = ()
    paths: tuple[str, ...] = ()

    def __post_init__(self):
        if self.generator.startswith("file:") and not self.paths:
            paths = tuple(p for p in self.generator[5:].split(",") if p)
            object.__setattr__(self, "paths", paths)
            object.__setattr__(self, "indices", tuple(range(1, len(paths) + 1)))
        elif not self.generator.startswith("file:") and self.generator not in GENERATORS:
            raise StructureError(f"unknown generator {self.generator!r}")

    def __iter__(self):
        for i in self.indices:
            yield i, self.structure(i)

    def structure(self, i: int) -> FinStructure:
        if self.paths:
            a = load_structure(self.paths[i - 1])
        else:
            a = GENERATORS[self.generator](i)
        if not a.domain:
            raise StructureError(f"structure {i} of the sequence has an empty domain")
        return a


def parse_range(text: str) -> tuple[int, ...]:
    """``"1..40"`` (inclusive) or a comma list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class ConvergenceVerdict:
    status: str                       # converged | diverged | inconclusive
    limit: object = None              # Fraction or GammaValue when converged
    witness: BasicClopen | None = None
    entries: tuple[int, ...] = ()
    exits: tuple[int, ...] = ()
    accumulation: tuple[Fraction, ...] = ()
    window: int = 0
    eps: Fraction = Fraction(0)
    period: int | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def diverged(self) -> bool:
        return self.status == "diverged"

    def describe(self) -> str:
        if self.status == "converged":
            lim = self.limit
            text = format_gamma(lim) if isinstance(lim, GammaValue) else format_rational(lim)
            return f"converged({text})"
        return self.status

    def describe_witness(self) -> str:
        if self.witness is None:
            return ""
        return f"{self.witness} entries={len(self.entries)} exits={len(self.exits)}"


def _monotone(xs: Sequence[Fraction]) -> bool:
    up = all(a <= b for a, b in zip(xs, xs[1:]))
    down = all(a >= b for a, b in zip(xs, xs[1:]))
    return up or down


def _solve3(m: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Cramer's rule for a 3x3 system; None when singular."""
    def det(a):
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    d = det(m)
    if d == 0:
        return None
    out = []
    for col in range(3):
        mc = [row[:] for row in m]
        for r in range(3):
            mc[r][col] = rhs[r]
        out.append(det(mc) / d)
    return out


def extrapolate(xs: Sequence[Fraction]) -> Fraction | None:
    """Limit of a monotone sequence from its last three terms.

    Fits ``x_k (k + d) = a k + b`` (a Moebius map in k) and returns ``a``,
    clamped to [0, 1]. Eventually constant tails return their value. Returns
    None when the terms are not consistent with a bounded Moebius map.
    """
    xs = list(xs)
    if len(xs) < 3:
        return xs[-1] if xs and len(set(xs)) == 1 else None
    x0, x1, x2 = xs[-3:]
    if x0 == x1 == x2:
        return x2
    # unknowns a, b, d with k = 0, 1, 2:  a k + b - d x_k = k x_k
    m = [[Fraction(k), Fraction(1), -x] for k, x in enumerate((x0, x1, x2))]
    rhs = [k * x for k, x in enumerate((x0, x1, x2))]
    sol = _solve3(m, rhs)
    if sol is None:
        return None
    a, b, d = sol
    # the pole k = -d must lie strictly behind the fitted terms
    if d <= 0:
        return None
    return min(max(a, Fraction(0)), Fraction(1))


def _accumulation(tail: Sequence[Fraction]) -> tuple[int, list[Fraction]] | None:
    for p in range(1, len(tail) // 3 + 1):
        subs = [tail[i::p] for i in range(p)]
        if all(_monotone(s) for s in subs):
            limits = [extrapolate(s) for s in subs]
            if any(x is None for x in limits):
                continue
            return p, limits
    return None


def simplest_rational(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in [lo, hi] (Stern-Brocot descent)."""
    if lo > hi:
        raise ValueError("empty interval")
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # both endpoints share the integer part; recurse on reciprocals of fractional parts
    inner = simplest_rational(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def _candidate(limits: Sequence[Fraction], eps: Fraction) -> Fraction | None:
    lo, hi = min(limits), max(limits)
    if hi - lo > 2 * eps:
        return None
    if lo == hi:
        return lo
    return simplest_rational(max(hi - eps, Fraction(0)), min(lo + eps, Fraction(1)))


def default_eps(window: int) -> Fraction:
    return Fraction(1, 2 * window)


def _check_window(seq, window):
    if window < 3:
        raise ValueError("window must be at least 3")
    if len(seq) < window:
        raise ValueError(f"sequence has {len(seq)} values, fewer than the window {window}")


def classical_converge(seq: Sequence[Fraction], window: int,
                       eps: Fraction | None = None) -> ConvergenceVerdict:
    _check_window(seq, window)
    eps = default_eps(window) if eps is None else Fraction(eps)
    tail = [Fraction(x) for x in seq[-window:]]
    meta = dict(window=window, eps=eps)
    acc = _accumulation(tail)
    if acc is None:
        if max(tail) - min(tail) <= 2 * eps:
            lim = simplest_rational(max(tail) - eps, min(tail) + eps)
            return ConvergenceVerdict("converged", lim, **meta)
        return ConvergenceVerdict("inconclusive", **meta)
    period, limits = acc
    lim = _candidate(limits, eps)
    acc_vals = tuple(sorted(set(limits)))
    if lim is not None:
        return ConvergenceVerdict("converged", lim, accumulation=acc_vals, period=period, **meta)
    return ConvergenceVerdict("diverged", accumulation=acc_vals, period=period, **meta)


def _crossings(seq: Sequence[GammaValue], clopen: BasicClopen, offset: int = 1):
    entries, exits = [], []
    inside = [in_clopen(x, clopen) for x in seq]
    for i in range(1, len(seq)):
        if inside[i] and not inside[i - 1]:
            entries.append(i + offset)
        elif inside[i - 1] and not inside[i]:
            exits.append(i + offset)
    return inside, entries, exits


def gamma_converge(seq: Sequence[GammaValue], window: int, eps: Fraction | None = None,
                   min_oscillations: int = DEFAULT_OSCILLATIONS) -> ConvergenceVerdict:
    """Convergence in the doubled interval, decided by the side of ``upCirc r``
    on which the tail settles. Indices in ``entries``/``exits`` are 1-based
    positions in ``seq``."""
    _check_window(seq, window)
    eps = default_eps(window) if eps is None else Fraction(eps)
    tail = list(seq[-window:])
    start = len(seq) - window
    meta = dict(window=window, eps=eps)
    acc = _accumulation([x.value for x in tail])
    if acc is None:
        return ConvergenceVerdict("inconclusive", **meta)
    period, limits = acc
    acc_vals = tuple(sorted(set(limits)))
    r = _candidate(limits, eps)
    if r is None:
        # two separated accumulation values: look for an oscillating clopen between them
        lo, hi = acc_vals[0], acc_vals[-1]
        threshold = simplest_rational(lo + (hi - lo) / 4, hi - (hi - lo) / 4)
        witness = BasicClopen("upCirc", threshold)
        _, entries, exits = _crossings(tail, witness)
        if len(entries) >= min_oscillations and len(exits) >= min_oscillations:
            _, all_in, all_out = _crossings(seq, witness)
            return ConvergenceVerdict("diverged", witness=witness, entries=tuple(all_in),
                                      exits=tuple(all_out), accumulation=acc_vals,
                                      period=period, **meta)
        return ConvergenceVerdict("inconclusive", accumulation=acc_vals, period=period, **meta)

    witness = BasicClopen("upCirc", r)
    inside, entries, exits = _crossings(tail, witness)
    common = dict(accumulation=acc_vals, period=period, **meta)
    if len(entries) >= min_oscillations and len(exits) >= min_oscillations:
        _, all_in, all_out = _crossings(seq, witness)
        return ConvergenceVerdict("diverged", witness=witness, entries=tuple(all_in),
                                  exits=tuple(all_out), **common)
    # settled side: the final half of the window must sit on one side
    settled = inside[len(inside) // 2:]
    if all(settled):
        return ConvergenceVerdict("converged", circ(r), **common)
    if not any(settled) and r > 0:
        return ConvergenceVerdict("converged", minus(r), **common)
    return ConvergenceVerdict("inconclusive", **common)


@dataclass
class ReportRow:
    index: int
    formula: str
    classical: Fraction
    gamma: GammaValue
    verdict_classical: str = ""
    verdict_gamma: str = ""
    witness: str = ""


@dataclass
class Report:
    rows: list[ReportRow]
    verdicts: dict = field(default_factory=dict)   # formula name -> (classical, gamma)
    provenance: dict = field(default_factory=dict)

    COLUMNS = ("index", "formula", "classical", "gamma", "verdict_classical",
               "verdict_gamma", "witness")

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.provenance):
            buf.write(f"# {key}={self.provenance[key]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.index, r.formula, format_rational(r.classical), format_gamma(r.gamma),
                        r.verdict_classical, r.verdict_gamma, r.witness])
        return buf.getvalue()


def _pairings_at(args):
    a, formulas, n = args
    return [stone_pairing_classical(a, phi, n) for _, phi in formulas]


def sequence_report(seq: StructureSequence, formulas: Sequence[tuple[str, Formula]], n: int,
                    window: int, eps: Fraction | None = None, workers: int = 1,
                    min_oscillations: int = DEFAULT_OSCILLATIONS) -> Report:
    """Pairings of every formula along the sequence, with both verdicts.

    Pairings at different indices are computed independently (in parallel when
    ``workers > 1``); the verdicts are a sequential fold over the ordered results.
    """
    eps = default_eps(window) if eps is None else Fraction(eps)
    formulas = list(formulas)
    items = list(seq)
    jobs = [(a, formulas, n) for _, a in items]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_pairings_at, jobs))
    else:
        values = [_pairings_at(j) for j in jobs]

    rows = []
    verdicts = {}
    for fi, (name, _) in enumerate(formulas):
        classical = [v[fi] for v in values]
        flavored = [circ(x) for x in classical]
        vc = classical_converge(classical, window, eps)
        vg = gamma_converge(flavored, window, eps, min_oscillations)
        verdicts[name] = (vc, vg)
        for (idx, _), c, g in zip(items, classical, flavored):
            rows.append(ReportRow(idx, name, c, g, vc.describe(), vg.describe(),
                                  vg.describe_witness()))
    indices = [i for i, _ in items]
    provenance = {
        "generator": seq.generator,
        "indices": f"{indices[0]}..{indices[-1]}" if indices else "",
        "vars": n,
        "window": window,
        "eps": format_rational(eps),
        "min_oscillations": min_oscillations,
        "verdicts": "prefix-relative",
    }
    return Report(rows, verdicts, provenance)
