"""Command-line front end.

Exit status: 0 on success, 1 on domain errors and failed checks, 2 on usage errors.
All numbers are printed as exact rationals or flavored rationals.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .errors import StoneLimError
from .fo.pairing import stone_pairing_classical, stone_pairing_gamma, type_table
from .fo.parser import parse_formula, parse_formula_file
from .fo.structures import load_structure
from .fo.syntax import Signature, to_text
from .gamma import (flavored_grid, format_gamma, format_rational, mip, miss, parse_gamma,
                    parse_rational, plus, Grid)
from .lattice import (FinDistLattice, LatticeHom, builtin_lattice, join_irreducibles, label,
                      lattice_from_json, prime_filters)
from .limits import GENERATORS, LADDER_SIGNATURE, StructureSequence, parse_range, sequence_report
from .measures import (ClassicalMeasure, GammaMeasure, check_classical, check_gamma, lift_gamma,
                       lift_iota, parse_measure_values, pushforward)
from . import plogic

# formulas available by name in every formula argument and formula file
LIBRARY_SOURCE = {
    "psi": "forall y. !(x < y) & exists z. (!(z < x) & !(z = x))",
}


def library(signature: Signature | None = None) -> dict:
    if signature is not None and "<" not in signature.arities:
        return {}
    return {k: parse_formula(v, LADDER_SIGNATURE) for k, v in LIBRARY_SOURCE.items()}


class UsageError(Exception):
    pass


# -- loaders -------------------------------------------------------------------

def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


class LatticeCache:
    """Resolves lattice references so equal references give the same object."""

    def __init__(self):
        self._seen: dict[str, FinDistLattice] = {}

    def get(self, ref) -> FinDistLattice:
        key = json.dumps(ref, sort_keys=True)
        if key not in self._seen:
            if isinstance(ref, dict):
                lat = lattice_from_json(ref)
            elif Path(ref).suffix == ".json" or Path(ref).is_file():
                lat = lattice_from_json(_read_json(ref))
            else:
                lat = builtin_lattice(ref)
            self._seen[key] = lat
        return self._seen[key]


def _load_measure(path, cache: LatticeCache, classical: bool = False):
    obj = _read_json(path)
    if "lattice" not in obj or "values" not in obj:
        raise UsageError(f"{path}: measure files need 'lattice' and 'values'")
    lat = cache.get(obj["lattice"])
    values = {k: str(v) for k, v in obj["values"].items()}
    if classical:
        return lat, parse_measure_values(lat, values, parse_rational)
    return lat, parse_measure_values(lat, values, parse_gamma)


def _load_hom(path, cache: LatticeCache) -> LatticeHom:
    obj = _read_json(path)
    src, tgt = cache.get(obj["source"]), cache.get(obj["target"])
    mapping = {src.element(k): tgt.element(v) for k, v in obj["mapping"].items()}
    return LatticeHom(src, tgt, mapping)


def _formula_table(args, signature):
    named = library(signature)
    if getattr(args, "formulas", None):
        for name, f in parse_formula_file(Path(args.formulas).read_text(), signature, named):
            named.setdefault(name, f)
    return named


def _print_values(lat, values, fmt, out):
    for a in lat.elements:
        out.write(f"{label(a)}: {fmt(values[a])}\n")


# -- gamma ---------------------------------------------------------------------

_VAL = r"\d+(?:\s*/\s*\d+)?(?:\s*\^\s*[-o])?"
_EXPR = re.compile(rf"^\s*({_VAL})\s*(?:([-+])\s*({_VAL}))?\s*$")


def cmd_gamma_calc(args, out):
    m = _EXPR.match(args.expr)
    if not m:
        raise UsageError(f"cannot parse expression {args.expr!r}; expected 'x - y', 'x + y' or 'x'")
    x = parse_gamma(m.group(1))
    if m.group(2) is None:
        out.write(format_gamma(x) + "\n")
        return 0
    y = parse_gamma(m.group(3))
    if m.group(2) == "+":
        if args.dual:
            raise UsageError("--dual only applies to subtraction")
        res = plus(x, y)
    else:
        res = miss(x, y) if args.dual else mip(x, y)
    out.write(format_gamma(res) + "\n")
    return 0


def cmd_gamma_grid(args, out):
    vals = flavored_grid(args.n) if args.flavored else list(Grid(args.n))
    out.write(" ".join(format_gamma(v) for v in vals) + "\n")
    return 0


# -- lattice -------------------------------------------------------------------

def cmd_lattice_show(args, out):
    lat = LatticeCache().get(args.lattice)
    out.write(f"elements: {' '.join(label(e) for e in lat.elements)}\n")
    out.write(f"bottom: {label(lat.bottom)}\ntop: {label(lat.top)}\n")
    for a, b in lat.covers():
        out.write(f"cover: {label(a)} < {label(b)}\n")
    ji = join_irreducibles(lat)
    out.write(f"join-irreducibles: {' '.join(label(j) for j in ji.elements)}\n")
    return 0


def cmd_lattice_primes(args, out):
    lat = LatticeCache().get(args.lattice)
    filters = prime_filters(lat)
    for f in filters:
        gen = lat.meet_all(f)
        members = [label(e) for e in lat.elements if e in f]
        out.write(f"up({label(gen)}): {' '.join(members)}\n")
    out.write(f"# {len(filters)} prime filters\n")
    return 0


def cmd_lattice_check(args, out):
    lat = LatticeCache().get(args.lattice)
    out.write(f"ok: distributive lattice with {len(lat)} elements\n")
    return 0


# -- measure -------------------------------------------------------------------

def cmd_measure_check(args, out):
    lat, values = _load_measure(args.measure, LatticeCache(), classical=args.classical)
    v = (check_classical if args.classical else check_gamma)(lat, values)
    if v is None:
        out.write("ok\n")
        return 0
    out.write(f"violation: {v}\n")
    return 1


def cmd_measure_lift(args, out):
    if args.iota:
        lat, values = _load_measure(args.measure, LatticeCache(), classical=True)
        mu = lift_iota(ClassicalMeasure(lat, values))
        _print_values(lat, mu.values, format_gamma, out)
    else:
        lat, values = _load_measure(args.measure, LatticeCache())
        m = lift_gamma(GammaMeasure(lat, values))
        _print_values(lat, m.values, format_rational, out)
    return 0


def cmd_measure_push(args, out):
    cache = LatticeCache()
    lat, values = _load_measure(args.measure, cache)
    h = _load_hom(args.hom, cache)
    mu = pushforward(h, GammaMeasure(lat, values))
    _print_values(h.source, mu.values, format_gamma, out)
    return 0


# -- pair ----------------------------------------------------------------------

def cmd_pair_eval(args, out):
    a = load_structure(args.structure)
    named = _formula_table(args, a.signature)
    phi = parse_formula(args.formula, a.signature, named)
    c = stone_pairing_classical(a, phi, args.vars, args.workers)
    g = stone_pairing_gamma(a, phi, args.vars, args.workers)
    out.write(f"formula: {to_text(phi, a.signature)}\n")
    out.write(f"classical: {format_rational(c)}\n")
    out.write(f"gamma: {format_gamma(g)}\n")
    return 0


def cmd_pair_table(args, out):
    a = load_structure(args.structure)
    formulas = parse_formula_file(Path(args.formulas).read_text(), a.signature,
                                  library(a.signature))
    t = type_table(a, [f for _, f in formulas], args.vars)
    out.write("pattern," + ",".join(n for n, _ in formulas) + ",count,mass\n")
    for p, count in t.counts.items():
        bits = ",".join("1" if b else "0" for b in p)
        out.write(f"{''.join('1' if b else '0' for b in p)},{bits},{count},"
                  f"{format_gamma(t.mass(p))}\n")
    out.write(f"# assignments={t.total} vars={args.vars}\n")
    return 0


# -- limits --------------------------------------------------------------------

def cmd_limits_report(args, out):
    seq = StructureSequence(args.generator, parse_range(args.range) if args.range else ())
    if not seq.indices:
        raise UsageError("an index --range is required for generated sequences")
    signature = seq.structure(seq.indices[0]).signature
    formulas = parse_formula_file(Path(args.formulas).read_text(), signature, library(signature))
    eps = parse_rational(args.eps) if args.eps else None
    report = sequence_report(seq, formulas, args.vars, args.window, eps, args.workers)
    text = report.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return 0


# -- plogic --------------------------------------------------------------------

def _family(args, lat):
    fam = plogic.measure_family(lat, args.grid, args.random, args.seed)
    return fam, f"# family: exhaustive I_{args.grid} + {args.random} random (seed {args.seed}), " \
                f"{len(fam)} measures\n"


def cmd_plogic_sat(args, out):
    lat, values = _load_measure(args.measure, LatticeCache())
    mu = GammaMeasure(lat, values)
    phi = plogic.parse_pformula(args.formula, lat)
    out.write(("true" if plogic.p_satisfies(mu, phi, lat) else "false") + "\n")
    return 0


def cmd_plogic_sound(args, out):
    lat = LatticeCache().get(args.lattice)
    fam, prov = _family(args, lat)
    axioms = plogic.AXIOMS if args.axiom == "all" else (args.axiom,)
    out.write(prov)
    total = 0
    for ax in axioms:
        viol = plogic.check_soundness(ax, lat, fam, args.grid)
        n_inst = len(plogic.axiom_instances(ax, lat, args.grid))
        out.write(f"{ax}: {n_inst} instances, {len(viol)} violations\n")
        for v in viol[:10]:
            out.write(f"  {v}\n")
        total += len(viol)
    return 0 if total == 0 else 1


def cmd_plogic_entail(args, out):
    lat = LatticeCache().get(args.lattice)
    phi = plogic.parse_pformula(args.phi, lat)
    psi = plogic.parse_pformula(args.psi, lat)
    thresholds = [a.threshold for a in plogic.atoms_of(phi) + plogic.atoms_of(psi)]
    if args.grid is None:
        args.grid = plogic.default_grid([], thresholds)
    fam, prov = _family(args, lat)
    out.write(prov)
    res = plogic.entails(phi, psi, fam)
    if res.holds:
        out.write(f"holds on family ({len(fam)} measures; family-relative)\n")
    else:
        out.write("countermodel:\n")
        _print_values(lat, res.countermodel.values, format_gamma, out)
    return 0


def cmd_plogic_roundtrip(args, out):
    lat, values = _load_measure(args.measure, LatticeCache())
    mu = GammaMeasure(lat, values)
    f = plogic.filter_from_measure(mu, grid=args.grid)
    out.write(f"# grid=I_{f.grid} resolution=I_{f.resolution} atoms={len(f.atoms)}\n")
    for atom in f.sorted_atoms():
        out.write(f"{atom}\n")
    back = plogic.measure_from_filter(f)
    _print_values(lat, back.values, format_gamma, out)
    same = back == mu
    out.write(f"roundtrip: {'identity' if same else 'differs'}\n")
    return 0 if same else 1


# -- parser ----------------------------------------------------------------------

def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _nonneg(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stonelim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True)

    g = sub.add_parser("gamma", help="flavored value arithmetic").add_subparsers(
        dest="cmd", required=True)
    s = g.add_parser("calc", help="evaluate 'x - y', 'x + y' or normalize 'x'")
    s.add_argument("expr")
    s.add_argument("--dual", action="store_true", help="use the dual minus for '-'")
    s.set_defaults(func=cmd_gamma_calc)
    s = g.add_parser("grid", help="list I_n")
    s.add_argument("n", type=_positive)
    s.add_argument("--flavored", action="store_true", help="double every positive point")
    s.set_defaults(func=cmd_gamma_grid)

    lt = sub.add_parser("lattice", help="finite distributive lattices").add_subparsers(
        dest="cmd", required=True)
    for name, func, hlp in (("show", cmd_lattice_show, "elements, covers, join-irreducibles"),
                            ("primes", cmd_lattice_primes, "prime filters"),
                            ("check", cmd_lattice_check, "validate a lattice file")):
        s = lt.add_parser(name, help=hlp)
        s.add_argument("lattice", help="JSON file or builtin (diamond, chain:N, boolean:K)")
        s.set_defaults(func=func)

    m = sub.add_parser("measure", help="measures on lattices").add_subparsers(
        dest="cmd", required=True)
    s = m.add_parser("check", help="validate a measure file")
    s.add_argument("measure")
    s.add_argument("--classical", action="store_true")
    s.set_defaults(func=cmd_measure_check)
    s = m.add_parser("lift", help="collapse flavors, or embed a classical measure with --iota")
    s.add_argument("measure")
    s.add_argument("--iota", action="store_true")
    s.set_defaults(func=cmd_measure_lift)
    s = m.add_parser("push", help="precompose a measure with a lattice homomorphism")
    s.add_argument("measure")
    s.add_argument("--hom", required=True)
    s.set_defaults(func=cmd_measure_push)

    pr = sub.add_parser("pair", help="Stone pairings").add_subparsers(dest="cmd", required=True)
    s = pr.add_parser("eval", help="pairing of one formula with one structure")
    s.add_argument("--structure", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--formulas", help="formula file providing named formulas")
    s.add_argument("--vars", type=_nonneg, required=True)
    s.add_argument("--workers", type=_positive, default=1)
    s.set_defaults(func=cmd_pair_eval)
    s = pr.add_parser("table", help="type table of a formula file")
    s.add_argument("--structure", required=True)
    s.add_argument("--formulas", required=True)
    s.add_argument("--vars", type=_nonneg, required=True)
    s.set_defaults(func=cmd_pair_table)

    li = sub.add_parser("limits", help="structure sequences").add_subparsers(
        dest="cmd", required=True)
    s = li.add_parser("report", help="CSV of pairings and convergence verdicts")
    s.add_argument("--generator", required=True,
                   help=f"one of {', '.join(sorted(GENERATORS))}, or file:a.json,b.json")
    s.add_argument("--range")
    s.add_argument("--formulas", required=True)
    s.add_argument("--vars", type=_nonneg, required=True)
    s.add_argument("--window", type=_positive, default=20)
    s.add_argument("--eps")
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_limits_report)

    pl = sub.add_parser("plogic", help="probabilistic atoms").add_subparsers(
        dest="cmd", required=True)
    s = pl.add_parser("sat", help="truth of a formula at a measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--formula", required=True)
    s.set_defaults(func=cmd_plogic_sat)
    for name, func in (("sound", cmd_plogic_sound), ("entail", cmd_plogic_entail)):
        s = pl.add_parser(name, help="axiom soundness" if name == "sound" else
                          "entailment over a measure family")
        s.add_argument("--lattice", required=True)
        if name == "sound":
            s.add_argument("--axiom", choices=plogic.AXIOMS + ("all",), default="all")
            s.add_argument("--grid", type=_positive, default=4)
        else:
            s.add_argument("--phi", required=True)
            s.add_argument("--psi", required=True)
            s.add_argument("--grid", type=_positive)
        s.add_argument("--random", type=_nonneg, default=0, help="extra random measures")
        s.add_argument("--seed", type=int, default=0)
        s.set_defaults(func=func)
    s = pl.add_parser("roundtrip", help="measure -> filter -> measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--grid", type=_positive)
    s.set_defaults(func=cmd_plogic_roundtrip)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"stonelim: error: {exc}\n")
        return 2
    except (StoneLimError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"stonelim: {type(exc).__name__}: {exc}\n")
        return 1
