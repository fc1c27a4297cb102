import functools
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from stonelim.gamma import circ, minus


@st.composite
def gamma_values(draw, max_den=24):
    den = draw(st.integers(1, max_den))
    num = draw(st.integers(0, den))
    q = Fraction(num, den)
    if q > 0 and draw(st.booleans()):
        return minus(q)
    return circ(q)


def rationals(max_den=24):
    return st.builds(lambda d, n: Fraction(min(n, d), d), st.integers(1, max_den),
                     st.integers(0, max_den))


def random_poset(rng, size, density=0.4):
    """Random order on ``p0..p{size-1}``; edges only go upwards in index order."""
    from stonelim.lattice import FinPoset

    names = [f"p{i}" for i in range(size)]
    pairs = [(names[i], names[j]) for i in range(size) for j in range(i + 1, size)
             if rng.random() < density]
    return FinPoset(names, pairs)


def random_lattice(rng, max_size=8):
    """Down-set lattice of a random poset with at most ``max_size`` elements."""
    from stonelim.lattice import downset_lattice

    while True:
        lat = downset_lattice(random_poset(rng, rng.randint(1, 4)))
        if 2 <= len(lat) <= max_size:
            return lat


def two_atoms_below_top():
    """Down-sets of a < c > b: five elements, with {a} v {b} strictly below the top."""
    from stonelim.lattice import FinPoset, downset_lattice

    return downset_lattice(FinPoset(["a", "b", "c"], [("a", "c"), ("b", "c")]))


def random_monotone(rng, p, q):
    """A monotone map built along a linear extension of ``p``."""
    out = {}
    for a in sorted(p.elements, key=lambda x: sum(p.leq(y, x) for y in p.elements)):
        lower = [out[b] for b in out if p.leq(b, a)]
        options = [y for y in q.elements if all(q.leq(l, y) for l in lower)]
        if not options:
            const = rng.choice(q.elements)
            return {x: const for x in p.elements}
        out[a] = rng.choice(options)
    return out


DATA = Path(__file__).resolve().parent.parent / "data"


@functools.lru_cache(maxsize=None)
def binary_fragment():
    """The fixed twelve-formula fragment over one binary relation ``E``."""
    from stonelim.fo import Signature, parse_formula_file

    sig = Signature({"E": 2})
    return sig, parse_formula_file((DATA / "binary_fragment.txt").read_text(), sig)


@functools.lru_cache(maxsize=None)
def small_binary_structures(max_size=3):
    from stonelim.fo import Signature, all_structures

    sig = Signature({"E": 2})
    return tuple(a for k in range(1, max_size + 1) for a in all_structures(sig, k))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
