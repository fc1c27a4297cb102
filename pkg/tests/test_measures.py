import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_lattice, random_monotone, random_poset, two_atoms_below_top
from stonelim.errors import LatticeError, MeasureError
from stonelim.gamma import ONE, ZERO, circ, mip, miss, parse_gamma, plus
from stonelim.lattice import (FinDistLattice, FinPoset, chain_lattice, diamond, downset_lattice,
                              hom_from_monotone_map, identity_hom, sublattice_closure)
from stonelim.measures import (ClassicalMeasure, FsFunction, GammaMeasure, check_classical,
                               check_gamma, dirac, from_weights, fs_integrate, grid_measures,
                               integral_measure, lift_gamma, lift_iota, pushforward,
                               random_gamma_measure, random_weights)

seeds = st.integers(0, 10_000)
g = parse_gamma


def chain3():
    return FinDistLattice(["0", "a", "1"], [("0", "a"), ("a", "1")])


class TestClassical:
    def test_examples(self):
        d = diamond()
        ok = {"0": F(0), "a": F(1, 2), "b": F(1, 2), "1": F(1)}
        assert check_classical(d, ok) is None
        v = check_classical(d, {**ok, "1": F(3, 4)})
        assert v is not None
        bad = dict(ok)
        bad["1"] = F(1)
        bad["a"] = F(1, 4)
        v = check_classical(d, bad)
        assert v.kind == "modular" and set(v.witness) == {"a", "b"}
        assert check_classical(chain_lattice(2), {"0": F(0), "1": F(1)}) is None

    def test_degenerate_rejected(self):
        with pytest.raises(LatticeError):
            check_classical(downset_lattice(FinPoset([])), {frozenset(): F(0)})

    def test_partial_map_rejected(self):
        with pytest.raises(MeasureError):
            check_classical(diamond(), {"0": F(0)})


class TestGamma:
    def test_iota_of_classical(self):
        d = diamond()
        m = from_weights(d, {"a": F(1, 2), "b": F(1, 2)})
        assert check_gamma(d, lift_iota(m).values) is None

    def test_monotonicity_violation(self):
        lat = two_atoms_below_top()
        a, b = lat.element("{a}"), lat.element("{a,b}")
        values = {x: ZERO for x in lat.elements}
        values.update({a: g("3/4^o"), b: g("1/2^o"), lat.element("{b}"): ZERO, lat.top: ONE})
        assert check_gamma(lat, values).kind == "monotone"
        d = diamond()
        assert check_gamma(d, {"0": ZERO, "a": g("3/4^o"), "b": ZERO, "1": g("1/2^o")}) is not None

    def test_flavored_join_example(self):
        # both inequalities evaluated literally
        assert miss(g("1/2^o"), ZERO) == g("1/2^-") == mip(g("1^-"), g("1/2^o"))
        assert mip(g("1/2^o"), ZERO) == g("1/2^o") >= miss(g("1^-"), g("1/2^o")) == g("1/2^-")
        # a v b carries 1^-: fine when it sits strictly below the top ...
        lat = two_atoms_below_top()
        values = {lat.bottom: ZERO, lat.element("{a}"): g("1/2^o"), lat.element("{b}"): g("1/2^o"),
                  lat.element("{a,b}"): g("1^-"), lat.top: ONE}
        assert check_gamma(lat, values) is None
        # ... and a bounds violation in the diamond, where a v b is the top
        d = diamond()
        v = check_gamma(d, {"0": ZERO, "a": g("1/2^o"), "b": g("1/2^o"), "1": g("1^-")})
        assert v.kind == "top"

    def test_invalid_construction(self):
        with pytest.raises(MeasureError):
            GammaMeasure(diamond(), {"0": ZERO, "a": ONE, "b": ONE, "1": ONE})

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_random_measures_valid(self, seed):
        rng = random.Random(seed)
        lat = random_lattice(rng, 12)
        mu = random_gamma_measure(lat, rng)
        assert check_gamma(lat, mu.values) is None
        assert check_classical(lat, lift_gamma(mu).values) is None


class TestLifts:
    def test_examples(self):
        c = chain3()
        mu = GammaMeasure(c, {"0": ZERO, "a": g("1/2^-"), "1": ONE})
        assert lift_gamma(mu)["a"] == F(1, 2)
        two = chain_lattice(2)
        assert lift_gamma(GammaMeasure(two, {"0": ZERO, "1": ONE})).values == {"0": 0, "1": 1}
        uniform = lift_iota(from_weights(diamond(), {"a": F(1, 2), "b": F(1, 2)}))
        assert all(not v.is_minus for v in uniform.values.values())
        assert lift_iota(ClassicalMeasure(c, {"0": 0, "a": F(1, 3), "1": 1}))["a"] == g("1/3^o")

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_retraction(self, seed):
        rng = random.Random(seed)
        lat = random_lattice(rng, 16)
        m = from_weights(lat, random_weights(lat, rng))
        assert lift_gamma(lift_iota(m)) == m

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_lift_gamma_monotone(self, seed):
        rng = random.Random(seed)
        family = grid_measures(diamond(), rng.choice([2, 3, 4]))
        m1, m2 = rng.choice(family), rng.choice(family)
        if m1 <= m2:
            assert all(lift_gamma(m1)[a] <= lift_gamma(m2)[a] for a in m1.lattice.elements)

    def test_exhaustive_grid_measures_retract(self):
        for mu in grid_measures(chain_lattice(4), 4):
            m = lift_gamma(mu)
            assert lift_gamma(lift_iota(m)) == m


class TestWeights:
    def test_examples(self):
        d = diamond()
        m = from_weights(d, {"a": F(1, 2), "b": F(1, 2)})
        assert (m["a"], m["b"], m["1"]) == (F(1, 2), F(1, 2), F(1))
        for a in d.elements:
            assert dirac(d, "a")[a] == (1 if d.leq("a", a) else 0)
        assert from_weights(chain3(), {"a": F(1, 3), "1": F(2, 3)})["a"] == F(1, 3)

    @pytest.mark.parametrize("w", [{"a": F(1, 2)}, {"a": F(3, 4), "b": F(1, 2)},
                                   {"a": F(3, 2), "b": F(-1, 2)}])
    def test_bad_weights(self, w):
        with pytest.raises(MeasureError):
            from_weights(diamond(), w)


class TestPushforward:
    def test_identity_and_restriction(self):
        d = diamond()
        mu = lift_iota(from_weights(d, {"a": F(1, 4), "b": F(3, 4)}))
        assert pushforward(identity_hom(d), mu) == mu
        sub, inc = sublattice_closure(d, ["a"])
        nu = pushforward(inc, mu)
        assert nu.values == {x: mu[x] for x in sub.elements}

    def test_wrong_lattice(self):
        d = diamond()
        mu = lift_iota(dirac(chain_lattice(3), "1"))
        with pytest.raises(MeasureError):
            pushforward(identity_hom(d), mu)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_composition(self, seed):
        rng = random.Random(seed)
        p, q, r = (random_poset(rng, rng.randint(1, 3)) for _ in range(3))
        f, gmap = random_monotone(rng, p, q), random_monotone(rng, q, r)
        hf = hom_from_monotone_map(f, p, q)
        hg = hom_from_monotone_map(gmap, q, r)
        # Down(r) -> Down(q) -> Down(p); measures travel the other way
        if len(hf.target) < 2:
            return
        mu = random_gamma_measure(hf.target, rng)
        composite = pushforward(hf.compose(hg), mu)
        stepwise = pushforward(hg, pushforward(hf, mu))
        assert composite == stepwise


class TestFs:
    def test_examples(self):
        f = FsFunction({"x": g("1/4^o"), "y": g("3/4^o")})
        assert fs_integrate(f, []) == ZERO
        assert fs_integrate(f, ["x", "y", "z"]) == ONE
        assert fs_integrate(f, ["x"]) == g("1/4^o")

    def test_normalization(self):
        with pytest.raises(MeasureError):
            FsFunction({"x": g("1/4^o")})
        with pytest.raises(MeasureError):
            FsFunction({"x": g("3/4^o"), "y": g("3/4^o")})
        with pytest.raises(MeasureError):
            FsFunction({"x": g("1/2^-"), "y": g("1/2^o")})   # sums to 1^-

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_integral_is_measure(self, seed):
        rng = random.Random(seed)
        carrier = [f"x{i}" for i in range(rng.randint(1, 5))]
        f = _random_fs(rng, carrier)
        power = downset_lattice(FinPoset(carrier))
        mu = integral_measure(f, power)
        assert check_gamma(power, mu.values) is None
        # independent of summation order
        for m in power.elements:
            order = list(m)
            rng.shuffle(order)
            total = ZERO
            for x in order:
                if f.values[x] != ZERO:
                    total = plus(total, f.values[x])
            assert total == mu[m]


def _random_fs(rng, carrier):
    den = rng.randint(1, 6)
    cuts = sorted(rng.randint(0, den) for _ in range(len(carrier) - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return FsFunction({x: circ(F(c, den)) for x, c in zip(carrier, parts)})


class TestClosedness:
    def test_pointwise_limit_stays_valid(self):
        # mu_k(a) = (1/2 - 1/(2k))^o on a 3-chain tends to 1/2^o pointwise
        c = chain3()
        seq = [GammaMeasure(c, {"0": ZERO, "a": circ(F(1, 2) - F(1, 2 * k)), "1": ONE})
               for k in range(1, 30)]
        limit = {"0": ZERO, "a": g("1/2^o"), "1": ONE}
        assert all(check_gamma(c, m.values) is None for m in seq)
        assert check_gamma(c, limit) is None

    def test_grid_measures_counts(self):
        # classical part k/4 on the first atom, flavors restricted by additivity
        assert len(grid_measures(diamond(), 4)) == 13
        assert all(check_gamma(diamond(), m.values) is None for m in grid_measures(diamond(), 4))
