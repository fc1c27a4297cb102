import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from stonelim.errors import StructureError
from stonelim.fo import Not, parse_formula
from stonelim.fo.syntax import TRUE
from stonelim.gamma import BasicClopen, circ, gamma_collapse, minus
from stonelim.limits import (LADDER_SIGNATURE, StructureSequence, chain, classical_converge,
                             default_eps, extrapolate, gamma_converge, ladder, parse_range,
                             sequence_report, simplest_rational)

PSI = parse_formula("forall y. !(x < y) & exists z. (!(z < x) & !(z = x))", LADDER_SIGNATURE)


def ladder_values(k):
    """<not psi, ladder(k)>: 1 on odd indices, m/(m+2) on index 2m."""
    return F(1) if k % 2 else F(k // 2, k // 2 + 2)


class TestGenerators:
    def test_ladder_examples(self):
        a1, a2, a6 = ladder(1), ladder(2), ladder(6)
        assert (len(a1), len(a1.relations["<"])) == (2, 1)
        assert (len(a2), len(a2.relations["<"])) == (3, 1)
        assert "iso" in a2.domain and not any("iso" in t for t in a2.relations["<"])
        assert (len(a6), len(a6.relations["<"])) == (5, 6)
        with pytest.raises(StructureError):
            ladder(0)

    def test_chain(self):
        assert len(chain(4).relations["<"]) == 6
        with pytest.raises(StructureError):
            chain(0)

    def test_sequences(self):
        assert parse_range("1..4") == (1, 2, 3, 4)
        assert parse_range("2,5") == (2, 5)
        seq = StructureSequence("ladder", parse_range("1..3"))
        assert [len(a) for _, a in seq] == [2, 3, 3]
        with pytest.raises(StructureError):
            StructureSequence("petersen", (1,))

    def test_file_sequence(self, tmp_path):
        import json
        paths = []
        for k in (1, 2):
            p = tmp_path / f"a{k}.json"
            p.write_text(json.dumps(ladder(k).to_json()))
            paths.append(str(p))
        seq = StructureSequence("file:" + ",".join(paths))
        assert [len(a) for _, a in seq] == [2, 3]


class TestClassical:
    def test_constant(self):
        v = classical_converge([F(1, 3)] * 10, 5)
        assert v.converged and v.limit == F(1, 3)

    def test_ladder_prefix_40(self):
        seq = [ladder_values(k) for k in range(1, 41)]
        v = classical_converge(seq, 20, F(1, 20))
        assert v.converged
        assert abs(v.limit - 1) <= F(1, 20)
        assert v.period == 2

    def test_alternating(self):
        v = classical_converge([F(k % 2) for k in range(20)], 10)
        assert v.diverged

    def test_noise_is_inconclusive(self):
        rng = random.Random(3)
        seq = [F(rng.randint(0, 100), 100) for _ in range(30)]
        assert classical_converge(seq, 20).status in ("inconclusive", "diverged")

    def test_window_checks(self):
        with pytest.raises(ValueError):
            classical_converge([F(0)] * 3, 5)
        with pytest.raises(ValueError):
            classical_converge([F(0)] * 3, 2)

    def test_default_eps(self):
        assert default_eps(20) == F(1, 40)


class TestGamma:
    def test_ladder_sequence_diverges(self):
        seq = [circ(ladder_values(k)) for k in range(1, 41)]
        assert seq[:6] == [circ(1), circ(F(1, 3)), circ(1), circ(F(2, 4)), circ(1), circ(F(3, 5))]
        v = gamma_converge(seq, 20)
        assert v.diverged
        assert v.witness == BasicClopen("upCirc", 1)
        assert len(v.entries) >= 10 and len(v.exits) >= 10

    def test_constant(self):
        v = gamma_converge([circ(F(2, 5))] * 12, 8)
        assert v.converged and v.limit == circ(F(2, 5))

    def test_increasing_to_one(self):
        seq = [circ(F(k, k + 1)) for k in range(1, 40)]
        v = gamma_converge(seq, 20)
        assert v.converged and v.limit == minus(1)

    def test_decreasing_to_zero(self):
        seq = [circ(F(1, k)) for k in range(1, 40)]
        v = gamma_converge(seq, 20)
        assert v.converged and v.limit == circ(0)

    def test_eventually_constant(self):
        seq = [circ(F(1, 7))] * 5 + [circ(F(1, 2))] * 25
        v = gamma_converge(seq, 20)
        assert v.converged and v.limit == circ(F(1, 2))

    def test_alternating_two_values(self):
        seq = [circ(F(k % 2)) for k in range(30)]
        v = gamma_converge(seq, 20)
        assert v.diverged and v.witness.kind == "upCirc"

    def test_few_oscillations_not_diverged(self):
        seq = [circ(ladder_values(k)) for k in range(1, 41)]
        v = gamma_converge(seq, 20, min_oscillations=11)
        assert not v.diverged


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_gamma_convergence_implies_classical(self, seed):
        seq = _random_sequence(random.Random(seed))
        vg = gamma_converge(seq, 20)
        vc = classical_converge([gamma_collapse(x) for x in seq], 20)
        if vg.converged:
            assert vc.converged and vc.limit == gamma_collapse(vg.limit)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.lists(st.integers(0, 12), max_size=6))
    def test_tail_property(self, seed, junk):
        seq = _random_sequence(random.Random(seed))
        prefixed = [circ(F(j, 12)) for j in junk] + seq
        for fn in (gamma_converge,):
            a, b = fn(seq, 20), fn(prefixed, 20)
            assert (a.status, a.limit, a.witness) == (b.status, b.limit, b.witness)
        ca = classical_converge([x.value for x in seq], 20)
        cb = classical_converge([x.value for x in prefixed], 20)
        assert (ca.status, ca.limit) == (cb.status, cb.limit)


def _random_sequence(rng):
    """A few interleaved rational sequences of Moebius shape, some eventually constant."""
    period = rng.randint(1, 3)
    parts = []
    for _ in range(period):
        kind = rng.choice(["const", "up", "down"])
        target = F(rng.randint(0, 4), 4)
        if kind == "const":
            parts.append(lambda k, t=target: t)
        elif kind == "up" and target > 0:
            parts.append(lambda k, t=target: t * F(k, k + 1))
        else:
            parts.append(lambda k, t=target: t + (1 - t) * F(1, k + 1))
    return [circ(parts[i % period](i // period + 1)) for i in range(40)]


class TestMoebius:
    def test_extrapolation(self):
        assert extrapolate([F(k, k + 2) for k in range(5, 8)]) == 1
        assert extrapolate([F(2, k + 2) for k in range(5, 8)]) == 0
        assert extrapolate([F(1, 2)] * 3) == F(1, 2)

    def test_simplest_rational(self):
        assert simplest_rational(F(1, 3), F(2, 3)) == F(1, 2)
        assert simplest_rational(F(3, 4), F(4, 5)) == F(3, 4)
        assert simplest_rational(F(0), F(1, 10)) == 0


class TestReport:
    def test_ladder_report(self):
        formulas = [("psi", PSI), ("notpsi", Not(PSI)), ("true", TRUE)]
        rep = sequence_report(StructureSequence("ladder", parse_range("1..40")), formulas, 1,
                              20, F(1, 20))
        vc, vg = rep.verdicts["notpsi"]
        assert vc.converged and vc.limit == 1 and vg.diverged
        vc, vg = rep.verdicts["psi"]
        assert vc.converged and vc.limit == 0 and vg.converged and vg.limit == circ(0)
        vc, vg = rep.verdicts["true"]
        assert vc.limit == 1 and vg.limit == circ(1)
        text = rep.to_csv()
        header = [l for l in text.splitlines() if not l.startswith("#")][0]
        assert header == "index,formula,classical,gamma,verdict_classical,verdict_gamma,witness"
        assert "# window=20" in text and "# eps=1/20" in text
        assert "." not in text.replace("..", "")   # no decimals anywhere
