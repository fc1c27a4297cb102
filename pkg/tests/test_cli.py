import io
import json
import subprocess
import sys

import pytest

from conftest import DATA
from stonelim.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    measure = tmp_path / "mu.json"
    measure.write_text(json.dumps({"lattice": "diamond",
                                   "values": {"0": "0", "a": "1/4^o", "b": "3/4^o", "1": "1"}}))
    classical = tmp_path / "m.json"
    classical.write_text(json.dumps({"lattice": "chain:3", "values": {"0": "0", "1": "1/3", "2": "1"}}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"lattice": "diamond",
                               "values": {"0": "0", "a": "3/4", "b": "0", "1": "1"}}))
    hom = tmp_path / "hom.json"
    hom.write_text(json.dumps({"source": "chain:3", "target": "diamond",
                               "mapping": {"0": "0", "1": "a", "2": "1"}}))
    formulas = tmp_path / "f.txt"
    formulas.write_text("psi2: psi\nneg: !psi2\n")
    return {"mu": measure, "classical": classical, "bad": bad, "hom": hom, "formulas": formulas}


class TestGamma:
    def test_calc(self):
        assert run("gamma", "calc", "3/4^o - 1/2^o") == (0, "1/4^o\n")
        assert run("gamma", "calc", "3/4^o - 1/2^o", "--dual") == (0, "1/4^-\n")
        assert run("gamma", "calc", "1/2^- + 1/4") == (0, "3/4^-\n")
        assert run("gamma", "calc", "2/4") == (0, "1/2^o\n")

    def test_errors(self, capsys):
        assert run("gamma", "calc", "1/2^o - 3/4^o")[0] == 1
        assert run("gamma", "calc", "1/2 * 3")[0] == 2
        with pytest.raises(SystemExit) as info:
            run("gamma", "frobnicate")
        assert info.value.code == 2

    def test_grid(self):
        assert run("gamma", "grid", "2") == (0, "0^o 1/2^o 1^o\n")
        assert run("gamma", "grid", "2", "--flavored") == (0, "0^o 1/2^- 1/2^o 1^- 1^o\n")


class TestLattice:
    def test_show_and_primes(self):
        code, text = run("lattice", "show", "diamond")
        assert code == 0 and "join-irreducibles: a b" in text
        code, text = run("lattice", "primes", "diamond")
        assert text.splitlines() == ["up(a): a 1", "up(b): b 1", "# 2 prime filters"]

    def test_check_file(self, tmp_path):
        p = tmp_path / "m3.json"
        p.write_text(json.dumps({"elements": ["0", "x", "y", "z", "1"],
                                 "leq": [["0", "x"], ["0", "y"], ["0", "z"],
                                         ["x", "1"], ["y", "1"], ["z", "1"]]}))
        assert run("lattice", "check", str(p))[0] == 1
        assert run("lattice", "check", "boolean:3") == (0, "ok: distributive lattice with 8 elements\n")


class TestMeasure:
    def test_check(self, files):
        assert run("measure", "check", str(files["mu"])) == (0, "ok\n")
        code, text = run("measure", "check", str(files["bad"]))
        assert code == 1 and text.startswith("violation")
        assert run("measure", "check", "--classical", str(files["classical"])) == (0, "ok\n")

    def test_lift_and_push(self, files):
        code, text = run("measure", "lift", str(files["mu"]))
        assert text == "0: 0\na: 1/4\nb: 3/4\n1: 1\n"
        code, text = run("measure", "lift", "--iota", str(files["classical"]))
        assert text == "0: 0^o\n1: 1/3^o\n2: 1^o\n"
        code, text = run("measure", "push", str(files["mu"]), "--hom", str(files["hom"]))
        assert (code, text) == (0, "0: 0^o\n1: 1/4^o\n2: 1^o\n")

    def test_missing_file(self):
        assert run("measure", "check", "/nonexistent.json")[0] == 1


class TestPair:
    def test_eval(self):
        code, text = run("pair", "eval", "--structure", str(DATA / "a2.json"),
                         "--formula", "!psi", "--vars", "1")
        assert code == 0
        assert "classical: 1/3\n" in text and "gamma: 1/3^o\n" in text

    def test_named_from_file(self, files):
        code, text = run("pair", "eval", "--structure", str(DATA / "a2.json"),
                         "--formula", "neg", "--formulas", str(files["formulas"]), "--vars", "1")
        assert "gamma: 1/3^o" in text

    def test_table(self):
        code, text = run("pair", "table", "--structure", str(DATA / "a2.json"),
                         "--formulas", str(DATA / "ladder_formulas.txt"), "--vars", "1")
        assert code == 0
        assert "101,1,0,1,2,2/3^o" in text and "011,0,1,1,1,1/3^o" in text

    def test_bad_formula(self):
        code, _ = run("pair", "eval", "--structure", str(DATA / "a2.json"),
                      "--formula", "E(x)", "--vars", "1")
        assert code == 1


class TestLimits:
    def test_report(self, tmp_path):
        out = tmp_path / "r.csv"
        code, _ = run("limits", "report", "--generator", "ladder", "--range", "1..40",
                      "--formulas", str(DATA / "ladder_formulas.txt"), "--vars", "1",
                      "--window", "20", "--eps", "1/20", "--out", str(out))
        assert code == 0
        rows = [l.split(",") for l in out.read_text().splitlines() if not l.startswith("#")]
        notpsi = [r for r in rows if r[1] == "notpsi"]
        assert notpsi[0][:4] == ["1", "notpsi", "1", "1^o"]
        assert notpsi[1][2:4] == ["1/3", "1/3^o"]
        assert notpsi[-1][4:6] == ["converged(1)", "diverged"]
        assert notpsi[-1][6].startswith("upCirc 1 ")

    def test_stdout_matches_file(self, tmp_path):
        args = ["limits", "report", "--generator", "ladder", "--range", "1..12",
                "--formulas", str(DATA / "ladder_formulas.txt"), "--vars", "1", "--window", "6"]
        out = tmp_path / "r.csv"
        run(*args, "--out", str(out))
        assert run(*args)[1] == out.read_text()


class TestPlogic:
    def test_sat(self, files):
        assert run("plogic", "sat", "--measure", str(files["mu"]),
                   "--formula", "P[>=1/4](a) & P[<1/2](a)") == (0, "true\n")
        assert run("plogic", "sat", "--measure", str(files["mu"]),
                   "--formula", "P[>=1/2](a)") == (0, "false\n")

    def test_sound(self):
        code, text = run("plogic", "sound", "--lattice", "chain:3", "--grid", "2", "--random", "5")
        assert code == 0 and text.count("0 violations") == 6
        assert text.startswith("# family: exhaustive I_2 + 5 random (seed 0)")

    def test_entail(self):
        code, text = run("plogic", "entail", "--lattice", "diamond",
                         "--phi", "P[>=1/2](a)", "--psi", "P[>=1/4](a)")
        assert "holds on family" in text and "family-relative" in text
        code, text = run("plogic", "entail", "--lattice", "diamond",
                         "--phi", "P[>=1/4](a)", "--psi", "P[>=1/2](a)")
        assert "countermodel:" in text

    def test_roundtrip(self, files):
        code, text = run("plogic", "roundtrip", "--measure", str(files["mu"]))
        assert code == 0 and text.endswith("roundtrip: identity\n")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stonelim", "gamma", "calc", "3/4^o - 1/2^o"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "1/4^o\n"
    res = subprocess.run([sys.executable, "-m", "stonelim"], capture_output=True, text=True)
    assert res.returncode == 2
