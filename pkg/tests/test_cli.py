import csv
import io
import json
import subprocess
import sys

import pytest

from carleson_admit import cli
from carleson_admit.errors import UnboundedNormError
from carleson_admit.measure import IntensityTable
from carleson_admit.serialize import emit_strip_csv, validate

FIVE_MODES = {
    "q": 2,
    "modes": [
        {"lambda": -1, "b": 1},
        {"lambda": [-2, 3], "b": 2},
        {"lambda": -4, "b": [0, 1]},
        {"lambda": [-8, -1], "b": 4},
        {"lambda": -16, "b": [3, 4]},
    ],
}
TWO_ATOMS = {"atoms": [{"re": 1, "im": 0, "weight": 1}, {"re": 1, "im": 10, "weight": 1}]}
GEOMETRIC = {"q": 2, "modes": [{"lambda": -(2.0**n), "b": 2.0**n / n} for n in range(1, 7)]}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="in.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return _write


def run_main(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestCommands:
    def test_admissible_hand_computation(self, write, capsys):
        code, out, _ = run_main(["admissible", "-i", write(FIVE_MODES)], capsys)
        assert code == 0
        rep = json.loads(out)
        # one atom per strip: sum |b_k|^2 / |Re lambda_k|^2
        assert rep["results"]["functional_value"] == 1 + 1 + 1 / 16 + 16 / 64 + 25 / 256
        validate(rep, "report")

    def test_theta_zero_input(self, write, capsys):
        code, out, _ = run_main(["theta", "-i", write(FIVE_MODES)], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["results"]["state"] == [[0.0, 0.0]] * 5
        assert rep["results"]["state_norm"] == 0.0
        assert any("u = 0" in w for w in rep["warnings"])

    def test_theta_with_input(self, write, capsys):
        doc = {"q": 2, "modes": [{"lambda": -1, "b": 1}], "input": {"kind": "modulated_indicator", "a": 0, "b": 1}}
        code, out, _ = run_main(["theta", "-i", write(doc), "--tau0", "1"], capsys)
        assert code == 0
        assert json.loads(out)["results"]["state_norm"] == pytest.approx(0.6321205588285577, rel=1e-15)

    def test_intensity_two_atoms(self, write, capsys):
        code, out, _ = run_main(["intensity", "-i", write(TWO_ATOMS), "--alpha", "2"], capsys)
        assert code == 0
        assert json.loads(out)["results"]["intensity"] == 1.0

    def test_bare_atom_list(self, write, capsys):
        code, out, _ = run_main(["intensity", "-i", write(TWO_ATOMS["atoms"]), "--alpha", "2"], capsys)
        assert code == 0

    @pytest.mark.parametrize(
        "argv",
        [
            ["embed-check", "--q", "2"],
            ["embed-check", "--q", "4", "--p", "2"],
            ["finite-time", "--tau0", "2.5"],
            ["exp-orlicz"],
            ["exp-orlicz", "--alpha", "2"],
            ["witness-phi"],
            ["crosscheck", "--tau-grid", "0.5,2", "--budget", "2", "--seed", "1"],
            ["zero-class"],
        ],
    )
    def test_every_command_emits_a_valid_report(self, argv, write, capsys):
        code, out, err = run_main([argv[0], "-i", write(GEOMETRIC), *argv[1:]], capsys)
        assert code == 0, err
        rep = json.loads(out)
        validate(rep, "report")
        assert rep["command"] == argv[0]
        assert "kappa_carleson" in rep["constants_used"]

    def test_constant_override_is_echoed(self, write, capsys):
        code, out, _ = run_main(["embed-check", "-i", write(GEOMETRIC), "--kappa-carleson", "3.5"], capsys)
        assert code == 0
        assert json.loads(out)["constants_used"]["kappa_carleson"] == 3.5

    def test_finite_time_auto_shift(self, write, capsys):
        doc = {"q": 2, "modes": [{"lambda": 0.5, "b": 1}, {"lambda": -3, "b": 1}]}
        code, _, err = run_main(["finite-time", "-i", write(doc), "--tau0", "1"], capsys)
        assert code == 2 and "[lambda]" in err
        code, out, _ = run_main(["finite-time", "-i", write(doc), "--tau0", "1", "--auto-shift"], capsys)
        rep = json.loads(out)
        assert rep["results"]["shift_applied"] == 0.5625
        assert rep["warnings"]


class TestExitCodes:
    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_main(["admissible", "-i", str(tmp_path / "nope.json")], capsys)
        assert code == 1 and err.startswith("error:")

    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{q: 2")
        assert run_main(["admissible", "-i", str(p)], capsys)[0] == 1

    def test_schema_violation(self, write, capsys):
        bad = {"atoms": [{"re": -1, "im": 0, "weight": 1}]}
        assert run_main(["intensity", "-i", write(bad), "--alpha", "2"], capsys)[0] == 1

    def test_missing_exponent_names_field(self, write, capsys):
        code, _, err = run_main(["intensity", "-i", write(TWO_ATOMS)], capsys)
        assert code == 2 and "[alpha]" in err

    def test_budget_needs_seed(self, write, capsys):
        code, _, err = run_main(["embed-check", "-i", write(GEOMETRIC), "--budget", "3"], capsys)
        assert code == 2 and "[seed]" in err

    def test_csv_for_non_tabular_command(self, write, capsys):
        code, _, err = run_main(["theta", "-i", write(FIVE_MODES), "--format", "csv"], capsys)
        assert code == 2 and "[format]" in err

    def test_unbounded_norm(self, write, capsys, monkeypatch):
        def boom(*args):
            raise UnboundedNormError("Hardy norm diverges for p = 1")

        monkeypatch.setitem(cli._HANDLERS, "admissible", boom)
        code, _, err = run_main(["admissible", "-i", write(FIVE_MODES)], capsys)
        assert code == 3 and "unbounded" in err

    def test_runspec_validation(self):
        with pytest.raises(cli.DomainError):
            cli.RunSpec("plot", "x.json")
        with pytest.raises(cli.DomainError):
            cli.RunSpec("admissible", None)


class TestCsv:
    def test_empty_table(self):
        assert emit_strip_csv(IntensityTable(2.0, {}, 0.0)).strip() == "n,C,weighted,cumulative"

    def test_cumulative(self):
        text = emit_strip_csv({2: 0.25, -1: 1.0, 0: 0.5})
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [int(r["n"]) for r in rows] == [-1, 0, 2]
        assert [float(r["cumulative"]) for r in rows] == [1.0, 1.5, 1.75]

    def test_n_squared(self):
        rows = list(csv.DictReader(io.StringIO(emit_strip_csv({1: 0.5, 3: 0.25}, "n_squared"))))
        assert [float(r["weighted"]) for r in rows] == [0.5, 9 * 0.25]

    def test_cli_csv(self, write, capsys):
        code, out, _ = run_main(["admissible", "-i", write(FIVE_MODES), "--format", "csv"], capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 5
        assert float(rows[-1]["cumulative"]) == 2.41015625


class TestReports:
    def test_output_file_and_determinism(self, write, tmp_path, capsys):
        inp = write(GEOMETRIC)
        out = tmp_path / "report.json"
        argv = ["embed-check", "-i", inp, "-o", str(out), "--budget", "4", "--seed", "9"]
        assert run_main(argv, capsys)[0] == 0
        first = out.read_bytes()
        assert run_main(argv, capsys)[0] == 0
        assert out.read_bytes() == first
        assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]

    def test_json_round_trip(self, write, capsys):
        _, out, _ = run_main(["witness-phi", "-i", write(GEOMETRIC)], capsys)
        rep = json.loads(out)
        assert json.loads(json.dumps(rep)) == rep
        assert len(rep["results"]["tabulation"]) == 13

    def test_seventeen_digits(self, write, capsys):
        _, out, _ = run_main(["intensity", "-i", write(FIVE_MODES)], capsys)
        rep = json.loads(out)
        assert "0.0625" in out
        assert rep["results"]["intensity"] == 1.0

    def test_console_script(self, write):
        res = subprocess.run(
            [sys.executable, "-m", "carleson_admit.cli", "intensity", "-i", write(TWO_ATOMS), "--alpha", "2"],
            capture_output=True, text=True, check=False,
        )
        assert res.returncode == 0
        assert json.loads(res.stdout)["results"]["intensity"] == 1.0
