import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from delaytau.cli import main, parse_n_range, parse_omega
from delaytau.errors import ConfigError

HAYES = {"A0": [[-1]], "A1": [[-1]], "B": [[1]], "C": [[1]], "tau": 1}
TWO_STATE = {"A0": [[-2, 1], [3, -8]], "A1": [[-1, -1], [-1, -1]], "B": [[1, 0], [0, 1]],
             "C": [[1, 0], [0, 1]], "tau": 1}


@pytest.fixture
def system_file(tmp_path):
    def write(data, name="sys.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)
    return write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParsing:
    def test_ranges(self):
        assert parse_n_range("3..6") == [3, 4, 5, 6]
        assert parse_n_range("4") == [4]
        for bad in ("6..3", "0..2", "a..b", ""):
            with pytest.raises(ConfigError):
                parse_n_range(bad)

    def test_omega_endpoints_exact(self):
        grid = parse_omega("-0.3:7.1:9")
        assert grid[0] == -0.3 and grid[-1] == 7.1 and len(grid) == 9
        with pytest.raises(ConfigError):
            parse_omega("1:2")


class TestDiscretize:
    def test_legendre_scalar_example(self, system_file, capsys):
        path = system_file({"A0": [[-0.7]], "A1": [[0.4]], "B": [[1]], "C": [[1]], "tau": 1})
        code, out, _ = run(["discretize", path, "--basis", "legendre", "--N", "1"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert np.allclose(doc["E"], [[1, 1], [1, 0]])
        assert np.allclose(doc["A"], [[-0.3, -1.1], [0, 2]])
        assert doc["metadata"] == {"basis": "legendre", "N": 1, "method": "tau", "tau": 1.0, "n": 1}

    def test_collocation_reports_mesh(self, system_file, capsys):
        code, out, _ = run(["discretize", system_file(HAYES), "--method", "colloc", "--N", "2"], capsys)
        assert code == 0
        assert json.loads(out)["metadata"]["mesh"] == pytest.approx([-1.0, -0.5, 0.0], abs=1e-15)

    def test_invalid_json_names_line(self, system_file, capsys):
        code, _, err = run(["discretize", system_file('{"A0": [[-1]],\n "A1": oops}'), "--N", "2"], capsys)
        assert code == 2
        payload = json.loads(err)
        assert payload["exit_code"] == 2 and "line 2" in payload["message"]

    def test_bad_field_is_named(self, system_file, capsys):
        bad = dict(HAYES, B=[[1], [2]])
        code, _, err = run(["discretize", system_file(bad), "--N", "2"], capsys)
        assert code == 2 and "'B'" in json.loads(err)["message"]

    def test_missing_field(self, system_file, capsys):
        bad = {k: v for k, v in HAYES.items() if k != "C"}
        code, _, err = run(["discretize", system_file(bad), "--N", "2"], capsys)
        assert code == 2 and "C" in json.loads(err)["message"]

    def test_tau_mismatch(self, system_file, capsys):
        code, _, err = run(["discretize", system_file(HAYES), "--N", "2", "--basis-tau", "2"], capsys)
        assert code == 2 and json.loads(err)["error"] == "ConfigError"

    def test_unknown_method(self, system_file, capsys):
        code, _, _ = run(["discretize", system_file(HAYES), "--N", "2", "--method", "galerkin"], capsys)
        assert code == 2


class TestConverge:
    def test_hayes_reproduction(self, system_file, tmp_path, capsys):
        out = tmp_path / "hayes.csv"
        code, _, _ = run(["converge", system_file(HAYES), "--basis", "cheb2", "--N", "1..15",
                          "--out", str(out)], capsys)
        assert code == 0
        table = rows(out.read_text())
        assert [int(r["N"]) for r in table] == list(range(1, 16))
        assert all(1e-16 <= float(r["relerr_vs_reference"]) <= 1e-10 for r in table)
        meta = json.loads((tmp_path / "hayes.csv.meta.json").read_text())
        assert meta["reference"]["value"] == pytest.approx(math.sqrt(0.5))
        assert meta["reference"]["source"].startswith("closed-form")

    def test_two_methods_and_parallel_determinism(self, system_file, tmp_path, capsys):
        path = system_file(TWO_STATE)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["converge", path, "--method", "tau,colloc", "--N", "5..9", "--ref-N", "20",
                    "--out", str(a)], capsys)[0] == 0
        assert run(["converge", path, "--method", "tau,colloc", "--N", "5..9", "--ref-N", "20",
                    "--out", str(b), "--jobs", "4"], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        text = a.read_text()
        assert "\r" not in text
        table = rows(text)
        assert [r["method"] for r in table] == ["tau"] * 5 + ["colloc"] * 5
        assert {r["basis"] for r in table} == {"cheb2", "extremal"}
        meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
        assert meta["reference"]["source"] == "tau cheb2 N=20"

    def test_seventeen_digits(self, system_file, capsys):
        _, out, _ = run(["converge", system_file(HAYES), "--N", "1"], capsys)
        h2 = rows(out)[0]["h2"]
        assert float(h2) == pytest.approx(math.sqrt(0.5), rel=1e-15)
        assert len(h2.replace(".", "").lstrip("0")) <= 17

    def test_unstable_rows_are_nan(self, system_file, capsys):
        unstable = dict(HAYES, A0=[[0.5]], A1=[[0.0]])
        code, out, _ = run(["converge", system_file(unstable), "--N", "2..3"], capsys)
        assert code == 0
        assert all(r["h2"] == "nan" for r in rows(out))


class TestRoots:
    def test_lambert_pair(self, system_file, capsys):
        sys_ = {"A0": [[0]], "A1": [[-1]], "B": [[1]], "C": [[1]], "tau": 1}
        code, out, _ = run(["roots", system_file(sys_), "--basis", "cheb1", "--N", "14..15",
                            "--count", "2"], capsys)
        assert code == 0
        table = rows(out)
        assert list(table[0]) == ["N", "re", "im", "residual", "refined_re", "refined_im"]
        assert len(table) == 4
        for r in table:
            assert float(r["refined_re"]) == pytest.approx(-0.31813150520476413, abs=1e-14)
            assert abs(float(r["refined_im"])) == pytest.approx(1.3372357014306895, abs=1e-14)


class TestTfscan:
    def test_origin_and_endpoints(self, system_file, capsys):
        code, out, _ = run(["tfscan", system_file(HAYES), "--N", "1", "--omega", "0:10:201"], capsys)
        assert code == 0
        table = rows(out)
        assert len(table) == 201
        assert float(table[0]["omega"]) == 0.0 and float(table[-1]["omega"]) == 10.0
        assert float(table[0]["abs_G"]) == pytest.approx(0.5) and float(table[0]["abs_GN"]) == pytest.approx(0.5)

    def test_pointwise_convergence(self, system_file, capsys):
        path = system_file(TWO_STATE)
        gaps = []
        for N in (2, 6, 12):
            table = rows(run(["tfscan", path, "--N", str(N), "--omega", "3:3:1"], capsys)[1])
            gaps.append(abs(float(table[0]["abs_G"]) - float(table[0]["abs_GN"])))
        assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-8


    def test_root_on_axis_is_numerical_failure(self, system_file, capsys):
        # s = 0 solves s - a0 - a1 exp(-s) = 0 when a0 + a1 = 0
        marginal = dict(HAYES, A0=[[1]])
        code, _, err = run(["tfscan", system_file(marginal), "--N", "2", "--omega", "0:1:3"], capsys)
        assert code == 3 and json.loads(err)["exit_code"] == 3


class TestPadeCheck:
    def test_legendre_table(self, capsys):
        code, out, _ = run(["pade-check", "--basis", "legendre", "--N", "3"], capsys)
        assert code == 0
        report = json.loads(out)
        table = report["degrees"][0]["defects"]
        assert [row["n"] for row in table] == list(range(8))
        assert all(row["within_bound"] for row in table[:7])
        assert table[7]["defect"] == pytest.approx(-1 / 20, rel=1e-8)

    def test_bad_basis(self, capsys):
        assert run(["pade-check", "--basis", "hermite", "--N", "2"], capsys)[0] == 2


def test_console_script_exit_code(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text("{not json")
    proc = subprocess.run([sys.executable, "-m", "delaytau.cli", "discretize", str(path), "--N", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "ConfigError"
