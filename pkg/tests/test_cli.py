import json

import numpy as np
import pytest

from torusword.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestFixedPoint:
    def test_fibonacci_prefix(self, capsys):
        code, out, _ = run(capsys, "fixed-point", "--kbonacci", "2", "--length", "13")
        assert code == 0
        assert out.strip() == "1211212112112"

    def test_morphism_file(self, capsys, tmp_path):
        doc = {"images": {"1": "12", "2": "1"}}
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "fixed-point", "--morphism", str(path), "--length", "8")
        assert code == 0
        assert out.strip() == "12112121"

    def test_missing_morphism_file_is_usage_error(self, capsys):
        code, _, err = run(capsys, "fixed-point", "--morphism", "/nonexistent", "--length", "5")
        assert code == 2
        assert "error" in err

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "w.txt"
        code, _, _ = run(
            capsys, "fixed-point", "--kbonacci", "3", "--length", "6", "--out", str(path)
        )
        assert code == 0
        assert path.read_text().strip() == "121312"


class TestComplexity:
    def test_kbonacci_csv_with_reference_column(self, capsys):
        code, out, _ = run(capsys, "complexity", "--kbonacci", "3", "--nmax", "5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,p_n,prefix_len,stabilized,kn_plus_1"
        for line in lines[1:]:
            n, p, _, stab, ref = line.split(",")
            assert int(p) == int(ref) == 2 * int(n) + 1
            assert stab == "true"

    def test_circle_example(self, capsys):
        code, out, _ = run(
            capsys, "complexity", "--example", "circle", "--nmax", "4", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert [r["p_n"] for r in doc["rows"]] == [2, 3, 4, 5]
        assert doc["k"] == 1

    def test_requires_a_source(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["complexity", "--nmax", "3"])
        assert exc.value.code == 2


class TestFractal:
    def test_csv_output(self, capsys):
        code, out, _ = run(capsys, "fractal", "--kbonacci", "3", "--points", "50")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "x1,x2,label"
        assert len(lines) == 51

    def test_binary_output(self, capsys, tmp_path):
        path = tmp_path / "cloud.rzyc"
        code, _, _ = run(
            capsys,
            "fractal",
            "--kbonacci",
            "2",
            "--points",
            "20",
            "--format",
            "bin",
            "--out",
            str(path),
        )
        assert code == 0
        raw = path.read_bytes()
        assert raw[:4] == b"RZYC"
        assert len(raw) == 16 + 20 * 1 * 8 + 20


class TestCodeOrbit:
    def test_circle_orbit_csv(self, capsys):
        code, out, _ = run(capsys, "code-orbit", "--example", "circle", "--steps", "10")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "step,x1,cell"
        assert len(lines) == 11
        xs = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(0 <= x < 1 for x in xs)

    def test_hexagon_orbit_csv(self, capsys):
        code, out, _ = run(
            capsys, "code-orbit", "--example", "hexagon", "--steps", "20", "--seed", "1"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "step,x1,x2,cell"
        cells = {int(line.split(",")[-1]) for line in lines[1:]}
        assert cells <= {1, 2, 3}


class TestGraph:
    def test_fibonacci_order_one(self, capsys):
        code, out, err = run(
            capsys, "graph", "--kbonacci", "2", "--order", "1", "--format", "csv"
        )
        assert code == 0
        assert out.splitlines()[0] == "n,vertices,edges,components,dimZ,chi"
        assert "1,2,3,1,2,2" in out
        assert "dimZ=2" in err

    def test_four_vertex_example_dot(self, capsys):
        code, out, err = run(capsys, "graph", "--example", "four-vertex")
        assert code == 0
        assert out.startswith("digraph")
        assert "dimZ=3" in err

    def test_tribonacci_order_four(self, capsys):
        code, _, err = run(capsys, "graph", "--kbonacci", "3", "--order", "4")
        assert code == 0
        assert "|V|=9 |E|=11" in err
        assert "chi=3" in err


class TestVerify:
    def test_single_check_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "graph-example")
        assert code == 0
        assert "PASS" in out
        assert "1/1" in out

    def test_json_report(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, _, _ = run(capsys, "verify", "--only", "graph-example", "--out", str(path))
        assert code == 0
        doc = json.loads(path.read_text())
        assert doc["checks"][0]["name"] == "graph-example"
        assert doc["checks"][0]["passed"] is True
        assert doc["seed"] == 0

    def test_reports_are_deterministic_modulo_runtime(self, capsys, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            code, _, _ = run(
                capsys, "verify", "--only", "measure-identities", "--out", str(path)
            )
            assert code == 0
        docs = [json.loads(p.read_text()) for p in paths]
        for doc in docs:
            for check in doc["checks"]:
                check.pop("runtime")
        assert docs[0] == docs[1]

    def test_unknown_check_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "--only", "no-such-check")
        assert code == 2


class TestUsage:
    def test_no_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_entry_point_installed(self):
        import shutil

        assert shutil.which("torusword") is not None
