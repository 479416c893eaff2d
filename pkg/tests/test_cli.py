"""CLI subcommands, exit codes, report files."""

import json
import shutil

import pytest

from torusflow.cli import main


@pytest.fixture()
def workdir(tmp_path):
    for name in (
        "parabola",
        "hyperbola",
        "dinh_vu",
        "dinh_vu_mutated",
    ):
        shutil.copy(f"problems/{name}.tfp", tmp_path / f"{name}.tfp")
    return tmp_path


class TestClosure:
    def test_hyperbola(self, workdir, capsys):
        spec = str(workdir / "hyperbola.tfp")
        assert main(["closure", spec]) == 0
        out = capsys.readouterr().out
        assert "components: 2" in out
        payload = json.loads(open(spec + ".closure.json").read())
        assert payload["schema_version"] == 1
        assert len(payload["components"]) == 2
        for comp in payload["components"]:
            assert {"C", "V", "W", "lattice_points", "dim_C"} <= set(comp)

    def test_parabola_closed(self, workdir, capsys):
        spec = str(workdir / "parabola.tfp")
        assert main(["closure", spec]) == 0
        out = capsys.readouterr().out
        assert "components: 0" in out
        assert "closed" in out
        payload = json.loads(open(spec + ".closure.json").read())
        assert payload["pi_x_closed"] is True

    def test_graph_unsupported(self, workdir, capsys):
        spec = str(workdir / "dinh_vu.tfp")
        assert main(["closure", spec]) == 3
        err = capsys.readouterr().err
        assert "verify" in err

    def test_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.tfp"
        bad.write_text("[field]\nmin_poly = x\nbogus = 1\n")
        with pytest.raises(SystemExit) as exc:
            main(["closure", str(bad)])
        assert exc.value.code == 2

    def test_missing_file(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["closure", "/nonexistent.tfp"])
        assert exc.value.code == 2


class TestVerify:
    def test_hyperbola_passes(self, workdir, capsys):
        spec = str(workdir / "hyperbola.tfp")
        assert main(["verify", spec]) == 0
        report = json.loads(open(spec + ".report.json").read())
        assert report["passed"] is True
        assert report["max_containment_distance"] <= 0.01

    def test_mutated_prediction_fails(self, workdir, capsys):
        spec = str(workdir / "dinh_vu_mutated.tfp")
        assert main(["verify", spec]) == 5
        report = json.loads(open(spec + ".report.json").read())
        assert report["passed"] is False
        assert report["max_containment_distance"] > 0.05

    def test_dinh_vu_passes(self, workdir):
        spec = str(workdir / "dinh_vu.tfp")
        assert main(["verify", spec]) == 0

    def test_overrides(self, workdir):
        spec = str(workdir / "hyperbola.tfp")
        assert main(["verify", spec, "--count", "500", "--seed", "1"]) == 0
        report = json.loads(open(spec + ".report.json").read())
        assert report["config"]["count"] == 500
        assert report["config"]["seed"] == 1

    def test_graph_without_prediction(self, workdir, tmp_path):
        text = open(workdir / "dinh_vu.tfp").read()
        lines = text.splitlines()
        start = lines.index("[flow]")
        end = next(i for i in range(start + 1, len(lines))
                   if lines[i].startswith("["))
        stripped = "\n".join(lines[:start] + lines[end:]) + "\n"
        target = tmp_path / "no_flow.tfp"
        target.write_text(stripped)
        assert main(["verify", str(target)]) == 3

    def test_byte_identical_reports(self, workdir):
        spec = str(workdir / "hyperbola.tfp")
        assert main(["verify", spec, "--count", "2000"]) == 0
        first = open(spec + ".report.json", "rb").read()
        assert main(["verify", spec, "--count", "2000"]) == 0
        second = open(spec + ".report.json", "rb").read()
        assert first == second


class TestSample:
    def test_csv_rows(self, workdir, tmp_path):
        spec = str(workdir / "hyperbola.tfp")
        out = str(tmp_path / "dump.csv")
        assert main(["sample", spec, "--out", out, "--count", "400"]) == 0
        lines = open(out).read().strip().splitlines()
        header = lines[0].split(",")
        assert header[0] == "shell_index"
        assert "min_distance" in header
        assert len(lines) == 401

    def test_bounded_starves(self, tmp_path):
        spec = tmp_path / "bounded.tfp"
        spec.write_text(
            """\
[field]
min_poly = x

[space]
mode = real
ambient_dim = 2
declared_dim = 1

[lattice]
row = (1, 0)

[variety]
branch = (1/t, 1/(t^2+1))

[verify]
count = 64
radius_min = 1000
shells = 1
"""
        )
        out = str(tmp_path / "dump.csv")
        assert main(["sample", str(spec), "--out", out]) == 6
