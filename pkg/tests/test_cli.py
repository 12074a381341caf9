"""Command-line client: subcommands, exit codes, deterministic files.

Exit code contract: 0 complete, 1 argument or input errors, 2 partial
analysis (output still written). Everything runs against the in-process
service instance; no socket is opened.
"""

import json

import pytest

from darbouxcubic.cli import build_parser, main


def run(argv):
    return main(argv)


class TestAnalyze:
    def test_report_file(self, tmp_path):
        out = tmp_path / "report.json"
        assert run(["analyze", "--p", "1", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["first_integral"]["text"] == "(x - y)*(y^2 + 1)/(x + y)"
        assert report["status"] == "complete"

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(["analyze", "--p", "-1", "--out", str(a)]) == 0
        assert run(["analyze", "--p", "-1", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_default(self, capsys):
        assert run(["analyze", "--p", "0"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["first_integral"]["rational"] is False

    def test_free_form_partial_exit_two(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = run(["analyze", "--x-rate=-y", "--y-rate", "x", "--out", str(out)])
        assert code == 2
        assert json.loads(out.read_text())["status"] == "partial"

    def test_parameters(self, tmp_path):
        out = tmp_path / "r.json"
        code = run(
            [
                "analyze",
                "--x-rate",
                "x + a*y^3",
                "--y-rate",
                "y",
                "--param",
                "a=1/2",
                "--out",
                str(out),
            ]
        )
        assert code in (0, 2)
        assert json.loads(out.read_text())["system"]["rates"][0] == "1/2*y^3 + x"

    def test_bad_p_exits_one(self, capsys):
        assert run(["analyze", "--p", "two"]) == 1
        assert "rational" in capsys.readouterr().err

    def test_parse_error_exits_one(self, capsys):
        assert run(["analyze", "--x-rate", "x +", "--y-rate", "y"]) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_source_exits_one(self, capsys):
        with pytest.raises(SystemExit) as info:
            run(["analyze"])
        assert info.value.code == 1

    def test_both_sources_exit_one(self):
        with pytest.raises(SystemExit) as info:
            run(["analyze", "--p", "1", "--x-rate", "x", "--y-rate", "y"])
        assert info.value.code == 1

    def test_bad_param_form(self):
        with pytest.raises(SystemExit) as info:
            run(["analyze", "--x-rate", "x", "--y-rate", "y", "--param", "oops"])
        assert "--param" in str(info.value.code)

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("gamma_count = 64\n")
        out = tmp_path / "r.json"
        assert run(["analyze", "--p", "1", "--config", str(cfg), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["config"]["gamma_count"] == 64

    def test_missing_config_exits_one(self, tmp_path, capsys):
        missing = tmp_path / "none.toml"
        assert run(["analyze", "--p", "1", "--config", str(missing)]) == 1
        assert "error" in capsys.readouterr().err


class TestPortrait:
    def test_svg_file_deterministic(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        assert run(["portrait", "--p", "-1", "--out", str(a)]) == 0
        assert run(["portrait", "--p", "-1", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("<svg ")

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        assert run(["portrait", "--p", "1", "--seed", "1", "--out", str(a)]) == 0
        assert run(["portrait", "--p", "1", "--seed", "2", "--out", str(b)]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_orbit_count_flag(self, tmp_path):
        out = tmp_path / "o.svg"
        assert run(["portrait", "--p", "1", "--orbits", "4", "--out", str(out)]) == 0
        assert out.read_text().count('class="orbit"') == 4

    def test_partial_portrait_exit_two(self, tmp_path, capsys):
        out = tmp_path / "p.svg"
        code = run(["portrait", "--x-rate", "x", "--y-rate", "y", "--out", str(out)])
        assert code == 2
        assert out.read_text().startswith("<svg ")
        assert "note:" in capsys.readouterr().err


class TestGammaProbe:
    def test_probe_with_control(self, tmp_path):
        out = tmp_path / "probe.json"
        assert run(["gamma-probe", "--control", "algebraic", "--out", str(out)]) == 0
        probe = json.loads(out.read_text())
        assert probe["separation"]["ratio"] >= 1e6
        assert probe["control"]["residuals"]["3"] <= 1e-10

    def test_custom_window(self, tmp_path):
        out = tmp_path / "probe.json"
        code = run(
            ["gamma-probe", "--count", "50", "--y-range", "0.5", "2.0",
             "--maxdeg", "4", "--out", str(out)]
        )
        assert code == 0
        probe = json.loads(out.read_text())
        assert probe["window"] == {"count": 50, "y_min": 0.5, "y_max": 2.0}
        assert set(probe["gamma"]["residuals"]) == {"1", "2", "3", "4"}

    def test_underdetermined_exits_one(self, capsys):
        assert run(["gamma-probe", "--maxdeg", "1", "--count", "2"]) == 1
        assert "well-spread" in capsys.readouterr().err


class TestParser:
    def test_subcommands_registered(self):
        parser = build_parser()
        text = parser.format_help()
        for name in ("analyze", "portrait", "gamma-probe", "serve"):
            assert name in text

    def test_unknown_subcommand_exits_one(self):
        with pytest.raises(SystemExit) as info:
            run(["frobnicate"])
        assert info.value.code == 1
