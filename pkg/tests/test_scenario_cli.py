import csv
import math
import subprocess
import sys

import pytest

from bellexp.cli import angle_grid, main, paper_check
from bellexp.lhv import sign_model_closed_form
from bellexp.scenario import (
    OUTPUT_DIR_ENV,
    ScenarioError,
    evaluate_scenario,
    fmt,
    parse_scenario,
    render_csv,
    INEQUALITY_FIELDS,
)

SINGLET = """\
# singlet against the 60/60 triple
source:
  state: singlet
directions:
  a: 0
  b: 60
  c: 120
triples: [[a, b, c]]
output:
  path: {out}
"""

SIGN = """\
source:
  model: sign
directions:
  a: 0
  b: 45
  c: [1, 0, 0]
  d: 150
integration:
  samples: 30000
  seed: 17
output:
  path: {out}
"""


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _write(tmp_path, text, name="s.yaml", out="out.csv"):
    p = tmp_path / name
    p.write_text(text.format(out=tmp_path / out))
    return p


class TestRun:
    def test_singlet_story(self, tmp_path):
        scenario = _write(tmp_path, SINGLET)
        assert main(["run", str(scenario)]) == 0
        rows = {r["name"]: r for r in _rows(tmp_path / "out.csv")}
        assert rows["bell_original"]["satisfied"] == "false"
        assert rows["generalized_bell"]["satisfied"] == "true"
        assert float(rows["generalized_bell"]["margin"]) == pytest.approx(1.5, abs=1e-9)
        corr = _rows(tmp_path / "out.correlations.csv")
        assert {(c["setting_1"], c["setting_2"]) for c in corr} == {("a", "b"), ("a", "c"), ("b", "c")}

    def test_empty_directions(self, tmp_path, capsys):
        scenario = _write(tmp_path, "source:\n  state: singlet\ndirections: {{}}\noutput:\n  path: {out}\n")
        assert main(["run", str(scenario)]) == 1
        assert "no direction triples" in capsys.readouterr().err

    def test_deterministic_bytes(self, tmp_path):
        scenario = _write(tmp_path, SIGN)
        assert main(["run", str(scenario), "--output", str(tmp_path / "one.csv")]) == 0
        assert main(["run", str(scenario), "--output", str(tmp_path / "two.csv"), "--workers", "4"]) == 0
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()
        assert (tmp_path / "one.correlations.csv").read_bytes() == (tmp_path / "two.correlations.csv").read_bytes()
        # four named directions give four ordered triples, three inequality rows each
        assert len(_rows(tmp_path / "one.csv")) == 12

    def test_seed_override_changes_output(self, tmp_path):
        scenario = _write(tmp_path, SIGN)
        main(["run", str(scenario), "--output", str(tmp_path / "one.csv")])
        main(["run", str(scenario), "--output", str(tmp_path / "two.csv"), "--seed", "18"])
        assert (tmp_path / "one.correlations.csv").read_bytes() != (tmp_path / "two.correlations.csv").read_bytes()

    def test_text_format(self, tmp_path):
        scenario = _write(tmp_path, SINGLET.replace("output:\n", "output:\n  format: text\n"), out="out.txt")
        assert main(["run", str(scenario)]) == 0
        text = (tmp_path / "out.txt").read_text()
        assert "bell_original" in text and "VIOLATED" in text

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "results"))
        scenario = tmp_path / "s.yaml"
        scenario.write_text(SINGLET.format(out="rel.csv"))
        assert main(["run", str(scenario)]) == 0
        assert (tmp_path / "results" / "rel.csv").exists()

    def test_density_and_amplitude_sources(self, tmp_path):
        for src in ("density: singlet", "amplitudes: [0, 0.7071067811865476, -0.7071067811865476, 0]"):
            text = SINGLET.replace("state: singlet", src)
            scenario = _write(tmp_path, text)
            assert main(["run", str(scenario)]) == 0
            rows = {r["name"]: r for r in _rows(tmp_path / "out.csv")}
            assert rows["bell_original"]["satisfied"] == "false"

    def test_engine_error_exit_code(self, tmp_path):
        bad = SINGLET.replace("state: singlet", "density: [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0.5]]")
        scenario = _write(tmp_path, bad)
        assert main(["run", str(scenario)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.yaml")]) == 1


class TestParse:
    def test_unknown_state_lists_registry(self):
        with pytest.raises(ScenarioError, match=r"source.state \(line 2\).*available: .*singlet"):
            parse_scenario("source:\n  state: bogus\ndirections: {a: 0}\n")

    def test_unknown_model_lists_registry(self):
        with pytest.raises(ScenarioError, match="available: basis-mixture, coherent-product, sign, trivial"):
            parse_scenario("source:\n  model: bogus\n")

    def test_bad_direction_names_line(self):
        text = "source:\n  state: singlet\ndirections:\n  a: 0\n  b: [1, 1, 0]\n"
        with pytest.raises(ScenarioError, match=r"directions.b \(line 5\)"):
            parse_scenario(text)

    def test_unknown_triple_name(self):
        text = "source:\n  state: singlet\ndirections:\n  a: 0\ntriples: [[a, a, z]]\n"
        with pytest.raises(ScenarioError, match=r"triples\[0\].*'z'"):
            parse_scenario(text)

    def test_yaml_syntax_error(self):
        with pytest.raises(ScenarioError, match="line"):
            parse_scenario("source: [\n")

    def test_unknown_section(self):
        with pytest.raises(ScenarioError, match=r"colour \(line 1\)"):
            parse_scenario("colour: red\n")

    def test_roundtrip(self, tmp_path):
        original = parse_scenario(SIGN.format(out=tmp_path / "x.csv"))
        again = parse_scenario(original.to_yaml())
        assert again == original
        r1, r2 = evaluate_scenario(original), evaluate_scenario(again)
        assert render_csv(r1.rows, INEQUALITY_FIELDS) == render_csv(r2.rows, INEQUALITY_FIELDS)

    def test_fmt(self):
        assert fmt(0.1) == "0.10000000000000001"
        assert fmt(True) == "true"
        assert fmt(-1.0) == "-1"


class TestPaperCheck:
    def test_report(self):
        ok, report = paper_check()
        assert ok
        assert "lhs = -1 " in report
        assert "rhs(+) = -0.25" in report
        assert "rhs(-) = -1.75" in report
        assert "four-term basis sum = 0 " in report
        assert "generalized_bell margin = 1.5" in report

    def test_cli_exit_zero(self, capsys):
        assert main(["paper-check"]) == 0
        assert "MISMATCH" not in capsys.readouterr().out

    def test_mismatch_exit_three(self, monkeypatch, capsys):
        import bellexp.cli as cli

        monkeypatch.setitem(cli.PINNED_VALUES, "lhs", -0.9)
        assert main(["paper-check"]) == 3
        out = capsys.readouterr().out
        assert "lhs: got -0.999" in out and "expected -0.9" in out

    def test_console_script_module(self):
        proc = subprocess.run([sys.executable, "-m", "bellexp.cli", "paper-check"], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr


def _curve(path):
    lines = path.read_text().splitlines()
    header = lines[0].lstrip("# ").split()
    return header, [list(map(float, l.split())) for l in lines[1:]]


class TestCurve:
    def test_singlet_cosine(self, tmp_path):
        out = tmp_path / "c.txt"
        assert main(["curve", "--source", "singlet", "--start", "0", "--stop", "180", "--step", "30", "--output", str(out)]) == 0
        header, rows = _curve(out)
        assert header == ["angle_deg", "singlet"]
        assert [r[0] for r in rows] == [0, 30, 60, 90, 120, 150, 180]
        for t, v in rows:
            assert v == pytest.approx(-math.cos(math.radians(t)), abs=1e-12)

    def test_sign_model_column(self, tmp_path):
        out = tmp_path / "c.txt"
        args = ["curve", "--source", "singlet", "--source", "sign", "--step", "30",
                "--samples", "1000000", "--seed", "3", "--output", str(out)]
        assert main(args) == 0
        header, rows = _curve(out)
        assert header == ["angle_deg", "singlet", "sign", "sign_stderr"]
        for t, _, v, err in rows:
            assert abs(v - sign_model_closed_form(math.radians(t))) <= 3 * err + 1e-12

    def test_single_row(self, tmp_path):
        out = tmp_path / "c.txt"
        assert main(["curve", "--start", "0", "--stop", "0", "--step", "30", "--output", str(out)]) == 0
        _, rows = _curve(out)
        assert len(rows) == 1 and rows[0][0] == 0.0
        assert rows[0][1] == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("start, stop, step", [(0, 90, 0), (90, 0, 10), (0, 90, -5)])
    def test_invalid_range(self, tmp_path, start, stop, step):
        args = ["curve", "--start", str(start), "--stop", str(stop), "--step", str(step), "--output", str(tmp_path / "c")]
        assert main(args) == 1

    def test_unknown_source(self, tmp_path):
        assert main(["curve", "--source", "bogus", "--output", str(tmp_path / "c")]) == 1

    def test_grid_monotone(self):
        g = angle_grid(0, 1, 0.1)
        assert len(g) == 11 and all(x < y for x, y in zip(g, g[1:]))
