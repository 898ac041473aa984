from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from tensionspace.cli import main
from tensionspace.io_formats import load_model, load_trace

B = None


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def fanny_path(tmp_path, fanny_text):
    path = tmp_path / "fanny.json"
    path.write_text(fanny_text)
    return str(path)


@pytest.fixture()
def matchmaking_path(tmp_path, matchmaking_text):
    path = tmp_path / "matchmaking.json"
    path.write_text(matchmaking_text)
    return str(path)


class TestValidate:
    def test_valid_model(self, runner, fanny_path):
        result = runner.invoke(main, ["validate", fanny_path])
        assert result.exit_code == 0
        assert result.output.strip() == "ok"

    def test_violations_exit_1(self, runner, tmp_path, fanny_text):
        doc = json.loads(fanny_text)
        doc["actual_world"][0] = None
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "actual-world-dont-care" in result.output

    def test_unreadable_file_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["validate", str(tmp_path / "nope.json")])
        assert result.exit_code == 2

    def test_false_belief_lint(self, runner, tmp_path, fanny_text):
        doc = json.loads(fanny_text)
        doc["characters"][0]["perceived"] = [0, 0, 0, 0]
        path = tmp_path / "belief.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 0
        assert "false belief" in result.output


class TestSimulate:
    def test_trace_to_stdout(self, runner, fanny_path):
        result = runner.invoke(main, ["simulate", fanny_path])
        assert result.exit_code == 0
        trace = load_trace(result.output)
        assert trace.final_actual == (0, 1, 1, 0)

    def test_trace_to_file(self, runner, fanny_path, tmp_path):
        out = tmp_path / "trace.json"
        result = runner.invoke(main, ["simulate", fanny_path, "--out", str(out), "--seed", "4"])
        assert result.exit_code == 0
        trace = load_trace(out.read_text())
        assert trace.config.seed == 4
        assert trace.final_actual == (0, 1, 1, 0)

    def test_deterministic_output(self, runner, fanny_path):
        first = runner.invoke(main, ["simulate", fanny_path]).output
        second = runner.invoke(main, ["simulate", fanny_path]).output
        assert first == second


class TestTension:
    def test_json_output(self, runner, fanny_path):
        result = runner.invoke(
            main, ["tension", fanny_path, "--x", "fanny:personal", "--y", "fanny:family"]
        )
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert (doc["x_max"], doc["y_max"]) == (4, 4)
        assert sum(sum(row) for row in doc["counts"]) == 16

    def test_methods_agree_byte_for_byte(self, runner, fanny_path):
        args = ["tension", fanny_path, "--x", "fanny:personal", "--y", "fanny:family"]
        conv = runner.invoke(main, args + ["--method", "conv"]).output
        brute = runner.invoke(main, args + ["--method", "brute"]).output
        assert conv == brute

    def test_csv_format(self, runner, fanny_path):
        result = runner.invoke(
            main,
            ["tension", fanny_path, "--x", "fanny:personal", "--y", "fanny:family",
             "--format", "csv"],
        )
        lines = result.output.splitlines()
        assert lines[0] == "x,y,count"
        assert all(len(line.split(",")) == 3 for line in lines[1:])

    def test_pgm_format(self, runner, fanny_path, tmp_path):
        out = tmp_path / "space.pgm"
        result = runner.invoke(
            main,
            ["tension", fanny_path, "--x", "fanny:personal", "--y", "fanny:family",
             "--format", "pgm", "--out", str(out)],
        )
        assert result.exit_code == 0
        assert out.read_text().startswith("P2\n5 5\n255\n")

    def test_bad_axis_exit_2(self, runner, fanny_path):
        result = runner.invoke(main, ["tension", fanny_path, "--x", "nobody:personal",
                                      "--y", "fanny:family"])
        assert result.exit_code == 2


class TestMovements:
    def test_start_world_movements(self, runner, fanny_path):
        result = runner.invoke(
            main, ["movements", fanny_path, "--x", "fanny:personal", "--y", "fanny:family"]
        )
        assert result.exit_code == 0
        entries = {e["action"]: e for e in json.loads(result.output)}
        assert entries["action1"] == {
            "action": "action1", "from": [3, 3], "to": [0, 2], "class": 6,
        }
        assert set(entries) == {"action1", "action2", "action3"}

    def test_explicit_world(self, runner, fanny_path):
        result = runner.invoke(
            main,
            ["movements", fanny_path, "--x", "fanny:personal", "--y", "fanny:family",
             "--world", "0,1,1,0"],
        )
        assert result.exit_code == 0
        assert json.loads(result.output) == []  # no precondition holds at the goal

    def test_bad_world_exit_2(self, runner, fanny_path):
        result = runner.invoke(
            main,
            ["movements", fanny_path, "--x", "fanny:personal", "--y", "fanny:family",
             "--world", "0,1"],
        )
        assert result.exit_code == 2


class TestShape:
    def test_strong(self, runner, matchmaking_path):
        result = runner.invoke(
            main, ["shape", matchmaking_path, "--x", "fanny:family", "--y", "fanny:society"]
        )
        doc = json.loads(result.output)
        assert doc["label"] == "Strong"
        assert doc["correlation"] == pytest.approx(-0.5)

    def test_threshold_option(self, runner, matchmaking_path):
        result = runner.invoke(
            main,
            ["shape", matchmaking_path, "--x", "fanny:family", "--y", "fanny:society",
             "--threshold", "0.6"],
        )
        assert json.loads(result.output)["label"] == "Neutral"


class TestFitWorldviews:
    def test_fits_and_writes_model(self, runner, fanny_path, tmp_path):
        sketch = {
            "version": 1,
            "mode": "worldview",
            "axes": {
                "x": {"character": "fanny", "theme": "personal"},
                "y": {"character": "fanny", "theme": "family"},
            },
            "edges": [{"from": [2, 0], "to": [4, 2]}, {"from": [4, 2], "to": [2, 4]}],
        }
        sketch_path = tmp_path / "sketch.json"
        sketch_path.write_text(json.dumps(sketch))
        out = tmp_path / "fitted.json"

        base = json.loads((tmp_path / "fanny.json").read_text())
        # free both axis worldviews so the fit starts from scratch
        base["characters"][0]["worldviews"]["personal"] = [None] * 4
        base["characters"][0]["worldviews"]["family"] = [None] * 4
        model_path = tmp_path / "free.json"
        model_path.write_text(json.dumps(base))

        result = runner.invoke(
            main, ["fit-worldviews", str(model_path), str(sketch_path), "--seed", "0",
                   "--out", str(out)]
        )
        assert result.exit_code == 0
        fitted = load_model(out.read_text())
        x = fitted.character("fanny").worldviews["personal"]
        y = fitted.character("fanny").worldviews["family"]
        assert x[0] == y[0] and x[1] == y[1]
        assert x[2] != y[2] and x[3] != y[3]

    def test_failures_reported_but_model_written(self, runner, fanny_path, tmp_path):
        sketch = {
            "version": 1,
            "mode": "worldview",
            "axes": {
                "x": {"character": "fanny", "theme": "personal"},
                "y": {"character": "fanny", "theme": "family"},
            },
            # ten diagonal units cannot fit into four propositions
            "edges": [{"from": [0, 0], "to": [10, 10]}],
        }
        sketch_path = tmp_path / "sketch.json"
        sketch_path.write_text(json.dumps(sketch))
        out = tmp_path / "fitted.json"
        result = runner.invoke(
            main, ["fit-worldviews", fanny_path, str(sketch_path), "--seed", "0",
                   "--out", str(out)]
        )
        assert result.exit_code == 0
        assert "failure: edge 0" in result.output
        assert out.exists()


class TestFitActions:
    def test_fits_start_world_and_actions(self, runner, fanny_path, tmp_path):
        sketch = {
            "version": 1,
            "mode": "action",
            "axes": {
                "x": {"character": "fanny", "theme": "personal"},
                "y": {"character": "fanny", "theme": "family"},
            },
            "edges": [{"from": [3, 3], "to": [0, 2]}],
        }
        sketch_path = tmp_path / "sketch.json"
        sketch_path.write_text(json.dumps(sketch))
        out = tmp_path / "fitted.json"
        result = runner.invoke(
            main, ["fit-actions", fanny_path, str(sketch_path), "--out", str(out)]
        )
        assert result.exit_code == 0
        fitted = load_model(out.read_text())
        assert fitted.actual == (1, 0, 0, 0)
        assert fitted.character("fanny").perceived == (1, 0, 0, 0)
        new = fitted.actions["sketch-action-1"]
        assert new.precondition == (1, 0, 0, B)
        assert new.postcondition == (0, 1, 1, B)
        assert "sketch-action-1" in fitted.character("fanny").action_ids

    def test_impossible_start_node_exit_3(self, runner, fanny_path, tmp_path):
        sketch = {
            "version": 1,
            "mode": "action",
            "axes": {
                "x": {"character": "fanny", "theme": "personal"},
                "y": {"character": "fanny", "theme": "family"},
            },
            "edges": [{"from": [4, 4], "to": [3, 3]}],
        }
        sketch_path = tmp_path / "sketch.json"
        sketch_path.write_text(json.dumps(sketch))
        result = runner.invoke(
            main, ["fit-actions", fanny_path, str(sketch_path), "--out", str(tmp_path / "x.json")]
        )
        assert result.exit_code == 3


class TestReport:
    def test_writes_csv_and_figures(self, runner, fanny_path, tmp_path):
        out_dir = tmp_path / "report"
        result = runner.invoke(
            main,
            ["report", fanny_path, "--x", "fanny:personal", "--y", "fanny:family",
             "--out-dir", str(out_dir)],
        )
        assert result.exit_code == 0
        stem = "fanny-personal_x_fanny-family"
        csv_path = out_dir / f"{stem}.csv"
        assert csv_path.read_text().startswith("x,y,count\n")
        for suffix in (".png", "_movements.png"):
            data = (out_dir / f"{stem}{suffix}").read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n"
