from __future__ import annotations

import json
import random

import numpy as np
import pytest

from tensionspace.analysis import TensionSpace, compute_space_convolution
from tensionspace.io_formats import (
    ModelValidationError,
    ParseError,
    export_tension_space,
    load_model,
    load_sketch,
    load_trace,
    save_model,
    save_sketch,
    save_trace,
    tension_space_from_document,
    tension_space_to_document,
)
from tensionspace.simulate import SimulationConfig, run
from tensionspace.sketch import GridNode, Sketch, SketchEdge, SketchMode

from conftest import random_system

B = None


class TestModelDocuments:
    def test_fixture_round_trip(self, matchmaking_text):
        system = load_model(matchmaking_text)
        assert load_model(save_model(system)) == system

    def test_document_field_names(self, fanny_system):
        doc = json.loads(save_model(fanny_system))
        assert set(doc) == {
            "version", "range", "propositions", "themes", "actual_world",
            "characters", "actions",
        }
        assert doc["version"] == 1
        assert doc["range"] == {"min": 0, "max": 1}
        assert set(doc["characters"][0]) == {"name", "perceived", "worldviews", "actions"}
        assert set(doc["actions"][0]) == {"name", "pre", "post"}

    def test_dont_care_encoded_as_null(self, fanny_system):
        doc = json.loads(save_model(fanny_system))
        assert doc["actions"][1]["pre"] == [1, None, None, None]

    def test_random_systems_round_trip(self):
        rng = random.Random(61)
        for _ in range(25):
            system = random_system(rng)
            assert load_model(save_model(system)) == system

    def test_malformed_json(self):
        with pytest.raises(ParseError, match="line 1"):
            load_model("{not json")

    def test_wrong_version(self, fanny_system):
        doc = json.loads(save_model(fanny_system))
        doc["version"] = 99
        with pytest.raises(ParseError, match="version"):
            load_model(json.dumps(doc))

    def test_missing_field(self, fanny_system):
        doc = json.loads(save_model(fanny_system))
        del doc["propositions"]
        with pytest.raises(ParseError):
            load_model(json.dumps(doc))

    def test_invalid_model_carries_violations(self, fanny_system):
        doc = json.loads(save_model(fanny_system))
        doc["actual_world"][0] = None
        with pytest.raises(ModelValidationError) as excinfo:
            load_model(json.dumps(doc))
        assert [v.rule for v in excinfo.value.violations] == ["actual-world-dont-care"]


class TestSketchDocuments:
    def test_round_trip_with_axes_and_colors(self):
        sketch = Sketch(
            edges=(
                SketchEdge(GridNode(3, 3), GridNode(0, 2), color="#ff0000"),
                SketchEdge(GridNode(0, 2), GridNode(1, 1)),
            ),
            mode=SketchMode.ACTION,
            axes=(("fanny", "personal"), ("fanny", "family")),
        )
        assert load_sketch(save_sketch(sketch)) == sketch

    def test_document_field_names(self):
        sketch = Sketch(
            edges=(SketchEdge(GridNode(0, 0), GridNode(1, 1)),),
            axes=(("a", "t"), ("b", "u")),
        )
        doc = json.loads(save_sketch(sketch))
        assert set(doc) == {"version", "mode", "axes", "edges"}
        assert doc["mode"] == "worldview"
        assert doc["axes"] == {
            "x": {"character": "a", "theme": "t"},
            "y": {"character": "b", "theme": "u"},
        }
        assert doc["edges"] == [{"from": [0, 0], "to": [1, 1]}]

    def test_unknown_mode(self):
        with pytest.raises(ParseError):
            load_sketch('{"version": 1, "mode": "freehand", "edges": []}')


class TestTraceDocuments:
    def test_round_trip(self, fanny_system):
        _, trace = run(fanny_system, SimulationConfig(max_steps=10, seed=3))
        assert load_trace(save_trace(trace)) == trace

    def test_document_field_names(self, fanny_system):
        _, trace = run(fanny_system)
        doc = json.loads(save_trace(trace))
        assert set(doc) == {"version", "config", "steps"}
        assert set(doc["config"]) == {"max_steps", "strict_improvement", "seed"}
        assert set(doc["steps"][0]) == {
            "character", "action", "succeeded", "before", "after", "score",
        }


class TestTensionSpaceDocuments:
    def test_round_trip(self, fanny_system):
        fanny = fanny_system.characters[0]
        space = compute_space_convolution(
            fanny.worldviews["personal"],
            fanny.worldviews["family"],
            fanny_system.value_range,
            axes=(("fanny", "personal"), ("fanny", "family")),
        )
        assert tension_space_from_document(tension_space_to_document(space)) == space

    def test_counts_are_row_major_by_x(self):
        space = TensionSpace(counts=np.array([[1, 2], [3, 4]], dtype=np.int64))
        doc = tension_space_to_document(space)
        assert doc["counts"] == [[1, 2], [3, 4]]
        assert (doc["x_max"], doc["y_max"]) == (1, 1)

    def test_shape_mismatch_rejected(self):
        doc = {"version": 1, "axes": None, "x_max": 2, "y_max": 1, "counts": [[1, 2], [3, 4]]}
        with pytest.raises(ParseError):
            tension_space_from_document(doc)


class TestExports:
    @pytest.fixture()
    def space(self):
        return TensionSpace(counts=np.array([[4, 0], [0, 2]], dtype=np.int64))

    def test_csv_lists_nonzero_cells(self, space):
        assert export_tension_space(space, "csv") == b"x,y,count\n0,0,4\n1,1,2\n"

    def test_pgm_top_row_is_highest_y(self, space):
        # y increases upward, so the first pixel row holds y = y_max
        assert export_tension_space(space, "pgm") == b"P2\n2 2\n255\n0 128\n255 0\n"

    def test_json_export_round_trips(self, space):
        doc = json.loads(export_tension_space(space, "json").decode())
        assert tension_space_from_document(doc) == space

    def test_unknown_format(self, space):
        with pytest.raises(ValueError, match="format"):
            export_tension_space(space, "bmp")
