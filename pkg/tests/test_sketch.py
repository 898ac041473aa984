from __future__ import annotations

import pytest

from tensionspace.analysis import Position, position_of
from tensionspace.model import Action, ContractViolation, RangeSpec
from tensionspace.sketch import (
    EmptyDecomposition,
    FitFailure,
    GridNode,
    Sketch,
    SketchEdge,
    SketchMode,
    WorldviewRelation,
    decompose_edge,
    find_start_world,
    fit_actions,
    fit_worldviews,
    movement_relation,
)

B = None


def _worldview_sketch(*nodes):
    edges = tuple(
        SketchEdge(GridNode(*a), GridNode(*b)) for a, b in zip(nodes, nodes[1:])
    )
    return Sketch(edges=edges, mode=SketchMode.WORLDVIEW)


def _action_sketch(*nodes):
    edges = tuple(
        SketchEdge(GridNode(*a), GridNode(*b)) for a, b in zip(nodes, nodes[1:])
    )
    return Sketch(edges=edges, mode=SketchMode.ACTION)


class TestDecomposeEdge:
    def test_pure_diagonal(self):
        edge = SketchEdge(GridNode(2, 0), GridNode(4, 2))
        assert decompose_edge(edge) == [2, 2]

    def test_anti_diagonal(self):
        edge = SketchEdge(GridNode(4, 2), GridNode(2, 4))
        assert decompose_edge(edge) == [8, 8]

    def test_diagonals_then_axis_residual(self):
        edge = SketchEdge(GridNode(3, 3), GridNode(0, 2))
        assert decompose_edge(edge) == [6, 7, 7]

    def test_axis_only(self):
        edge = SketchEdge(GridNode(1, 1), GridNode(1, 4))
        assert decompose_edge(edge) == [1, 1, 1]

    def test_zero_displacement_rejected(self):
        with pytest.raises(EmptyDecomposition):
            decompose_edge(SketchEdge(GridNode(2, 2), GridNode(2, 2)))

    def test_unit_count_is_chebyshev_distance(self):
        for (sx, sy), (ex, ey) in [((0, 0), (3, 5)), ((4, 1), (0, 0)), ((2, 2), (5, 1))]:
            edge = SketchEdge(GridNode(sx, sy), GridNode(ex, ey))
            assert len(decompose_edge(edge)) == max(abs(ex - sx), abs(ey - sy))


class TestMovementRelation:
    def test_table(self):
        expected = {
            2: WorldviewRelation.VALUES_EQUAL,
            6: WorldviewRelation.VALUES_EQUAL,
            4: WorldviewRelation.VALUES_DIFFER,
            8: WorldviewRelation.VALUES_DIFFER,
            1: WorldviewRelation.X_DONT_CARE,
            5: WorldviewRelation.X_DONT_CARE,
            3: WorldviewRelation.Y_DONT_CARE,
            7: WorldviewRelation.Y_DONT_CARE,
        }
        for cls, relation in expected.items():
            assert movement_relation(cls) == relation

    def test_stationary_class_has_no_relation(self):
        with pytest.raises(ContractViolation):
            movement_relation(9)


class TestFitWorldviews:
    def test_relations_fit_in_proposition_order(self):
        sketch = _worldview_sketch((2, 0), (4, 2), (2, 4))
        result = fit_worldviews(sketch, (B,) * 4, (B,) * 4, seed=0)
        assert result.fully_successful
        x, y = result.fitted_x, result.fitted_y
        assert x[0] == y[0] and x[1] == y[1]  # the two diagonal units
        assert x[2] != y[2] and x[3] != y[3]  # the two anti-diagonal units

    def test_axis_movements_set_dont_cares(self):
        sketch = _worldview_sketch((0, 0), (0, 1), (1, 1))
        result = fit_worldviews(sketch, (B, B), (B, B), seed=0)
        assert result.fully_successful
        assert result.fitted_x[0] is B and result.fitted_y[0] is not B
        assert result.fitted_x[1] is not B and result.fitted_y[1] is B

    def test_unclaimed_propositions_stay_dont_care(self):
        sketch = _worldview_sketch((0, 0), (1, 1))
        result = fit_worldviews(sketch, (B,) * 3, (B,) * 3, seed=0)
        assert result.fitted_x[1:] == (B, B)
        assert result.fitted_y[1:] == (B, B)

    def test_preset_values_constrain_choice(self):
        # proposition 0 is pre-set to differ, so the equal unit must claim 1
        sketch = _worldview_sketch((0, 0), (1, 1))
        result = fit_worldviews(sketch, (1, B), (0, B), seed=0)
        assert result.fully_successful
        assert (result.fitted_x[0], result.fitted_y[0]) == (1, 0)
        assert result.fitted_x[1] == result.fitted_y[1] is not B

    def test_preset_value_completes_partner(self):
        sketch = _worldview_sketch((0, 0), (1, 1))  # one values-equal unit
        result = fit_worldviews(sketch, (1, B), (B, B), seed=0)
        assert (result.fitted_x[0], result.fitted_y[0]) == (1, 1)

    def test_too_many_movements_report_failures(self):
        sketch = _worldview_sketch((0, 0), (3, 3))
        result = fit_worldviews(sketch, (B,) * 2, (B,) * 2, seed=0)
        assert not result.fully_successful
        assert result.failures == (
            FitFailure(0, 2, "no unclaimed proposition compatible with values-equal"),
        )

    def test_same_seed_reproduces(self):
        sketch = _worldview_sketch((2, 0), (4, 2), (2, 4), (0, 2))
        a = fit_worldviews(sketch, (B,) * 6, (B,) * 6, seed=7)
        b = fit_worldviews(sketch, (B,) * 6, (B,) * 6, seed=7)
        assert a == b

    def test_mode_must_be_worldview(self):
        sketch = _action_sketch((0, 0), (1, 1))
        with pytest.raises(ContractViolation):
            fit_worldviews(sketch, (B,), (B,), seed=0)

    def test_binary_range_only(self):
        sketch = _worldview_sketch((0, 0), (1, 1))
        with pytest.raises(ContractViolation):
            fit_worldviews(sketch, (B,), (B,), seed=0, value_range=RangeSpec(0, 2))

    def test_zero_edge_propagates(self):
        sketch = _worldview_sketch((1, 1), (1, 1))
        with pytest.raises(EmptyDecomposition):
            fit_worldviews(sketch, (B,), (B,), seed=0)


class TestFindStartWorld:
    def test_lexicographically_smallest(self, fanny_system):
        fanny = fanny_system.characters[0]
        state = find_start_world(
            fanny.worldviews["personal"], fanny.worldviews["family"], GridNode(3, 3)
        )
        assert state == (1, 0, 0, 0)  # (1, 0, 1, 1) also sits at (3, 3)

    def test_unreachable_position(self, fanny_system):
        fanny = fanny_system.characters[0]
        state = find_start_world(
            fanny.worldviews["personal"], fanny.worldviews["family"], GridNode(4, 4)
        )
        assert state is None

    def test_seeded_pick_is_valid_and_stable(self, fanny_system):
        fanny = fanny_system.characters[0]
        w_x, w_y = fanny.worldviews["personal"], fanny.worldviews["family"]
        picks = {find_start_world(w_x, w_y, GridNode(3, 3), seed=s) for s in range(20)}
        assert picks <= {(1, 0, 0, 0), (1, 0, 1, 1)}
        assert find_start_world(w_x, w_y, GridNode(3, 3), seed=5) == find_start_world(
            w_x, w_y, GridNode(3, 3), seed=5
        )


class TestFitActions:
    def test_reconstructs_generated_action(self, fanny_system):
        fanny = fanny_system.characters[0]
        w_x, w_y = fanny.worldviews["personal"], fanny.worldviews["family"]
        sketch = _action_sketch((3, 3), (0, 2))
        result = fit_actions(sketch, w_x, w_y, (1, 0, 0, 0))
        assert result.fully_successful
        assert result.fitted_actions == (
            Action("sketch-action-1", (1, 0, 0, B), (0, 1, 1, B)),
        )

    def test_chained_edges_advance_the_working_world(self, fanny_system):
        fanny = fanny_system.characters[0]
        w_x, w_y = fanny.worldviews["personal"], fanny.worldviews["family"]
        sketch = _action_sketch((3, 3), (2, 2), (1, 1))
        result = fit_actions(sketch, w_x, w_y, (1, 0, 0, 0))
        assert result.fully_successful
        state = (1, 0, 0, 0)
        for action in result.fitted_actions:
            state = tuple(
                p if e is B else e for e, p in zip(action.postcondition, state)
            )
        assert position_of(w_x, w_y, state) == Position(1, 1)

    def test_unreachable_edge_fails_and_skips_rest(self, fanny_system):
        fanny = fanny_system.characters[0]
        w_x, w_y = fanny.worldviews["personal"], fanny.worldviews["family"]
        sketch = _action_sketch((3, 3), (4, 4), (3, 3))
        result = fit_actions(sketch, w_x, w_y, (1, 0, 0, 0))
        assert result.fitted_actions == ()
        assert [f.edge_index for f in result.failures] == [0, 1]
        assert result.failures[1].reason == "skipped after earlier edge failure"

    def test_start_world_must_sit_on_first_node(self, fanny_system):
        fanny = fanny_system.characters[0]
        sketch = _action_sketch((0, 0), (1, 1))
        with pytest.raises(ContractViolation):
            fit_actions(
                sketch, fanny.worldviews["personal"], fanny.worldviews["family"], (1, 0, 0, 0)
            )

    def test_mode_must_be_action(self, fanny_system):
        fanny = fanny_system.characters[0]
        sketch = _worldview_sketch((3, 3), (2, 2))
        with pytest.raises(ContractViolation):
            fit_actions(
                sketch, fanny.worldviews["personal"], fanny.worldviews["family"], (1, 0, 0, 0)
            )

    def test_empty_sketch(self):
        sketch = Sketch(edges=(), mode=SketchMode.ACTION)
        result = fit_actions(sketch, (0,), (1,), (0,))
        assert result.fitted_actions == () and result.fully_successful
