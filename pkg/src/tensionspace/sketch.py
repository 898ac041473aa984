"""Sketch-based authoring: grid edges decomposed into unit movements, fit
either to worldview truth values or to actions.

Worldview fitting assigns each unit movement of each edge to a distinct,
still-unclaimed proposition whose pre-set values are compatible with the
movement's relation, filling free values with a seeded generator (all the
choices are structurally equivalent).  Action fitting treats each edge as
one action: an A* search over don't-care-free world states, moving by
single-proposition flips, finds a state at the edge's end position, and the
flipped propositions become the action's pre/postcondition.

Only the binary truth range is supported.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .model import Action, ContractViolation, RangeSpec, World
from .analysis import (
    ENUMERATION_GUARD,
    EnumerationTooLarge,
    Position,
    classify_movement,
    position_of,
)

__all__ = [
    "GridNode",
    "SketchEdge",
    "Sketch",
    "SketchMode",
    "WorldviewRelation",
    "FitFailure",
    "FitResult",
    "EmptyDecomposition",
    "decompose_edge",
    "movement_relation",
    "fit_worldviews",
    "find_start_world",
    "fit_actions",
]

_BINARY = RangeSpec(0, 1)


class GridNode(NamedTuple):
    x: int
    y: int


class SketchMode(str, Enum):
    WORLDVIEW = "worldview"
    ACTION = "action"


@dataclass(frozen=True)
class SketchEdge:
    start: GridNode
    end: GridNode
    color: str | None = None


@dataclass(frozen=True)
class Sketch:
    edges: tuple[SketchEdge, ...]
    mode: SketchMode = SketchMode.WORLDVIEW
    axes: tuple[tuple[str, str], tuple[str, str]] | None = None


class WorldviewRelation(str, Enum):
    """What a unit movement implies about the two worldview values of the
    proposition it is fit to."""

    VALUES_EQUAL = "values-equal"
    VALUES_DIFFER = "values-differ"
    X_DONT_CARE = "x-dont-care"
    Y_DONT_CARE = "y-dont-care"


@dataclass(frozen=True)
class FitFailure:
    edge_index: int
    movement_index: int | None
    reason: str


@dataclass(frozen=True)
class FitResult:
    fitted_x: World | None = None
    fitted_y: World | None = None
    fitted_actions: tuple[Action, ...] = ()
    failures: tuple[FitFailure, ...] = ()

    @property
    def fully_successful(self) -> bool:
        return not self.failures


class EmptyDecomposition(ValueError):
    """A sketch edge with zero displacement cannot be decomposed."""


def decompose_edge(edge: SketchEdge) -> list[int]:
    """Unit movements realizing the edge: the diagonal ones first, then the
    axis-aligned residual, signs matching the edge displacement."""
    dx = edge.end.x - edge.start.x
    dy = edge.end.y - edge.start.y
    if dx == 0 and dy == 0:
        raise EmptyDecomposition(f"edge {edge.start} -> {edge.end} has no displacement")

    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    diagonals = min(abs(dx), abs(dy))
    movements = [classify_movement(sx, sy)] * diagonals
    if abs(dx) > diagonals:
        movements += [classify_movement(sx, 0)] * (abs(dx) - diagonals)
    elif abs(dy) > diagonals:
        movements += [classify_movement(0, sy)] * (abs(dy) - diagonals)
    return movements


_RELATIONS = {
    2: WorldviewRelation.VALUES_EQUAL,
    6: WorldviewRelation.VALUES_EQUAL,
    4: WorldviewRelation.VALUES_DIFFER,
    8: WorldviewRelation.VALUES_DIFFER,
    1: WorldviewRelation.X_DONT_CARE,
    5: WorldviewRelation.X_DONT_CARE,
    3: WorldviewRelation.Y_DONT_CARE,
    7: WorldviewRelation.Y_DONT_CARE,
}


def movement_relation(direction: int) -> WorldviewRelation:
    """The worldview relation implied by a unit movement class (1-8)."""
    if direction not in _RELATIONS:
        raise ContractViolation(f"no worldview relation for movement class {direction}")
    return _RELATIONS[direction]


def _require_binary(value_range: RangeSpec) -> None:
    if value_range != _BINARY:
        raise ContractViolation(
            "sketch fitting works only with the binary true/false range"
        )


def _compatible(relation: WorldviewRelation, vx: int | None, vy: int | None) -> bool:
    if relation is WorldviewRelation.VALUES_EQUAL:
        return vx is None or vy is None or vx == vy
    if relation is WorldviewRelation.VALUES_DIFFER:
        return vx is None or vy is None or vx != vy
    if relation is WorldviewRelation.X_DONT_CARE:
        return vx is None
    return vy is None


def fit_worldviews(
    sketch: Sketch,
    partial_x: World,
    partial_y: World,
    seed: int,
    value_range: RangeSpec = _BINARY,
) -> FitResult:
    """Fit a worldview-mode sketch onto two (possibly partial) worldviews.

    ``None`` entries in the partials are free; pre-set values constrain the
    movements a proposition can host.  Every unit movement claims a distinct
    proposition; movements with no compatible unclaimed proposition are
    reported as failures and skipped.  Unclaimed free entries stay ``None``
    (don't care).
    """
    if sketch.mode is not SketchMode.WORLDVIEW:
        raise ContractViolation("fit_worldviews requires a worldview-mode sketch")
    _require_binary(value_range)
    if len(partial_x) != len(partial_y):
        raise ContractViolation(f"world length mismatch: {len(partial_x)} vs {len(partial_y)}")

    rng = random.Random(seed)
    vx = list(partial_x)
    vy = list(partial_y)
    claimed: set[int] = set()
    failures: list[FitFailure] = []

    for edge_index, edge in enumerate(sketch.edges):
        for movement_index, movement in enumerate(decompose_edge(edge)):
            relation = movement_relation(movement)
            prop = next(
                (
                    i
                    for i in range(len(vx))
                    if i not in claimed and _compatible(relation, vx[i], vy[i])
                ),
                None,
            )
            if prop is None:
                failures.append(
                    FitFailure(
                        edge_index,
                        movement_index,
                        f"no unclaimed proposition compatible with {relation.value}",
                    )
                )
                continue

            claimed.add(prop)
            if relation is WorldviewRelation.VALUES_EQUAL:
                value = vx[prop] if vx[prop] is not None else (
                    vy[prop] if vy[prop] is not None else rng.randint(0, 1)
                )
                vx[prop] = vy[prop] = value
            elif relation is WorldviewRelation.VALUES_DIFFER:
                if vx[prop] is not None:
                    vy[prop] = 1 - vx[prop]
                elif vy[prop] is not None:
                    vx[prop] = 1 - vy[prop]
                else:
                    value = rng.randint(0, 1)
                    vx[prop], vy[prop] = value, 1 - value
            elif relation is WorldviewRelation.X_DONT_CARE:
                if vy[prop] is None:
                    vy[prop] = rng.randint(0, 1)
            else:  # Y_DONT_CARE
                if vx[prop] is None:
                    vx[prop] = rng.randint(0, 1)

    return FitResult(fitted_x=tuple(vx), fitted_y=tuple(vy), failures=tuple(failures))


def find_start_world(
    w_x: World,
    w_y: World,
    node: GridNode,
    value_range: RangeSpec = _BINARY,
    seed: int | None = None,
) -> World | None:
    """A don't-care-free world whose position equals the node, or ``None``.

    Deterministically the lexicographically smallest match; with a seed, a
    uniformly random match instead (the "refit" affordance).
    """
    n = len(w_x)
    span = value_range.span
    if span**n > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"{span}^{n} candidate start worlds exceed the enumeration guard"
        )
    target = Position(node.x, node.y)
    rng = random.Random(seed) if seed is not None else None

    chosen: World | None = None
    seen = 0
    for state in itertools.product(range(value_range.min, value_range.max + 1), repeat=n):
        if position_of(w_x, w_y, state) != target:
            continue
        if rng is None:
            return state
        seen += 1
        if rng.randrange(seen) == 0:
            chosen = state
    return chosen


def _astar_edge(
    start_state: World, end: GridNode, w_x: World, w_y: World
) -> World | None:
    """Best-first search for a state at the end position, flipping one
    proposition per move (cost 1, Manhattan tension-space heuristic,
    ties broken by insertion order, neighbours in proposition order)."""
    n = len(start_state)
    target = (end.x, end.y)

    def h(state: World) -> int:
        pos = position_of(w_x, w_y, state)
        return abs(pos.x - target[0]) + abs(pos.y - target[1])

    counter = itertools.count()
    open_heap: list[tuple[int, int, World]] = [(h(start_state), next(counter), start_state)]
    g_cost = {start_state: 0}
    closed: set[World] = set()

    while open_heap:
        _, _, state = heapq.heappop(open_heap)
        if state in closed:
            continue
        if position_of(w_x, w_y, state) == Position(*target):
            return state
        closed.add(state)
        g = g_cost[state]
        for i in range(n):
            neighbour = state[:i] + (1 - state[i],) + state[i + 1 :]
            if neighbour in closed:
                continue
            ng = g + 1
            if ng < g_cost.get(neighbour, ng + 1):
                g_cost[neighbour] = ng
                heapq.heappush(open_heap, (ng + h(neighbour), next(counter), neighbour))
    return None


def fit_actions(
    sketch: Sketch,
    w_x: World,
    w_y: World,
    start: World,
    value_range: RangeSpec = _BINARY,
    name_prefix: str = "sketch-action-",
) -> FitResult:
    """Fit an action-mode sketch: one action per edge, chained as a trace.

    Each edge is searched independently from the current working world; on
    success the action's precondition holds the start-of-edge values of
    exactly the flipped propositions and the postcondition their new values
    (don't care elsewhere), and the working world advances.  On the first
    failure the remaining edges are reported failed and fitting stops.
    """
    if sketch.mode is not SketchMode.ACTION:
        raise ContractViolation("fit_actions requires an action-mode sketch")
    _require_binary(value_range)
    if not sketch.edges:
        return FitResult(fitted_actions=())
    first = sketch.edges[0].start
    if position_of(w_x, w_y, start) != Position(first.x, first.y):
        raise ContractViolation(
            f"start world sits at {tuple(position_of(w_x, w_y, start))}, "
            f"but the sketch begins at {tuple(first)}"
        )

    working = start
    actions: list[Action] = []
    failures: list[FitFailure] = []

    for edge_index, edge in enumerate(sketch.edges):
        current = position_of(w_x, w_y, working)
        if current != Position(edge.start.x, edge.start.y):
            failures.append(
                FitFailure(edge_index, None, f"edge starts at {tuple(edge.start)} "
                           f"but the working world sits at {tuple(current)}")
            )
            break
        goal_state = _astar_edge(working, edge.end, w_x, w_y)
        if goal_state is None:
            failures.append(
                FitFailure(edge_index, None, f"no world state at {tuple(edge.end)} "
                           "is reachable in this tension space")
            )
            break
        pre = tuple(
            working[i] if working[i] != goal_state[i] else None for i in range(len(working))
        )
        post = tuple(
            goal_state[i] if working[i] != goal_state[i] else None for i in range(len(working))
        )
        actions.append(Action(f"{name_prefix}{len(actions) + 1}", pre, post))
        working = goal_state

    # Everything after a failed edge fails as well.
    for later in range(len(actions) + len(failures), len(sketch.edges)):
        failures.append(FitFailure(later, None, "skipped after earlier edge failure"))

    return FitResult(fitted_actions=tuple(actions), failures=tuple(failures))
