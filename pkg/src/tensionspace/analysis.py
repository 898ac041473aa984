"""Tension-space analysis: exact 2D goal-distance histograms over all
possible actual worlds, movement classification, shape classification and
trace overlays.

Two equivalent histogram routes exist: direct enumeration of every world
state (exponential, guarded) and an exact per-proposition convolution
(polynomial).  Propositions contribute independent per-axis displacement
distributions, so the joint histogram is the 2D convolution of the
per-proposition joint counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    Action,
    ContractViolation,
    RangeSpec,
    World,
    apply_postcondition,
    precondition_satisfied,
    value_dist,
    world_distance,
)
from .simulate import Trace

__all__ = [
    "ENUMERATION_GUARD",
    "Position",
    "TensionSpace",
    "Movement",
    "ShapeClass",
    "EnumerationTooLarge",
    "position_of",
    "max_axis_distance",
    "compute_space_bruteforce",
    "compute_space_convolution",
    "classify_movement",
    "opposite_movement",
    "action_movement",
    "classify_shape",
    "trace_overlay",
]

# Brute-force enumeration refuses above this many world states.
ENUMERATION_GUARD = 2**24


class EnumerationTooLarge(ValueError):
    """The brute-force state enumeration would exceed the guard."""


class Position(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class TensionSpace:
    """Exact count histogram over (x, y) goal-distance positions.

    ``counts`` is indexed ``[x][y]`` and always has shape
    ``(x_max + 1, y_max + 1)``; its total mass is span^|P|.
    """

    counts: np.ndarray
    axes: tuple[tuple[str, str], tuple[str, str]] | None = None

    @property
    def x_max(self) -> int:
        return self.counts.shape[0] - 1

    @property
    def y_max(self) -> int:
        return self.counts.shape[1] - 1

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensionSpace):
            return NotImplemented
        return self.axes == other.axes and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class Movement:
    """A displacement in tension space with its class per the nine-way
    conflict/harmony taxonomy."""

    start: Position
    end: Position
    movement_class: int

    @property
    def magnitude(self) -> tuple[int, int]:
        return (self.end.x - self.start.x, self.end.y - self.start.y)


@dataclass(frozen=True)
class ShapeClass:
    """Strong/Weak/Neutral label with the count-weighted correlation behind it."""

    label: str
    correlation: float


def position_of(w_x: World, w_y: World, state: World) -> Position:
    """Goal distances of both axis worldviews to a full world state."""
    if any(v is None for v in state):
        raise ContractViolation("tension-space positions require a don't-care-free state")
    return Position(world_distance(w_x, state), world_distance(w_y, state))


def max_axis_distance(worldview: World, value_range: RangeSpec) -> int:
    """Largest distance any full state can have from the worldview."""
    return sum(
        max(v - value_range.min, value_range.max - v) for v in worldview if v is not None
    )


def _empty_counts(w_x: World, w_y: World, value_range: RangeSpec) -> np.ndarray:
    return np.zeros(
        (max_axis_distance(w_x, value_range) + 1, max_axis_distance(w_y, value_range) + 1),
        dtype=np.int64,
    )


def compute_space_bruteforce(
    w_x: World,
    w_y: World,
    value_range: RangeSpec,
    axes: tuple[tuple[str, str], tuple[str, str]] | None = None,
) -> TensionSpace:
    """Histogram by enumerating every possible actual-world state."""
    if len(w_x) != len(w_y):
        raise ContractViolation(f"world length mismatch: {len(w_x)} vs {len(w_y)}")
    n = len(w_x)
    span = value_range.span
    if span**n > ENUMERATION_GUARD:
        raise EnumerationTooLarge(
            f"{span}^{n} states exceed the enumeration guard ({ENUMERATION_GUARD}); "
            "use the convolution route"
        )

    counts = _empty_counts(w_x, w_y, value_range)
    if n == 0:
        counts[0, 0] = 1
        return TensionSpace(counts=counts, axes=axes)

    grades = np.arange(value_range.min, value_range.max + 1)
    # Mixed-radix digits of all state indices: column i is proposition i's grade.
    states = (np.arange(span**n, dtype=np.int64)[:, None] // span ** np.arange(n)) % span
    dist_x = np.zeros(len(states), dtype=np.int64)
    dist_y = np.zeros(len(states), dtype=np.int64)
    for i in range(n):
        if w_x[i] is not None:
            dist_x += np.abs(grades[states[:, i]] - w_x[i])
        if w_y[i] is not None:
            dist_y += np.abs(grades[states[:, i]] - w_y[i])

    flat = np.bincount(dist_x * counts.shape[1] + dist_y, minlength=counts.size)
    counts += flat.reshape(counts.shape)
    return TensionSpace(counts=counts, axes=axes)


def compute_space_convolution(
    w_x: World,
    w_y: World,
    value_range: RangeSpec,
    axes: tuple[tuple[str, str], tuple[str, str]] | None = None,
) -> TensionSpace:
    """Histogram by convolving per-proposition displacement distributions.

    Each proposition's grade is chosen independently, so its joint
    (x-distance, y-distance) count array convolves into the total.
    """
    if len(w_x) != len(w_y):
        raise ContractViolation(f"world length mismatch: {len(w_x)} vs {len(w_y)}")

    acc = np.ones((1, 1), dtype=np.int64)
    for vx, vy in zip(w_x, w_y):
        part = np.zeros(
            (max(value_dist(vx, g) for g in range(value_range.min, value_range.max + 1)) + 1,
             max(value_dist(vy, g) for g in range(value_range.min, value_range.max + 1)) + 1),
            dtype=np.int64,
        )
        for grade in range(value_range.min, value_range.max + 1):
            part[value_dist(vx, grade), value_dist(vy, grade)] += 1
        new = np.zeros((acc.shape[0] + part.shape[0] - 1, acc.shape[1] + part.shape[1] - 1),
                       dtype=np.int64)
        for dx in range(part.shape[0]):
            for dy in range(part.shape[1]):
                if part[dx, dy]:
                    new[dx : dx + acc.shape[0], dy : dy + acc.shape[1]] += part[dx, dy] * acc
        acc = new

    counts = _empty_counts(w_x, w_y, value_range)
    counts[: acc.shape[0], : acc.shape[1]] += acc
    return TensionSpace(counts=counts, axes=axes)


# Sign pattern (sign(dx), sign(dy)) -> movement class. Positive means the
# distance grows (conflict), negative that it shrinks (harmony).
_MOVEMENT_CLASSES: dict[tuple[int, int], int] = {
    (0, 1): 1,
    (1, 1): 2,
    (1, 0): 3,
    (1, -1): 4,
    (0, -1): 5,
    (-1, -1): 6,
    (-1, 0): 7,
    (-1, 1): 8,
    (0, 0): 9,
}

_OPPOSITE = {1: 5, 2: 6, 3: 7, 4: 8, 5: 1, 6: 2, 7: 3, 8: 4, 9: 9}


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def classify_movement(dx: int, dy: int) -> int:
    """Map a displacement's sign pattern to its class 1-9."""
    return _MOVEMENT_CLASSES[(_sign(dx), _sign(dy))]


def opposite_movement(movement_class: int) -> int:
    """The class of the reversed displacement (1<->5, 2<->6, 3<->7, 4<->8)."""
    return _OPPOSITE[movement_class]


def action_movement(action: Action, state: World, w_x: World, w_y: World) -> Movement | None:
    """The tension-space movement the action causes at a state, or ``None``
    when its precondition fails there."""
    if not precondition_satisfied(action, state):
        return None
    start = position_of(w_x, w_y, state)
    end = position_of(w_x, w_y, apply_postcondition(action.postcondition, state))
    return Movement(start, end, classify_movement(end.x - start.x, end.y - start.y))


def classify_shape(space: TensionSpace, threshold: float = 0.4) -> ShapeClass:
    """Classify a space by the count-weighted Pearson correlation of (x, y).

    Anti-diagonal shapes (correlation <= -threshold) are Strong: most
    movements harmonize one axis at the other's expense.  Diagonal shapes
    (>= +threshold) are Weak.  Zero variance on either axis is Neutral.
    """
    counts = space.counts.astype(np.float64)
    total = counts.sum()
    if total == 0:
        raise ContractViolation("cannot classify an empty tension space")

    xs = np.arange(counts.shape[0], dtype=np.float64)[:, None]
    ys = np.arange(counts.shape[1], dtype=np.float64)[None, :]
    mean_x = (counts * xs).sum() / total
    mean_y = (counts * ys).sum() / total
    var_x = (counts * (xs - mean_x) ** 2).sum() / total
    var_y = (counts * (ys - mean_y) ** 2).sum() / total
    if var_x == 0.0 or var_y == 0.0:
        return ShapeClass("Neutral", 0.0)

    cov = (counts * (xs - mean_x) * (ys - mean_y)).sum() / total
    correlation = float(cov / np.sqrt(var_x * var_y))
    if correlation <= -threshold:
        return ShapeClass("Strong", correlation)
    if correlation >= threshold:
        return ShapeClass("Weak", correlation)
    return ShapeClass("Neutral", correlation)


def trace_overlay(trace: Trace, w_x: World, w_y: World) -> list[Movement]:
    """One movement per successful step of the trace, chained end to start."""
    movements: list[Movement] = []
    for record in trace.steps:
        if not record.succeeded:
            continue
        start = position_of(w_x, w_y, record.actual_before)
        end = position_of(w_x, w_y, record.actual_after)
        movements.append(Movement(start, end, classify_movement(end.x - start.x, end.y - start.y)))
    return movements
