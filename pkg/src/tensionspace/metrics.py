"""Tension metrics: goal, subjective, personal and interpersonal tension,
plus one-step prediction of the subjective effect of an action.

All functions are pure and operate on immutable model values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Action,
    Character,
    World,
    apply_postcondition,
    value_dist,
    world_distance,
)

__all__ = [
    "TensionReport",
    "value_dist",
    "world_distance",
    "goal_tension",
    "subjective_goal_tension",
    "personal_tension",
    "interpersonal_tension",
    "predict",
]


@dataclass(frozen=True)
class TensionReport:
    """Goal tension broken down per theme; total is always their sum."""

    per_theme: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.per_theme.values())


def _tension_against(character: Character, world: World) -> TensionReport:
    return TensionReport(
        per_theme={theme: world_distance(wv, world) for theme, wv in character.worldviews.items()}
    )


def goal_tension(character: Character, actual: World) -> TensionReport:
    """Sum of distances of each worldview to the actual world."""
    return _tension_against(character, actual)


def subjective_goal_tension(character: Character) -> TensionReport:
    """Goal tension as the character believes it to be: measured against
    their perceived actual world."""
    return _tension_against(character, character.perceived)


def personal_tension(character: Character, theme1: str, theme2: str) -> int:
    """Distance between two worldviews of one character."""
    return world_distance(character.worldview(theme1), character.worldview(theme2))


def interpersonal_tension(c1: Character, theme1: str, c2: Character, theme2: str) -> int:
    """Distance between worldviews of two (possibly equal) characters."""
    return world_distance(c1.worldview(theme1), c2.worldview(theme2))


def predict(character: Character, action: Action) -> int:
    """Subjective goal tension the character expects after taking the action:
    the action's postcondition is applied to the perceived world and the
    goal-tension sum is taken against the result. Nothing is mutated."""
    predicted = apply_postcondition(action.postcondition, character.perceived)
    return sum(world_distance(wv, predicted) for wv in character.worldviews.values())
