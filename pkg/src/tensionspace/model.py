"""Core narrative formalism: truth values, worlds, characters, actions.

A storyworld is a fixed ordered set of propositions, each holding an
integer truth grade in a configured range.  The distinguished "don't care"
value is represented as ``None`` throughout: it contributes zero distance
and, in postconditions, leaves the underlying value untouched.

Worlds are plain tuples of grades (or ``None``), positional against the
system's proposition order.  All container types are frozen dataclasses;
every operation returns new values and never mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# The "don't care" truth value.
BOT = None

Value = int | None
World = tuple[Value, ...]


class ContractViolation(ValueError):
    """An operation was called with arguments breaking its preconditions."""


@dataclass(frozen=True)
class RangeSpec:
    """Integer range of truth values. ``min`` is always 0."""

    min: int = 0
    max: int = 1

    def __post_init__(self) -> None:
        if self.min != 0:
            raise ContractViolation("truth-value range must start at 0")
        if self.max < 1:
            raise ContractViolation("truth-value range max must be >= 1")

    @property
    def span(self) -> int:
        """Number of distinct grades in the range."""
        return self.max - self.min + 1

    def contains(self, value: Value) -> bool:
        return value is BOT or (isinstance(value, int) and self.min <= value <= self.max)


@dataclass(frozen=True)
class Character:
    """A character: perceived actual world, one worldview per theme, actions."""

    name: str
    perceived: World
    worldviews: dict[str, World]
    action_ids: tuple[str, ...] = ()

    def worldview(self, theme: str) -> World:
        try:
            return self.worldviews[theme]
        except KeyError:
            raise KeyError(f"character {self.name!r} has no worldview for theme {theme!r}") from None


@dataclass(frozen=True)
class Action:
    """An action: a precondition world and a postcondition (effect) world."""

    name: str
    precondition: World
    postcondition: World


@dataclass(frozen=True)
class NarrativeSystem:
    """The full narrative tuple: propositions, themes, range, actual world,
    characters (in declaration order) and actions by name."""

    propositions: tuple[str, ...]
    themes: tuple[str, ...]
    value_range: RangeSpec
    actual: World
    characters: tuple[Character, ...]
    actions: dict[str, Action] = field(default_factory=dict)

    def character(self, name: str) -> Character:
        for c in self.characters:
            if c.name == name:
                return c
        raise KeyError(f"unknown character {name!r}")

    def replace_actual(self, actual: World) -> "NarrativeSystem":
        return NarrativeSystem(
            propositions=self.propositions,
            themes=self.themes,
            value_range=self.value_range,
            actual=actual,
            characters=self.characters,
            actions=self.actions,
        )

    def replace_characters(self, characters: tuple[Character, ...]) -> "NarrativeSystem":
        return NarrativeSystem(
            propositions=self.propositions,
            themes=self.themes,
            value_range=self.value_range,
            actual=self.actual,
            characters=characters,
            actions=self.actions,
        )


@dataclass(frozen=True)
class Violation:
    """One broken model invariant. Violations are data, not exceptions."""

    rule: str
    entity: str
    message: str


def value_dist(v1: Value, v2: Value) -> int:
    """Distance between two truth values; a "don't care" contributes zero."""
    if v1 is BOT or v2 is BOT:
        return 0
    return abs(v1 - v2)


def world_distance(w1: World, w2: World) -> int:
    """Manhattan distance between two worlds, ignoring "don't care" values."""
    if len(w1) != len(w2):
        raise ContractViolation(f"world length mismatch: {len(w1)} vs {len(w2)}")
    return sum(value_dist(a, b) for a, b in zip(w1, w2))


def apply_postcondition(effect: World, world: World) -> World:
    """Overlay an effect on a world: non-⊥ effect values win, the rest pass through."""
    if len(effect) != len(world):
        raise ContractViolation(f"world length mismatch: {len(effect)} vs {len(world)}")
    return tuple(w if e is BOT else e for e, w in zip(effect, world))


def precondition_satisfied(action: Action, world: World) -> bool:
    """True iff the action's precondition is at distance zero from the world."""
    return world_distance(action.precondition, world) == 0


def _check_world(
    violations: list[Violation],
    entity: str,
    world: World,
    system: NarrativeSystem,
    allow_bot: bool,
    rule_prefix: str,
) -> None:
    if len(world) != len(system.propositions):
        violations.append(
            Violation(
                rule=f"{rule_prefix}-length",
                entity=entity,
                message=f"world has {len(world)} values, expected {len(system.propositions)}",
            )
        )
        return
    for i, v in enumerate(world):
        if v is BOT:
            if not allow_bot:
                violations.append(
                    Violation(
                        rule=f"{rule_prefix}-dont-care",
                        entity=entity,
                        message=f"don't-care value at proposition {system.propositions[i]!r}",
                    )
                )
        elif not system.value_range.contains(v):
            violations.append(
                Violation(
                    rule=f"{rule_prefix}-out-of-range",
                    entity=entity,
                    message=f"grade {v} at proposition {system.propositions[i]!r} outside "
                    f"[{system.value_range.min}, {system.value_range.max}]",
                )
            )


def validate_system(system: NarrativeSystem) -> list[Violation]:
    """Check every model invariant; an empty result means the system is valid."""
    violations: list[Violation] = []

    if len(set(system.propositions)) != len(system.propositions):
        violations.append(Violation("duplicate-proposition", "system", "proposition names must be unique"))
    if len(set(system.themes)) != len(system.themes):
        violations.append(Violation("duplicate-theme", "system", "theme names must be unique"))

    _check_world(violations, "actual world", system.actual, system, allow_bot=False, rule_prefix="actual-world")

    seen_names: set[str] = set()
    for character in system.characters:
        ent = f"character {character.name!r}"
        if character.name in seen_names:
            violations.append(Violation("duplicate-character", ent, "character names must be unique"))
        seen_names.add(character.name)

        # Perceived worlds carry full assignments, like the actual world.
        _check_world(violations, f"{ent} perceived", character.perceived, system,
                     allow_bot=False, rule_prefix="perceived-world")

        for theme in system.themes:
            if theme not in character.worldviews:
                violations.append(
                    Violation("missing-worldview", ent, f"no worldview for theme {theme!r}")
                )
        for theme, world in character.worldviews.items():
            if theme not in system.themes:
                violations.append(
                    Violation("unknown-theme", ent, f"worldview for undeclared theme {theme!r}")
                )
            _check_world(violations, f"{ent} worldview {theme!r}", world, system,
                         allow_bot=True, rule_prefix="worldview")

        for action_id in character.action_ids:
            if action_id not in system.actions:
                violations.append(
                    Violation("unknown-action", ent, f"references undeclared action {action_id!r}")
                )

    for name, action in system.actions.items():
        ent = f"action {name!r}"
        if action.name != name:
            violations.append(Violation("action-name-mismatch", ent, f"registered as {name!r} but named {action.name!r}"))
        _check_world(violations, f"{ent} precondition", action.precondition, system,
                     allow_bot=True, rule_prefix="precondition")
        _check_world(violations, f"{ent} postcondition", action.postcondition, system,
                     allow_bot=True, rule_prefix="postcondition")

    return violations
