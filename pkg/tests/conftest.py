from __future__ import annotations

import random

import pytest

from tensionspace.fixtures import GENERATED_FANNY, MATCHMAKING, fixture_text, load_fixture
from tensionspace.model import Action, Character, NarrativeSystem, RangeSpec, validate_system


@pytest.fixture(scope="session")
def matchmaking_system():
    return load_fixture(MATCHMAKING)


@pytest.fixture(scope="session")
def fanny_system():
    return load_fixture(GENERATED_FANNY)


@pytest.fixture(scope="session")
def matchmaking_text():
    return fixture_text(MATCHMAKING)


@pytest.fixture(scope="session")
def fanny_text():
    return fixture_text(GENERATED_FANNY)


def random_world(rng: random.Random, n: int, value_range: RangeSpec, bot_chance: float = 0.0):
    return tuple(
        None if rng.random() < bot_chance else rng.randint(value_range.min, value_range.max)
        for _ in range(n)
    )


def random_system(rng: random.Random) -> NarrativeSystem:
    """A random valid narrative system for property and determinism tests."""
    value_range = RangeSpec(0, rng.choice([1, 1, 2]))
    n = rng.randint(1, 6)
    propositions = tuple(f"p{i}" for i in range(n))
    themes = tuple(f"t{i}" for i in range(rng.randint(1, 3)))

    actions = {}
    for i in range(rng.randint(0, 5)):
        actions[f"a{i}"] = Action(
            name=f"a{i}",
            precondition=random_world(rng, n, value_range, bot_chance=0.6),
            postcondition=random_world(rng, n, value_range, bot_chance=0.4),
        )

    actual = random_world(rng, n, value_range)
    characters = []
    for i in range(rng.randint(1, 3)):
        perceived = actual if rng.random() < 0.5 else random_world(rng, n, value_range)
        characters.append(
            Character(
                name=f"c{i}",
                perceived=perceived,
                worldviews={
                    t: random_world(rng, n, value_range, bot_chance=0.2) for t in themes
                },
                action_ids=tuple(a for a in actions if rng.random() < 0.7),
            )
        )

    system = NarrativeSystem(
        propositions=propositions,
        themes=themes,
        value_range=value_range,
        actual=actual,
        characters=tuple(characters),
        actions=actions,
    )
    assert not validate_system(system)
    return system
