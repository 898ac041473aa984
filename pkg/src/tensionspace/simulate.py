"""Greedy per-step simulation: action selection, world updates, traces.

Each step iterates characters in declaration order.  A character scores
every available action whose precondition holds in their *perceived* world
by the predicted drop in subjective goal tension, and takes the best
non-negative one.  The action then has to pass the precondition check
against the *actual* world; a false belief can make it fail, in which case
nothing changes.  On success the postcondition is applied to the actual
world and to every character's perceived world.

The whole process is deterministic: ties break on the lowest action index,
and a fixed system + config always reproduces the same trace bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .metrics import predict, subjective_goal_tension
from .model import (
    Character,
    NarrativeSystem,
    World,
    apply_postcondition,
    precondition_satisfied,
)

__all__ = ["SimulationConfig", "StepRecord", "Trace", "act", "step", "run"]


@dataclass(frozen=True)
class SimulationConfig:
    max_steps: int = 100
    strict_improvement: bool = False
    # Recorded for trace provenance; the core loop itself is deterministic.
    seed: int = 0


@dataclass(frozen=True)
class StepRecord:
    character: str
    chosen_action: str | None
    succeeded: bool
    actual_before: World
    actual_after: World
    score: int | None


@dataclass(frozen=True)
class Trace:
    steps: tuple[StepRecord, ...]
    config: SimulationConfig = field(default_factory=SimulationConfig)

    @property
    def final_actual(self) -> World | None:
        return self.steps[-1].actual_after if self.steps else None


def act(
    character: Character, system: NarrativeSystem, config: SimulationConfig | None = None
) -> tuple[str | None, int | None]:
    """Pick the character's best action, or none.

    Scores each available action whose precondition holds in the perceived
    world by current subjective tension minus predicted tension; unscored
    actions hold the sentinel -1.  Returns the maximal-scoring action when
    its score is >= 0 (> 0 under strict improvement), ties going to the
    lowest action index.
    """
    config = config or SimulationConfig()
    current = subjective_goal_tension(character).total

    best_name: str | None = None
    best_score = -1
    for action_id in character.action_ids:
        action = system.actions[action_id]
        if not precondition_satisfied(action, character.perceived):
            continue
        score = current - predict(character, action)
        if score > best_score:
            best_name, best_score = action_id, score

    floor = 1 if config.strict_improvement else 0
    if best_name is None or best_score < floor:
        return None, None
    return best_name, best_score


def step(
    system: NarrativeSystem, config: SimulationConfig | None = None
) -> tuple[NarrativeSystem, list[StepRecord]]:
    """Run one full step over all characters; returns the successor system
    and one record per character.  Effects apply immediately, so characters
    later in the order observe the world as mutated by earlier ones."""
    config = config or SimulationConfig()
    records: list[StepRecord] = []

    for index in range(len(system.characters)):
        character = system.characters[index]
        before = system.actual
        chosen, score = act(character, system, config)

        if chosen is None:
            records.append(StepRecord(character.name, None, False, before, before, None))
            continue

        action = system.actions[chosen]
        if not precondition_satisfied(action, system.actual):
            # Belief was wrong: the action fails and nothing changes.
            records.append(StepRecord(character.name, chosen, False, before, before, score))
            continue

        new_actual = apply_postcondition(action.postcondition, system.actual)
        new_characters = tuple(
            Character(
                name=c.name,
                perceived=apply_postcondition(action.postcondition, c.perceived),
                worldviews=c.worldviews,
                action_ids=c.action_ids,
            )
            for c in system.characters
        )
        system = system.replace_actual(new_actual).replace_characters(new_characters)
        records.append(StepRecord(character.name, chosen, True, before, new_actual, score))

    return system, records


def run(
    system: NarrativeSystem, config: SimulationConfig | None = None
) -> tuple[NarrativeSystem, Trace]:
    """Step until max_steps or quiescence; returns the final system and trace.

    Quiescence: a step in which no character chooses any action ends the
    run immediately.  Because zero-score (non-improving) actions are
    admitted by default and can cycle forever, the run also stops after two
    consecutive steps with no strictly tension-reducing successful action.
    """
    config = config or SimulationConfig()
    steps: list[StepRecord] = []
    non_improving_streak = 0

    for _ in range(config.max_steps):
        system, records = step(system, config)
        steps.extend(records)

        if all(r.chosen_action is None for r in records):
            break
        improving = any(r.succeeded and r.score is not None and r.score > 0 for r in records)
        non_improving_streak = 0 if improving else non_improving_streak + 1
        if non_improving_streak >= 2:
            break

    return system, Trace(steps=tuple(steps), config=config)
