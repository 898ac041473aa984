"""Possible-worlds emergent-narrative engine: deterministic simulation,
tension-space analysis, and sketch-based authoring."""

from .model import (
    BOT,
    Action,
    Character,
    ContractViolation,
    NarrativeSystem,
    RangeSpec,
    Violation,
    World,
    apply_postcondition,
    precondition_satisfied,
    validate_system,
    value_dist,
    world_distance,
)
from .metrics import (
    TensionReport,
    goal_tension,
    interpersonal_tension,
    personal_tension,
    predict,
    subjective_goal_tension,
)
from .simulate import SimulationConfig, StepRecord, Trace, act, run, step
from .analysis import (
    EnumerationTooLarge,
    Movement,
    Position,
    ShapeClass,
    TensionSpace,
    action_movement,
    classify_movement,
    classify_shape,
    compute_space_bruteforce,
    compute_space_convolution,
    opposite_movement,
    position_of,
    trace_overlay,
)
from .sketch import (
    FitFailure,
    FitResult,
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

__version__ = "0.1.0"
