"""Stable JSON interchange formats for models, sketches, traces and
tension spaces, plus CSV/PGM exports for histograms.

Don't-care truth values are encoded as JSON ``null``.  Every document
carries a version field; unknown versions are rejected.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .analysis import TensionSpace
from .model import (
    Action,
    Character,
    NarrativeSystem,
    RangeSpec,
    Violation,
    World,
    validate_system,
)
from .simulate import SimulationConfig, StepRecord, Trace
from .sketch import GridNode, Sketch, SketchEdge, SketchMode

__all__ = [
    "SCHEMA_VERSION",
    "ParseError",
    "ModelValidationError",
    "load_model",
    "save_model",
    "model_to_document",
    "model_from_document",
    "load_sketch",
    "save_sketch",
    "sketch_to_document",
    "sketch_from_document",
    "load_trace",
    "save_trace",
    "trace_to_document",
    "trace_from_document",
    "tension_space_to_document",
    "tension_space_from_document",
    "export_tension_space",
]

SCHEMA_VERSION = 1


class ParseError(ValueError):
    """Malformed or schema-violating document text."""


class ModelValidationError(ValueError):
    """A parsed model breaks system invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(f"{v.rule} ({v.entity}): {v.message}" for v in violations)
        super().__init__(f"invalid model: {lines}")


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _check_version(doc: Any, what: str) -> None:
    if not isinstance(doc, dict):
        raise ParseError(f"{what} document must be a JSON object")
    if doc.get("version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported {what} document version {doc.get('version')!r}")


def _world_from_json(values: Any, what: str) -> World:
    if not isinstance(values, list) or not all(v is None or isinstance(v, int) for v in values):
        raise ParseError(f"{what} must be a list of integers or nulls")
    return tuple(values)


def _world_to_json(world: World) -> list[int | None]:
    return list(world)


# --- models ---------------------------------------------------------------

def model_to_document(system: NarrativeSystem) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "range": {"min": system.value_range.min, "max": system.value_range.max},
        "propositions": list(system.propositions),
        "themes": list(system.themes),
        "actual_world": _world_to_json(system.actual),
        "characters": [
            {
                "name": c.name,
                "perceived": _world_to_json(c.perceived),
                "worldviews": {t: _world_to_json(w) for t, w in c.worldviews.items()},
                "actions": list(c.action_ids),
            }
            for c in system.characters
        ],
        "actions": [
            {"name": a.name, "pre": _world_to_json(a.precondition), "post": _world_to_json(a.postcondition)}
            for a in system.actions.values()
        ],
    }


def model_from_document(doc: Any) -> NarrativeSystem:
    _check_version(doc, "model")
    try:
        value_range = RangeSpec(int(doc["range"]["min"]), int(doc["range"]["max"]))
        propositions = tuple(str(p) for p in doc["propositions"])
        themes = tuple(str(t) for t in doc["themes"])
        actual = _world_from_json(doc["actual_world"], "actual_world")
        characters = tuple(
            Character(
                name=str(c["name"]),
                perceived=_world_from_json(c["perceived"], f"perceived of {c.get('name')!r}"),
                worldviews={
                    str(t): _world_from_json(w, f"worldview {t!r}") for t, w in c["worldviews"].items()
                },
                action_ids=tuple(str(a) for a in c.get("actions", [])),
            )
            for c in doc["characters"]
        )
        actions = {
            str(a["name"]): Action(
                name=str(a["name"]),
                precondition=_world_from_json(a["pre"], f"pre of {a.get('name')!r}"),
                postcondition=_world_from_json(a["post"], f"post of {a.get('name')!r}"),
            )
            for a in doc.get("actions", [])
        }
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed model document: {exc!r}") from exc

    system = NarrativeSystem(
        propositions=propositions,
        themes=themes,
        value_range=value_range,
        actual=actual,
        characters=characters,
        actions=actions,
    )
    violations = validate_system(system)
    if violations:
        raise ModelValidationError(violations)
    return system


def load_model(text: str) -> NarrativeSystem:
    return model_from_document(_parse_json(text))


def save_model(system: NarrativeSystem) -> str:
    return json.dumps(model_to_document(system), indent=2) + "\n"


# --- sketches -------------------------------------------------------------

def sketch_to_document(sketch: Sketch) -> dict:
    doc: dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "mode": sketch.mode.value,
        "axes": None,
        "edges": [],
    }
    if sketch.axes is not None:
        (xc, xt), (yc, yt) = sketch.axes
        doc["axes"] = {"x": {"character": xc, "theme": xt}, "y": {"character": yc, "theme": yt}}
    for edge in sketch.edges:
        entry: dict[str, Any] = {"from": [edge.start.x, edge.start.y], "to": [edge.end.x, edge.end.y]}
        if edge.color is not None:
            entry["color"] = edge.color
        doc["edges"].append(entry)
    return doc


def sketch_from_document(doc: Any) -> Sketch:
    _check_version(doc, "sketch")
    try:
        mode = SketchMode(doc["mode"])
        axes = None
        if doc.get("axes"):
            axes = (
                (str(doc["axes"]["x"]["character"]), str(doc["axes"]["x"]["theme"])),
                (str(doc["axes"]["y"]["character"]), str(doc["axes"]["y"]["theme"])),
            )
        edges = tuple(
            SketchEdge(
                start=GridNode(int(e["from"][0]), int(e["from"][1])),
                end=GridNode(int(e["to"][0]), int(e["to"][1])),
                color=e.get("color"),
            )
            for e in doc["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed sketch document: {exc!r}") from exc
    return Sketch(edges=edges, mode=mode, axes=axes)


def load_sketch(text: str) -> Sketch:
    return sketch_from_document(_parse_json(text))


def save_sketch(sketch: Sketch) -> str:
    return json.dumps(sketch_to_document(sketch), indent=2) + "\n"


# --- traces ---------------------------------------------------------------

def trace_to_document(trace: Trace) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "config": {
            "max_steps": trace.config.max_steps,
            "strict_improvement": trace.config.strict_improvement,
            "seed": trace.config.seed,
        },
        "steps": [
            {
                "character": s.character,
                "action": s.chosen_action,
                "succeeded": s.succeeded,
                "before": _world_to_json(s.actual_before),
                "after": _world_to_json(s.actual_after),
                "score": s.score,
            }
            for s in trace.steps
        ],
    }


def trace_from_document(doc: Any) -> Trace:
    _check_version(doc, "trace")
    try:
        config = SimulationConfig(
            max_steps=int(doc["config"]["max_steps"]),
            strict_improvement=bool(doc["config"]["strict_improvement"]),
            seed=int(doc["config"].get("seed", 0)),
        )
        steps = tuple(
            StepRecord(
                character=str(s["character"]),
                chosen_action=s["action"],
                succeeded=bool(s["succeeded"]),
                actual_before=_world_from_json(s["before"], "before"),
                actual_after=_world_from_json(s["after"], "after"),
                score=s["score"],
            )
            for s in doc["steps"]
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed trace document: {exc!r}") from exc
    return Trace(steps=steps, config=config)


def load_trace(text: str) -> Trace:
    return trace_from_document(_parse_json(text))


def save_trace(trace: Trace) -> str:
    return json.dumps(trace_to_document(trace), indent=2) + "\n"


# --- tension spaces -------------------------------------------------------

def tension_space_to_document(space: TensionSpace) -> dict:
    axes = None
    if space.axes is not None:
        (xc, xt), (yc, yt) = space.axes
        axes = {"x": {"character": xc, "theme": xt}, "y": {"character": yc, "theme": yt}}
    return {
        "version": SCHEMA_VERSION,
        "axes": axes,
        "x_max": space.x_max,
        "y_max": space.y_max,
        "counts": space.counts.tolist(),
    }


def tension_space_from_document(doc: Any) -> TensionSpace:
    _check_version(doc, "tension-space")
    try:
        counts = np.asarray(doc["counts"], dtype=np.int64)
        if counts.ndim != 2 or counts.shape != (doc["x_max"] + 1, doc["y_max"] + 1):
            raise ParseError("counts shape does not match x_max/y_max")
        axes = None
        if doc.get("axes"):
            axes = (
                (str(doc["axes"]["x"]["character"]), str(doc["axes"]["x"]["theme"])),
                (str(doc["axes"]["y"]["character"]), str(doc["axes"]["y"]["theme"])),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed tension-space document: {exc!r}") from exc
    return TensionSpace(counts=counts, axes=axes)


def export_tension_space(space: TensionSpace, format: str = "json") -> bytes:
    """Serialize a tension space as json, csv (nonzero cells) or pgm.

    The PGM is 8-bit grayscale, the max count normalized to white, with x
    increasing rightward and y increasing upward (last text row is y = 0).
    """
    if format == "json":
        return (json.dumps(tension_space_to_document(space), indent=2) + "\n").encode()
    if format == "csv":
        lines = ["x,y,count"]
        for x in range(space.x_max + 1):
            for y in range(space.y_max + 1):
                count = int(space.counts[x, y])
                if count:
                    lines.append(f"{x},{y},{count}")
        return ("\n".join(lines) + "\n").encode()
    if format == "pgm":
        peak = int(space.counts.max())
        width, height = space.x_max + 1, space.y_max + 1
        rows = []
        for y in range(space.y_max, -1, -1):
            rows.append(" ".join(
                str(round(int(space.counts[x, y]) * 255 / peak)) if peak else "0"
                for x in range(width)
            ))
        return (f"P2\n{width} {height}\n255\n" + "\n".join(rows) + "\n").encode()
    raise ValueError(f"unknown tension-space export format {format!r}")
