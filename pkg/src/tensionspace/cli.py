"""Command-line entry point: validation, simulation, tension-space export,
movement listing, shape classification, sketch fitting and reporting.

Exit codes are stable: 0 success, 1 validation failure, 2 usage error,
3 runtime error.  All outputs are written atomically and every command is
deterministic for fixed inputs and flags.
"""

from __future__ import annotations

import os
import json
import sys
import tempfile
from pathlib import Path

import click

from . import analysis, io_formats, plots, sketch as sketch_mod
from .model import BOT, Character, NarrativeSystem, world_distance
from .simulate import SimulationConfig, run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_model(path: str) -> NarrativeSystem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_USAGE, f"cannot read {path}: {exc}")
    try:
        return io_formats.load_model(text)
    except io_formats.ModelValidationError as exc:
        for violation in exc.violations:
            click.echo(f"violation: {violation.rule} [{violation.entity}] {violation.message}", err=True)
        sys.exit(EXIT_VALIDATION)
    except io_formats.ParseError as exc:
        _fail(EXIT_VALIDATION, f"cannot parse {path}: {exc}")


def _load_sketch(path: str) -> sketch_mod.Sketch:
    try:
        return io_formats.load_sketch(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(EXIT_USAGE, f"cannot read {path}: {exc}")
    except io_formats.ParseError as exc:
        _fail(EXIT_VALIDATION, f"cannot parse {path}: {exc}")


def _axis(system: NarrativeSystem, spec: str) -> tuple[str, str]:
    if spec.count(":") != 1:
        _fail(EXIT_USAGE, f"axis {spec!r} must be written character:theme")
    char_name, theme = spec.split(":")
    try:
        character = system.character(char_name)
    except KeyError:
        _fail(EXIT_USAGE, f"unknown character {char_name!r}")
    if theme not in character.worldviews:
        _fail(EXIT_USAGE, f"character {char_name!r} has no theme {theme!r}")
    return char_name, theme


def _worldview(system: NarrativeSystem, axis: tuple[str, str]):
    return system.character(axis[0]).worldviews[axis[1]]


def _space(system, x_axis, y_axis, method: str) -> analysis.TensionSpace:
    compute = (
        analysis.compute_space_convolution if method == "conv" else analysis.compute_space_bruteforce
    )
    try:
        return compute(
            _worldview(system, x_axis), _worldview(system, y_axis), system.value_range,
            axes=(x_axis, y_axis),
        )
    except analysis.EnumerationTooLarge as exc:
        _fail(EXIT_RUNTIME, str(exc))


@click.group()
def main() -> None:
    """Possible-worlds narrative engine: analysis, simulation, fitting."""


@main.command("validate")
@click.argument("model_path")
def cmd_validate(model_path: str) -> None:
    """Validate a model file; exit 1 on violations."""
    system = _load_model(model_path)  # exits on violations
    # Lint: surface retry-loop and zero-score-cycle risks.
    for character in system.characters:
        if world_distance(character.perceived, system.actual) > 0:
            click.echo(
                f"warning: {character.name!r} starts with a false belief; a failed "
                "action does not correct it, so the character may retry forever",
                err=True,
            )
        for action_id in character.action_ids:
            action = system.actions[action_id]
            if all(v is BOT for v in action.postcondition):
                click.echo(
                    f"warning: action {action_id!r} has no effect; its score is always "
                    "zero and it can cycle under the default non-strict selection",
                    err=True,
                )
    click.echo("ok")


@main.command("simulate")
@click.argument("model_path")
@click.option("--steps", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--strict", is_flag=True, help="Require strictly tension-reducing actions.")
@click.option("--out", "out_path", default=None, help="Trace output path (default stdout).")
def cmd_simulate(model_path: str, steps: int, seed: int, strict: bool, out_path: str | None) -> None:
    """Run the simulation and write the trace."""
    system = _load_model(model_path)
    config = SimulationConfig(max_steps=steps, strict_improvement=strict, seed=seed)
    _, trace = run(system, config)
    text = io_formats.save_trace(trace)
    if out_path:
        _atomic_write(Path(out_path), text.encode())
    else:
        click.echo(text, nl=False)


@main.command("tension")
@click.argument("model_path")
@click.option("--x", "x_spec", required=True, help="x axis as character:theme")
@click.option("--y", "y_spec", required=True, help="y axis as character:theme")
@click.option("--method", type=click.Choice(["conv", "brute"]), default="conv", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pgm"]), default="json", show_default=True)
@click.option("--out", "out_path", default=None)
def cmd_tension(model_path, x_spec, y_spec, method, fmt, out_path) -> None:
    """Compute a tension-space histogram and export it."""
    system = _load_model(model_path)
    space = _space(system, _axis(system, x_spec), _axis(system, y_spec), method)
    data = io_formats.export_tension_space(space, fmt)
    if out_path:
        _atomic_write(Path(out_path), data)
    else:
        click.echo(data.decode(), nl=False)


@main.command("movements")
@click.argument("model_path")
@click.option("--x", "x_spec", required=True)
@click.option("--y", "y_spec", required=True)
@click.option("--world", "world_spec", default="start", show_default=True,
              help="start | current | comma-separated grades")
def cmd_movements(model_path, x_spec, y_spec, world_spec) -> None:
    """List each applicable action's movement at a world state."""
    system = _load_model(model_path)
    x_axis, y_axis = _axis(system, x_spec), _axis(system, y_spec)
    if world_spec in ("start", "current"):
        state = system.actual
    else:
        try:
            state = tuple(int(v) for v in world_spec.split(","))
        except ValueError:
            _fail(EXIT_USAGE, f"--world must be start, current, or a grade list, got {world_spec!r}")
        if len(state) != len(system.propositions):
            _fail(EXIT_USAGE, f"--world needs {len(system.propositions)} grades")

    w_x, w_y = _worldview(system, x_axis), _worldview(system, y_axis)
    entries = []
    for name in system.actions:
        movement = analysis.action_movement(system.actions[name], state, w_x, w_y)
        if movement is not None:
            entries.append({
                "action": name,
                "from": list(movement.start),
                "to": list(movement.end),
                "class": movement.movement_class,
            })
    click.echo(json.dumps(entries, indent=2))


@main.command("shape")
@click.argument("model_path")
@click.option("--x", "x_spec", required=True)
@click.option("--y", "y_spec", required=True)
@click.option("--threshold", type=float, default=0.4, show_default=True)
def cmd_shape(model_path, x_spec, y_spec, threshold) -> None:
    """Classify a tension space as Strong, Weak or Neutral."""
    system = _load_model(model_path)
    space = _space(system, _axis(system, x_spec), _axis(system, y_spec), "conv")
    shape = analysis.classify_shape(space, threshold=threshold)
    click.echo(json.dumps({"label": shape.label, "correlation": shape.correlation}))


def _install_worldviews(system, x_axis, y_axis, fitted_x, fitted_y) -> NarrativeSystem:
    characters = []
    for character in system.characters:
        worldviews = dict(character.worldviews)
        if character.name == x_axis[0]:
            worldviews[x_axis[1]] = fitted_x
        if character.name == y_axis[0]:
            worldviews[y_axis[1]] = fitted_y
        characters.append(Character(character.name, character.perceived, worldviews, character.action_ids))
    return system.replace_characters(tuple(characters))


@main.command("fit-worldviews")
@click.argument("model_path")
@click.argument("sketch_path")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", required=True)
def cmd_fit_worldviews(model_path, sketch_path, seed, out_path) -> None:
    """Fit a worldview sketch and write the updated model."""
    system = _load_model(model_path)
    sketch = _load_sketch(sketch_path)
    if sketch.axes is None:
        _fail(EXIT_VALIDATION, "sketch has no axes")
    x_axis = _axis(system, ":".join(sketch.axes[0]))
    y_axis = _axis(system, ":".join(sketch.axes[1]))
    try:
        result = sketch_mod.fit_worldviews(
            sketch, _worldview(system, x_axis), _worldview(system, y_axis),
            seed=seed, value_range=system.value_range,
        )
    except sketch_mod.EmptyDecomposition as exc:
        _fail(EXIT_RUNTIME, str(exc))
    for failure in result.failures:
        click.echo(
            f"failure: edge {failure.edge_index} movement {failure.movement_index}: {failure.reason}",
            err=True,
        )
    updated = _install_worldviews(system, x_axis, y_axis, result.fitted_x, result.fitted_y)
    _atomic_write(Path(out_path), io_formats.save_model(updated).encode())


@main.command("fit-actions")
@click.argument("model_path")
@click.argument("sketch_path")
@click.option("--out", "out_path", required=True)
def cmd_fit_actions(model_path, sketch_path, out_path) -> None:
    """Fit an action sketch, set the start world, write the updated model.

    The start world is the lexicographically smallest state at the first
    edge's start node; the actual and all perceived worlds are reset to it
    and the fitted actions are attached to the x-axis character.
    """
    system = _load_model(model_path)
    sketch = _load_sketch(sketch_path)
    if sketch.axes is None:
        _fail(EXIT_VALIDATION, "sketch has no axes")
    x_axis = _axis(system, ":".join(sketch.axes[0]))
    y_axis = _axis(system, ":".join(sketch.axes[1]))
    w_x, w_y = _worldview(system, x_axis), _worldview(system, y_axis)
    if not sketch.edges:
        _fail(EXIT_VALIDATION, "action sketch has no edges")

    start = sketch_mod.find_start_world(w_x, w_y, sketch.edges[0].start, system.value_range)
    if start is None:
        _fail(EXIT_RUNTIME, f"no world state exists at {tuple(sketch.edges[0].start)}")

    existing = set(system.actions)
    index = 1
    while any(f"sketch-action-{index + i}" in existing for i in range(len(sketch.edges))):
        index += 1
    result = sketch_mod.fit_actions(
        sketch, w_x, w_y, start, value_range=system.value_range,
        name_prefix="sketch-action-",
    )
    for failure in result.failures:
        click.echo(f"failure: edge {failure.edge_index}: {failure.reason}", err=True)

    actions = dict(system.actions)
    renamed = []
    for action in result.fitted_actions:
        name = action.name
        while name in actions:
            index += 1
            name = f"sketch-action-{index}"
        renamed.append(name)
        actions[name] = type(action)(name, action.precondition, action.postcondition)

    characters = tuple(
        Character(
            c.name,
            start,
            c.worldviews,
            c.action_ids + tuple(renamed) if c.name == x_axis[0] else c.action_ids,
        )
        for c in system.characters
    )
    updated = NarrativeSystem(
        propositions=system.propositions,
        themes=system.themes,
        value_range=system.value_range,
        actual=start,
        characters=characters,
        actions=actions,
    )
    _atomic_write(Path(out_path), io_formats.save_model(updated).encode())


@main.command("report")
@click.argument("model_path")
@click.option("--x", "x_spec", required=True)
@click.option("--y", "y_spec", required=True)
@click.option("--out-dir", "out_dir", required=True)
@click.option("--log-scale", is_flag=True)
def cmd_report(model_path, x_spec, y_spec, out_dir, log_scale) -> None:
    """Write a CSV histogram plus heatmap and movement-overlay figures."""
    system = _load_model(model_path)
    x_axis, y_axis = _axis(system, x_spec), _axis(system, y_spec)
    space = _space(system, x_axis, y_axis, "conv")
    w_x, w_y = _worldview(system, x_axis), _worldview(system, y_axis)

    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"{x_axis[0]}-{x_axis[1]}_x_{y_axis[0]}-{y_axis[1]}"
    _atomic_write(directory / f"{stem}.csv", io_formats.export_tension_space(space, "csv"))

    movements = [
        m for m in (
            analysis.action_movement(a, system.actual, w_x, w_y) for a in system.actions.values()
        ) if m is not None
    ]
    start = analysis.position_of(w_x, w_y, system.actual)
    plots.render_heatmap(space, directory / f"{stem}.png", title=stem.replace("_", " "),
                         log_scale=log_scale)
    plots.render_heatmap(space, directory / f"{stem}_movements.png", movements=movements,
                         start=(start.x, start.y), title=f"{stem} movements", log_scale=log_scale)
    click.echo(str(directory / f"{stem}.csv"))


@main.command("serve")
@click.option("--model", "model_path", default=None, help="Model to preload as a session.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cmd_serve(model_path, port, host) -> None:
    """Serve the authoring HTTP API."""
    import uvicorn

    from .server import create_app

    system = _load_model(model_path) if model_path else None
    uvicorn.run(create_app(initial_model=system), host=host, port=port, log_level="warning")


if __name__ == "__main__":  # pragma: no cover
    main()
