"""HTTP facade for the authoring UI: in-memory model sessions with
analysis queries, sketch fitting and step-wise simulation.

Mutations of a session are serialized; a mutation arriving while another
is in flight is rejected with 409.  Analysis reads work against immutable
snapshots and may run concurrently.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import analysis, io_formats, sketch as sketch_mod
from .model import Character, NarrativeSystem
from .simulate import SimulationConfig, Trace, step

__all__ = ["create_app"]


@dataclass
class Session:
    id: str
    initial: NarrativeSystem
    system: NarrativeSystem
    seed: int = 0
    steps: tuple = ()
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, system: NarrativeSystem, seed: int = 0) -> Session:
        with self._lock:
            self._counter += 1
            session = Session(id=f"sess-{self._counter}", initial=system, system=system, seed=seed)
            self._sessions[session.id] = session
            return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session


def _parse_model(doc: Any) -> NarrativeSystem:
    try:
        return io_formats.model_from_document(doc)
    except io_formats.ModelValidationError as exc:
        raise HTTPException(
            status_code=400,
            detail={
                "message": "invalid model",
                "violations": [
                    {"rule": v.rule, "entity": v.entity, "message": v.message}
                    for v in exc.violations
                ],
            },
        )
    except io_formats.ParseError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _axis(system: NarrativeSystem, char_name: str, theme: str) -> tuple[str, str]:
    try:
        character = system.character(char_name)
    except KeyError:
        raise HTTPException(status_code=400, detail=f"unknown character {char_name!r}")
    if theme not in character.worldviews:
        raise HTTPException(status_code=400, detail=f"character {char_name!r} has no theme {theme!r}")
    return char_name, theme


def _worldview(system: NarrativeSystem, axis: tuple[str, str]):
    return system.character(axis[0]).worldviews[axis[1]]


def _mutation(session: Session):
    """Exclusive-writer guard; a busy session rejects with 409."""
    if not session.lock.acquire(blocking=False):
        raise HTTPException(status_code=409, detail="session is being mutated concurrently")
    return session.lock


def _fit_failures(result: sketch_mod.FitResult) -> list[dict]:
    return [
        {"edge": f.edge_index, "movement": f.movement_index, "reason": f.reason}
        for f in result.failures
    ]


def create_app(initial_model: NarrativeSystem | None = None) -> FastAPI:
    app = FastAPI(title="tensionspace authoring API")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()
    app.state.store = store
    if initial_model is not None:
        store.create(initial_model)

    @app.post("/api/session")
    async def create_session(request: Request):
        body = await request.json()
        system = _parse_model(body.get("model"))
        session = store.create(system, seed=int(body.get("seed", 0)))
        return {"session_id": session.id}

    @app.get("/api/session/{session_id}/model")
    def get_model(session_id: str):
        session = store.get(session_id)
        return io_formats.model_to_document(session.system)

    @app.put("/api/session/{session_id}/model")
    async def put_model(session_id: str, request: Request):
        session = store.get(session_id)
        body = await request.json()
        system = _parse_model(body)  # validation happens before any state change
        lock = _mutation(session)
        try:
            session.system = system
        finally:
            lock.release()
        return io_formats.model_to_document(session.system)

    @app.get("/api/session/{session_id}/tension-space")
    def tension_space(
        session_id: str,
        x_char: str = Query(...),
        x_theme: str = Query(...),
        y_char: str = Query(...),
        y_theme: str = Query(...),
        method: str = Query("conv"),
    ):
        session = store.get(session_id)
        system = session.system
        x_axis = _axis(system, x_char, x_theme)
        y_axis = _axis(system, y_char, y_theme)
        compute = (
            analysis.compute_space_bruteforce if method == "brute" else analysis.compute_space_convolution
        )
        try:
            space = compute(
                _worldview(system, x_axis), _worldview(system, y_axis), system.value_range,
                axes=(x_axis, y_axis),
            )
        except analysis.EnumerationTooLarge as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return io_formats.tension_space_to_document(space)

    @app.get("/api/session/{session_id}/movements")
    def movements(
        session_id: str,
        x_char: str = Query(...),
        x_theme: str = Query(...),
        y_char: str = Query(...),
        y_theme: str = Query(...),
        world: str = Query("current"),
    ):
        session = store.get(session_id)
        system = session.system
        w_x = _worldview(system, _axis(system, x_char, x_theme))
        w_y = _worldview(system, _axis(system, y_char, y_theme))
        state = session.initial.actual if world == "start" else system.actual
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
        return entries

    @app.get("/api/session/{session_id}/shape")
    def shape(
        session_id: str,
        x_char: str = Query(...),
        x_theme: str = Query(...),
        y_char: str = Query(...),
        y_theme: str = Query(...),
    ):
        session = store.get(session_id)
        system = session.system
        space = analysis.compute_space_convolution(
            _worldview(system, _axis(system, x_char, x_theme)),
            _worldview(system, _axis(system, y_char, y_theme)),
            system.value_range,
        )
        result = analysis.classify_shape(space)
        return {"label": result.label, "correlation": result.correlation}

    @app.post("/api/session/{session_id}/step")
    def do_step(session_id: str):
        session = store.get(session_id)
        lock = _mutation(session)
        try:
            session.system, records = step(session.system, SimulationConfig(seed=session.seed))
            session.steps = session.steps + tuple(records)
        finally:
            lock.release()
        return io_formats.trace_to_document(
            Trace(steps=tuple(records), config=SimulationConfig(seed=session.seed))
        )["steps"]

    @app.post("/api/session/{session_id}/reset")
    def reset(session_id: str):
        session = store.get(session_id)
        lock = _mutation(session)
        try:
            session.system = session.initial
            session.steps = ()
        finally:
            lock.release()
        return io_formats.model_to_document(session.system)

    @app.get("/api/session/{session_id}/trace")
    def get_trace(session_id: str):
        session = store.get(session_id)
        return io_formats.trace_to_document(
            Trace(steps=session.steps, config=SimulationConfig(seed=session.seed))
        )

    @app.post("/api/session/{session_id}/fit/worldviews")
    async def fit_worldviews_endpoint(session_id: str, request: Request):
        session = store.get(session_id)
        body = await request.json()
        try:
            sketch = io_formats.sketch_from_document(body.get("sketch"))
        except io_formats.ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if sketch.axes is None:
            raise HTTPException(status_code=400, detail="sketch has no axes")
        seed = int(body.get("seed", session.seed))

        lock = _mutation(session)
        try:
            system = session.system
            x_axis = _axis(system, *sketch.axes[0])
            y_axis = _axis(system, *sketch.axes[1])
            try:
                result = sketch_mod.fit_worldviews(
                    sketch, _worldview(system, x_axis), _worldview(system, y_axis),
                    seed=seed, value_range=system.value_range,
                )
            except (sketch_mod.EmptyDecomposition, sketch_mod.ContractViolation) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            characters = []
            for character in system.characters:
                worldviews = dict(character.worldviews)
                if character.name == x_axis[0]:
                    worldviews[x_axis[1]] = result.fitted_x
                if character.name == y_axis[0]:
                    worldviews[y_axis[1]] = result.fitted_y
                characters.append(
                    Character(character.name, character.perceived, worldviews, character.action_ids)
                )
            session.system = system.replace_characters(tuple(characters))
            return {
                "failures": _fit_failures(result),
                "fitted_x": list(result.fitted_x),
                "fitted_y": list(result.fitted_y),
                "model": io_formats.model_to_document(session.system),
            }
        finally:
            lock.release()

    @app.post("/api/session/{session_id}/fit/actions")
    async def fit_actions_endpoint(session_id: str, request: Request):
        session = store.get(session_id)
        body = await request.json()
        try:
            sketch = io_formats.sketch_from_document(body.get("sketch"))
        except io_formats.ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if sketch.axes is None or not sketch.edges:
            raise HTTPException(status_code=400, detail="action sketch needs axes and edges")

        lock = _mutation(session)
        try:
            system = session.system
            x_axis = _axis(system, *sketch.axes[0])
            y_axis = _axis(system, *sketch.axes[1])
            w_x, w_y = _worldview(system, x_axis), _worldview(system, y_axis)
            start = sketch_mod.find_start_world(w_x, w_y, sketch.edges[0].start, system.value_range)
            if start is None:
                raise HTTPException(
                    status_code=400,
                    detail=f"no world state exists at {tuple(sketch.edges[0].start)}",
                )
            result = sketch_mod.fit_actions(
                sketch, w_x, w_y, start, value_range=system.value_range,
            )
            actions = dict(system.actions)
            index = 0
            names = []
            for action in result.fitted_actions:
                index += 1
                name = action.name
                while name in actions:
                    name = f"sketch-action-{len(actions) + index}"
                names.append(name)
                actions[name] = type(action)(name, action.precondition, action.postcondition)
            characters = tuple(
                Character(
                    c.name, start, c.worldviews,
                    c.action_ids + tuple(names) if c.name == x_axis[0] else c.action_ids,
                )
                for c in system.characters
            )
            session.system = NarrativeSystem(
                propositions=system.propositions,
                themes=system.themes,
                value_range=system.value_range,
                actual=start,
                characters=characters,
                actions=actions,
            )
            session.initial = session.system  # new authored baseline
            session.steps = ()
            return {
                "failures": _fit_failures(result),
                "actions": names,
                "start_world": list(start),
                "model": io_formats.model_to_document(session.system),
            }
        finally:
            lock.release()

    @app.exception_handler(Exception)
    async def runtime_error_handler(_request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    return app
