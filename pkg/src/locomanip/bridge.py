"""Websocket session server: one live simulation, many viewers.

The stepping task owns the world and advances it in 20 ms chunks, one
chunk per broadcast frame (50 Hz).  Network handlers never touch the
world directly: commands go through an ordered queue and are applied at
tick boundaries, so a slow or hostile client cannot stall the loop.
Outbound state is serialized once per frame and fanned out through
per-client latest-wins slots; a client that stops reading just sees
older frames replaced by newer ones.

Wire protocol (JSON text, `v` = 1):
  client -> server
    {"v":1,"type":"wrench","f":[x,y,z],"tau":[x,y,z]}   zero-order held
    {"v":1,"type":"button","id":"A"|"M"|"G"|"P"}
    {"v":1,"type":"reset"}                               rebuild scenario
    {"v":1,"type":"load","name":<scenario>}
    {"v":1,"type":"pause"} / {"v":1,"type":"resume"}
  server -> client
    {"v":1,"type":"state",t,q,ee:{p,quat},f_human,f_ext,
     mode:{a,m,g,p},robot,safety_stop}
    {"v":1,"type":"ack","tick":<first tick the command affects>}
    {"v":1,"type":"error","msg":...}

Mode flags mirror the log columns: a = admittance active, m = translation
mode, g = gripper closed, p = locomotion priority.

Wrenches are clamped to 200 N / 20 N m and zeroed by a watchdog when no
wrench message has arrived for 1 s.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import time

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import ScenarioConfig, load_config, parse_config_text
from .errors import LocomanipError
from .interface import LOCOMOTION, TRANSLATION
from .model import fk_ee
from .sim import TICK, World, make_world, press_button, step_free, step_kairos, step_moca

PROTOCOL_VERSION = 1
BROADCAST_HZ = 50
TICKS_PER_FRAME = int(round(1.0 / (BROADCAST_HZ * TICK)))  # 20 ticks = 20 ms
FORCE_CLAMP = 200.0
TORQUE_CLAMP = 20.0
WRENCH_WATCHDOG_S = 1.0

_STEPPERS = {"impedance": step_moca, "clik": step_kairos, "none": step_free}

_DEFAULT_SCENARIO = """
[robot]
name = kairos-like

[run]
name = live
duration = 1.0
"""


def default_config() -> ScenarioConfig:
    return parse_config_text(_DEFAULT_SCENARIO, name="live")


class Session:
    """Owner of one simulated robot and its connected clients."""

    def __init__(self, cfg: ScenarioConfig | None = None):
        self.cfg = cfg if cfg is not None else default_config()
        self.world: World = make_world(self.cfg)
        self.paused = False
        self.commands: asyncio.Queue = asyncio.Queue()
        self.clients: dict[int, asyncio.Queue] = {}
        self._next_client = 0
        self._last_wrench_wall: float | None = None
        self.frames_sent = 0

    # -- client registry ---------------------------------------------------

    def attach(self) -> tuple[int, asyncio.Queue]:
        cid = self._next_client
        self._next_client += 1
        slot: asyncio.Queue = asyncio.Queue(maxsize=1)
        self.clients[cid] = slot
        return cid, slot

    def detach(self, cid: int) -> None:
        self.clients.pop(cid, None)

    # -- command application (stepping task only) ---------------------------

    def _apply(self, cmd: dict) -> None:
        kind = cmd["type"]
        if kind == "wrench":
            wrench = np.concatenate([cmd["f"], cmd["tau"]]).astype(float)
            f_norm = np.linalg.norm(wrench[:3])
            if f_norm > FORCE_CLAMP:
                wrench[:3] *= FORCE_CLAMP / f_norm
            tau_norm = np.linalg.norm(wrench[3:])
            if tau_norm > TORQUE_CLAMP:
                wrench[3:] *= TORQUE_CLAMP / tau_norm
            self.world.external_wrench = wrench
            self._last_wrench_wall = time.monotonic()
        elif kind == "button":
            press_button(self.world, cmd["id"])
        elif kind == "reset":
            self.world = make_world(self.cfg)
            self._last_wrench_wall = None
        elif kind == "load":
            cfg = load_config(cmd["name"])
            self.cfg = cfg
            self.world = make_world(cfg)
            self._last_wrench_wall = None
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False

    def drain_commands(self) -> None:
        while True:
            try:
                cmd, future = self.commands.get_nowait()
            except asyncio.QueueEmpty:
                return
            try:
                self._apply(cmd)
            except LocomanipError as err:
                if not future.done():
                    future.set_exception(err)
                continue
            # effect tick: the pending tick, whose controller pass sees it
            if not future.done():
                future.set_result(self.world.tick)

    async def submit(self, cmd: dict) -> int:
        """Queue a command; resolves to the tick at which it takes effect."""
        future = asyncio.get_running_loop().create_future()
        await self.commands.put((cmd, future))
        return await future

    # -- stepping ------------------------------------------------------------

    def _watchdog(self) -> None:
        if (
            self._last_wrench_wall is not None
            and time.monotonic() - self._last_wrench_wall > WRENCH_WATCHDOG_S
        ):
            self.world.external_wrench = np.zeros(6)
            self._last_wrench_wall = None

    async def advance_frame(self) -> None:
        for _ in range(TICKS_PER_FRAME):
            self.drain_commands()
            self._watchdog()
            if self.paused:
                break
            # look up the stepper every tick: a mid-frame `load` can swap
            # the world for one of a different controller kind
            _STEPPERS[self.world.kind](self.world)
            # yield so receivers can enqueue mid-frame; commands then land
            # on the very next tick instead of the next frame
            await asyncio.sleep(0)

    def snapshot(self) -> str:
        world = self.world
        iface = world.iface
        pose = fk_ee(world.cfg.model, world.q)
        msg = {
            "v": PROTOCOL_VERSION,
            "type": "state",
            "t": world.t,
            "q": [float(v) for v in world.q],
            "ee": {
                "p": [float(v) for v in pose.position],
                "quat": [float(v) for v in pose.orientation],
            },
            "f_human": [float(v) for v in world.human_wrench],
            "f_ext": [float(v) for v in world.last_f_ext],
            "mode": {
                "a": iface.admittance_active,
                "m": iface.motion_mode == TRANSLATION,
                "g": iface.gripper_closed,
                "p": iface.priority == LOCOMOTION,
            },
            "robot": world.cfg.robot_name,
            "safety_stop": world.safety_stop,
        }
        return json.dumps(msg)

    def publish(self, payload: str) -> None:
        self.frames_sent += 1
        for slot in self.clients.values():
            if slot.full():
                with contextlib.suppress(asyncio.QueueEmpty):
                    slot.get_nowait()
            slot.put_nowait(payload)


async def session_loop(session: Session) -> None:
    """Fixed 50 Hz frame loop with absolute deadlines."""
    frame = 1.0 / BROADCAST_HZ
    deadline = time.monotonic() + frame
    while True:
        session.drain_commands()
        if not session.paused:
            await session.advance_frame()
        session.publish(session.snapshot())
        delay = deadline - time.monotonic()
        if delay > 0:
            await asyncio.sleep(delay)
        else:
            # fell behind (heavy sim or busy host): restart the cadence
            # instead of bursting to repay the debt
            deadline = time.monotonic()
            await asyncio.sleep(0)
        deadline += frame


def _error_msg(text: str) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": "error", "msg": text})


def _ack_msg(tick: int) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": "ack", "tick": tick})


_BUTTONS = ("A", "M", "G", "P")


def parse_client_message(raw: str) -> dict:
    """Validate one inbound message; raises ValueError with a client-safe
    description on any malformed input."""
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ValueError(f"not valid JSON: {err.msg}") from err
    if not isinstance(msg, dict):
        raise ValueError("message must be an object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ValueError(f"unsupported protocol version {msg.get('v')!r}")
    kind = msg.get("type")
    if kind == "wrench":
        out = {"type": "wrench"}
        for key in ("f", "tau"):
            vec = msg.get(key)
            if (
                not isinstance(vec, list)
                or len(vec) != 3
                or not all(isinstance(x, (int, float)) for x in vec)
            ):
                raise ValueError(f"'{key}' must be a list of 3 numbers")
            if not all(np.isfinite(x) for x in vec):
                raise ValueError(f"'{key}' must be finite")
            out[key] = [float(x) for x in vec]
        return out
    if kind == "button":
        if msg.get("id") not in _BUTTONS:
            raise ValueError(f"button id must be one of {', '.join(_BUTTONS)}")
        return {"type": "button", "id": msg["id"]}
    if kind == "load":
        name = msg.get("name")
        if not isinstance(name, str) or not name:
            raise ValueError("'name' must be a non-empty string")
        return {"type": "load", "name": name}
    if kind in ("reset", "pause", "resume"):
        return {"type": kind}
    raise ValueError(f"unknown message type {kind!r}")


async def _client_sender(ws: WebSocket, slot: asyncio.Queue) -> None:
    while True:
        await ws.send_text(await slot.get())


async def _client_receiver(ws: WebSocket, session: Session) -> None:
    while True:
        raw = await ws.receive_text()
        try:
            cmd = parse_client_message(raw)
        except ValueError as err:
            await ws.send_text(_error_msg(str(err)))
            continue
        try:
            tick = await session.submit(cmd)
        except (LocomanipError, OSError) as err:
            await ws.send_text(_error_msg(str(err)))
            continue
        await ws.send_text(_ack_msg(tick))


def create_app(scenario: str | None = None) -> FastAPI:
    """App factory; `scenario` is a config path or builtin name."""
    cfg = load_config(scenario) if scenario else None
    session = Session(cfg)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(session_loop(session))
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="locomanip bridge", lifespan=lifespan)
    app.state.session = session

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        cid, slot = session.attach()
        sender = asyncio.create_task(_client_sender(ws, slot))
        try:
            await _client_receiver(ws, session)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            session.detach(cid)

    @app.get("/healthz")
    async def healthz():
        return {
            "scenario": session.cfg.name,
            "robot": session.cfg.robot_name,
            "paused": session.paused,
            "t": session.world.t,
            "clients": len(session.clients),
            "queue_depth": session.commands.qsize(),
        }

    return app


def serve(host: str = "127.0.0.1", port: int = 8765, scenario: str | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(scenario), host=host, port=port, log_level="warning")
