"""Scenario configuration: declarative INI files, override paths, presets.

A scenario file describes one deterministic run: which robot, which
controller family, the environment (walls, payload), the scripted human
input (wrench profile segments and button events), and all gain overrides.
Every value has a default, so the minimal file is just `[robot]` +
`name = ...`. `--set section.key=value` overrides operate on the same
string representation the files use, which keeps the canonical dump
round-trippable: dump -> parse -> identical run.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import BaseVirtualParams
from .errors import ConfigError
from .impedance import ImpedanceParams
from .clik import ClikParams
from .interface import BUTTONS, LOCOMOTION, MANIPULATION, AdmittanceParams
from .model import RobotModel, builtin_model, builtin_model_names, load_robot_model

CONTROLLERS = ("impedance", "clik", "none", "auto")

# interface/log tick; physics substeps must divide it
TICK = 1e-3


def _fail(path: str, msg: str):
    raise ConfigError(path, msg)


def _floats(raw: str, n: int, path: str) -> np.ndarray:
    parts = raw.split()
    if len(parts) != n:
        _fail(path, f"expected {n} numbers, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        _fail(path, f"not a number list: {raw!r}")


def _float(raw: str, path: str) -> float:
    try:
        return float(raw)
    except ValueError:
        _fail(path, f"not a number: {raw!r}")


def _bool(raw: str, path: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    _fail(path, f"not a boolean: {raw!r}")


@dataclass(frozen=True)
class WallSpec:
    """One contact plane. `point` is absolute; `offset` places the plane
    `offset` meters ahead of the initial EE along -normal instead."""

    normal: np.ndarray
    stiffness: float
    damping: float
    point: np.ndarray | None = None
    offset: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float).reshape(3))
        n = np.linalg.norm(self.normal)
        if abs(n - 1.0) > 1e-9:
            _fail("wall.normal", "must be unit length")
        if self.stiffness < 0 or self.damping < 0:
            _fail("wall.stiffness", "stiffness and damping must be non-negative")
        if (self.point is None) == (self.offset is None):
            _fail("wall.point", "exactly one of point/offset required")
        if self.point is not None:
            object.__setattr__(self, "point", np.asarray(self.point, dtype=float).reshape(3))

    def resolve_point(self, ee0: np.ndarray) -> np.ndarray:
        if self.point is not None:
            return self.point
        return ee0 - self.offset * self.normal


@dataclass(frozen=True)
class ProfileSegment:
    """Scripted human wrench active on [t0, t1); overlapping segments sum."""

    t0: float
    t1: float
    wrench: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wrench", np.asarray(self.wrench, dtype=float).reshape(6))
        if not (0.0 <= self.t0 < self.t1):
            _fail("profile.t0", f"need 0 <= t0 < t1, got [{self.t0}, {self.t1})")


@dataclass(frozen=True)
class ButtonEvent:
    t: float
    button: str

    def __post_init__(self):
        if self.button not in BUTTONS:
            _fail("event.button", f"unknown button {self.button!r}")
        if self.t < 0:
            _fail("event.t", "event time must be non-negative")


@dataclass(frozen=True)
class GainConfig:
    """Controller gain schedule; priority-dependent tuples follow the
    defaults unless overridden."""

    xi: float = 0.7
    K_d: np.ndarray = field(default_factory=lambda: np.array([500.0] * 3 + [30.0] * 3))
    K: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5, 0.5, 0.05, 0.01, 0.01]))
    W1: np.ndarray = field(default_factory=lambda: np.array([1000.0] * 3 + [500.0] * 3))
    k0: float = 2.0
    w_t: float = 1e-3
    eta_manip: tuple = (5.0, 1.0)
    eta_loco: tuple = (1.0, 6.0)
    posture_manip: float = 5.0
    posture_loco: float = 50.0
    clik_manip: tuple = (100.0, 1.0, 0.0)
    clik_loco: tuple = (10.0, 0.5, 1.0)

    def impedance_params(self, n_arm: int, priority: str) -> ImpedanceParams:
        eta_b, eta_a = self.eta_manip if priority == MANIPULATION else self.eta_loco
        k0_arm = self.posture_manip if priority == MANIPULATION else self.posture_loco
        K_0 = np.concatenate([np.zeros(3), np.full(n_arm, k0_arm)])
        return ImpedanceParams(
            K_d=self.K_d,
            D_d=2.0 * self.xi * np.sqrt(self.K_d),
            K_0=K_0,
            D_0=2.0 * self.xi * np.sqrt(K_0),
            eta_b=eta_b,
            eta_a=eta_a,
            xi=self.xi,
            base=BaseVirtualParams(),
        )

    def clik_params(self, n_arm: int, priority: str) -> ClikParams:
        w_b, w_a, k_i = self.clik_manip if priority == MANIPULATION else self.clik_loco
        return ClikParams(
            n_arm=n_arm, K=self.K, W1=self.W1, w_b=w_b, w_a=w_a,
            k0=self.k0, w_t=self.w_t, k_i=k_i,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: RobotModel
    robot_name: str
    controller: str
    duration: float
    dt_physics: float
    gravity: bool
    gravity_comp: bool
    seed: int
    start_priority: str
    initial_q: np.ndarray | None
    velocity_lag: float
    admittance: AdmittanceParams
    gains: GainConfig
    walls: tuple
    payload_mass: float
    profile: tuple
    events: tuple
    raw: dict  # canonical string form, for dump/hash

    @property
    def g0(self) -> float:
        return 9.81 if self.gravity else 0.0

    def controller_kind(self) -> str:
        if self.controller != "auto":
            return self.controller
        return "clik" if self.robot_name == "kairos-like" else "impedance"

    def dump(self) -> str:
        """Canonical INI text; parsing it back yields an identical config."""
        out = io.StringIO()
        for section, keys in self.raw.items():
            out.write(f"[{section}]\n")
            for key, value in keys.items():
                out.write(f"{key} = {value}\n")
            out.write("\n")
        return out.getvalue()

    def config_hash(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# schema: (section, key) -> default string. Parsing is string-first so that
# overrides, files and presets all flow through the same path.

_SCHEMA = {
    "robot": {"name": "moca-like", "file": "", "initial_q": "", "velocity_lag": "0.0"},
    "run": {
        "name": "custom",
        "controller": "auto",
        "duration": "5.0",
        "dt_physics": "0.001",
        "gravity": "true",
        "gravity_comp": "true",
        "seed": "0",
        "start_priority": MANIPULATION,
    },
    "admittance": {"mass": "6 6 6 1 1 1", "damping": "20 20 20 1.5 1.5 1.5"},
    "controller": {
        "xi": "0.7",
        "k_d": "500 500 500 30 30 30",
        "k": "0.5 0.5 0.5 0.05 0.01 0.01",
        "w1": "1000 1000 1000 500 500 500",
        "k0": "2.0",
        "w_t": "0.001",
        "eta_manip": "5 1",
        "eta_loco": "1 6",
        "posture_manip": "5",
        "posture_loco": "50",
        "clik_manip": "100 1 0",
        "clik_loco": "10 0.5 1",
    },
    "payload": {"mass": "0.0", "attach_time": "", "detach_time": ""},
}

_WALL_KEYS = {"point": "", "offset": "", "normal": "", "stiffness": "0", "damping": "0"}
_PROFILE_KEYS = {"t0": "", "t1": "", "force": "0 0 0", "torque": "0 0 0"}
_EVENT_KEYS = {"t": "", "button": ""}


def _merge_raw(cp: configparser.ConfigParser) -> dict:
    """File values over schema defaults, plus numbered wall/profile/event
    sections, normalized to a plain nested dict of strings."""
    raw = {sec: dict(defaults) for sec, defaults in _SCHEMA.items()}
    for section in cp.sections():
        base = section.split(".", 1)[0]
        if section in raw:
            target = raw[section]
            template = _SCHEMA[section]
        elif base in ("wall", "profile", "event"):
            template = {"wall": _WALL_KEYS, "profile": _PROFILE_KEYS, "event": _EVENT_KEYS}[base]
            target = raw.setdefault(section, dict(template))
        else:
            _fail(section, "unknown section")
        for key, value in cp[section].items():
            if key not in template:
                _fail(f"{section}.{key}", "unknown key")
            target[key] = value.strip()
    return raw


def _sorted_numbered(raw: dict, prefix: str) -> list:
    sections = [s for s in raw if s.startswith(prefix + ".")]

    def index(s):
        tail = s.split(".", 1)[1]
        if not tail.isdigit():
            _fail(s, f"{prefix} sections must be numbered, like [{prefix}.1]")
        return int(tail)

    return [raw[s] for s in sorted(sections, key=index)]


def _build(raw: dict) -> ScenarioConfig:
    rob, run = raw["robot"], raw["run"]

    if rob["file"]:
        model = load_robot_model(rob["file"])
        robot_name = model.name
    else:
        if rob["name"] not in builtin_model_names():
            _fail("robot.name", f"unknown robot {rob['name']!r} (have {builtin_model_names()})")
        robot_name = rob["name"]
        model = builtin_model(robot_name)

    controller = run["controller"]
    if controller not in CONTROLLERS:
        _fail("run.controller", f"must be one of {CONTROLLERS}")
    duration = _float(run["duration"], "run.duration")
    if duration <= 0:
        _fail("run.duration", "must be positive")
    dt = _float(run["dt_physics"], "run.dt_physics")
    if not 1e-4 - 1e-12 <= dt <= 1e-3 + 1e-12:
        _fail("run.dt_physics", "must lie in [1e-4, 1e-3]")
    n_sub = TICK / dt
    if abs(n_sub - round(n_sub)) > 1e-9:
        _fail("run.dt_physics", f"must divide the {TICK} s control tick")
    priority = run["start_priority"]
    if priority not in (MANIPULATION, LOCOMOTION):
        _fail("run.start_priority", f"must be {MANIPULATION!r} or {LOCOMOTION!r}")

    initial_q = None
    if rob["initial_q"]:
        initial_q = _floats(rob["initial_q"], model.n, "robot.initial_q")
    velocity_lag = _float(rob["velocity_lag"], "robot.velocity_lag")
    if velocity_lag < 0:
        _fail("robot.velocity_lag", "must be non-negative")

    adm = raw["admittance"]
    admittance = AdmittanceParams(
        mass=_floats(adm["mass"], 6, "admittance.mass"),
        damping=_floats(adm["damping"], 6, "admittance.damping"),
    )

    c = raw["controller"]
    gains = GainConfig(
        xi=_float(c["xi"], "controller.xi"),
        K_d=_floats(c["k_d"], 6, "controller.k_d"),
        K=_floats(c["k"], 6, "controller.k"),
        W1=_floats(c["w1"], 6, "controller.w1"),
        k0=_float(c["k0"], "controller.k0"),
        w_t=_float(c["w_t"], "controller.w_t"),
        eta_manip=tuple(_floats(c["eta_manip"], 2, "controller.eta_manip")),
        eta_loco=tuple(_floats(c["eta_loco"], 2, "controller.eta_loco")),
        posture_manip=_float(c["posture_manip"], "controller.posture_manip"),
        posture_loco=_float(c["posture_loco"], "controller.posture_loco"),
        clik_manip=tuple(_floats(c["clik_manip"], 3, "controller.clik_manip")),
        clik_loco=tuple(_floats(c["clik_loco"], 3, "controller.clik_loco")),
    )

    walls = []
    for i, w in enumerate(_sorted_numbered(raw, "wall"), 1):
        where = f"wall.{i}"
        if not w["normal"]:
            _fail(f"{where}.normal", "required")
        walls.append(
            WallSpec(
                normal=_floats(w["normal"], 3, f"{where}.normal"),
                stiffness=_float(w["stiffness"], f"{where}.stiffness"),
                damping=_float(w["damping"], f"{where}.damping"),
                point=_floats(w["point"], 3, f"{where}.point") if w["point"] else None,
                offset=_float(w["offset"], f"{where}.offset") if w["offset"] else None,
            )
        )

    payload_mass = _float(raw["payload"]["mass"], "payload.mass")
    if payload_mass < 0:
        _fail("payload.mass", "must be non-negative")

    profile = []
    for i, p in enumerate(_sorted_numbered(raw, "profile"), 1):
        where = f"profile.{i}"
        if not p["t0"] or not p["t1"]:
            _fail(f"{where}.t0", "t0 and t1 required")
        wrench = np.concatenate(
            [_floats(p["force"], 3, f"{where}.force"), _floats(p["torque"], 3, f"{where}.torque")]
        )
        profile.append(
            ProfileSegment(_float(p["t0"], f"{where}.t0"), _float(p["t1"], f"{where}.t1"), wrench)
        )
    profile.sort(key=lambda s: (s.t0, s.t1))

    events = []
    for i, e in enumerate(_sorted_numbered(raw, "event"), 1):
        where = f"event.{i}"
        if not e["t"] or not e["button"]:
            _fail(f"{where}.t", "t and button required")
        events.append(ButtonEvent(_float(e["t"], f"{where}.t"), e["button"]))
    # payload attach/detach sugar: scripted times become G presses
    for key in ("attach_time", "detach_time"):
        if raw["payload"][key]:
            events.append(ButtonEvent(_float(raw["payload"][key], f"payload.{key}"), "G"))
    events.sort(key=lambda e: e.t)

    return ScenarioConfig(
        name=run["name"],
        model=model,
        robot_name=robot_name,
        controller=controller,
        duration=duration,
        dt_physics=dt,
        gravity=_bool(run["gravity"], "run.gravity"),
        gravity_comp=_bool(run["gravity_comp"], "run.gravity_comp"),
        seed=int(_float(run["seed"], "run.seed")),
        start_priority=priority,
        initial_q=initial_q,
        velocity_lag=velocity_lag,
        admittance=admittance,
        gains=gains,
        walls=tuple(walls),
        payload_mass=payload_mass,
        profile=tuple(profile),
        events=tuple(events),
        raw=raw,
    )


def apply_overrides(raw: dict, overrides) -> dict:
    """Dotted-path overrides: `section.key=value`, with the bare shorthand
    `robot=NAME` for robot.name. Numbered sections use their full name,
    e.g. `wall.1.stiffness=1e5`."""
    out = {sec: dict(keys) for sec, keys in raw.items()}
    for item in overrides:
        if "=" not in item:
            _fail(item, "override must look like section.key=value")
        path, value = item.split("=", 1)
        path = path.strip()
        value = value.strip()
        if path == "robot":
            path = "robot.name"
        if "." not in path:
            _fail(path, "override must look like section.key=value")
        section, key = path.rsplit(".", 1)
        base = section.split(".", 1)[0]
        if section not in out:
            if base in ("wall", "profile", "event"):
                template = {"wall": _WALL_KEYS, "profile": _PROFILE_KEYS, "event": _EVENT_KEYS}[base]
                out[section] = dict(template)
            else:
                _fail(path, f"unknown section {section!r}")
        template = _SCHEMA.get(section) or {
            "wall": _WALL_KEYS, "profile": _PROFILE_KEYS, "event": _EVENT_KEYS
        }[base]
        if key not in template:
            _fail(path, f"unknown key {key!r} in section {section!r}")
        out[section][key] = value
    return out


def parse_config_text(text: str, overrides=(), name: str | None = None) -> ScenarioConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_file(io.StringIO(text))
    except configparser.Error as exc:
        _fail("config", str(exc))
    raw = _merge_raw(cp)
    if overrides:
        raw = apply_overrides(raw, overrides)
    cfg = _build(raw)
    if name is not None:
        object.__setattr__(cfg, "name", name)
        cfg.raw["run"]["name"] = name
    return cfg


def load_config(path: str, overrides=()) -> ScenarioConfig:
    """Accepts a file path or a built-in scenario name."""
    if path in _PRESETS:
        return parse_config_text(_PRESETS[path], overrides, name=path)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        _fail("config", f"cannot read {path!r}: {exc}")
    return parse_config_text(text, overrides)


# ---------------------------------------------------------------------------
# built-in scenarios


_WALL_INSERTION = """
[robot]
name = moca-like

[run]
name = wall_insertion
duration = 3.0
dt_physics = 0.0001

[wall.1]
offset = 0.03
normal = -1 0 0
stiffness = 1e5
damping = 200

[profile.1]
t0 = 0.2
t1 = 1.8
force = 0.5 0 0
"""

_LOAD_CARRY = """
[robot]
name = kairos-like

[run]
name = load_carry
duration = 9.0
dt_physics = 0.001

[payload]
mass = 10.0

[event.1]
t = 0.5
button = G

[event.2]
t = 1.0
button = P

[event.3]
t = 7.5
button = P

[event.4]
t = 8.0
button = G

[profile.1]
t0 = 1.2
t1 = 5.2
force = 18 0 0

[profile.2]
t0 = 5.2
t1 = 7.0
force = -3.5 0 0
"""

_PATH_TRACK = """
[robot]
name = kairos-like

[run]
name = path_track
duration = 6.0
dt_physics = 0.001

[profile.1]
t0 = 0.2
t1 = 2.0
force = 4 0 0

[profile.2]
t0 = 1.0
t1 = 3.0
force = 0 3 0

[profile.3]
t0 = 2.0
t1 = 4.0
force = 0 0 2.5

[profile.4]
t0 = 3.5
t1 = 5.5
force = -2 -2 -1.5
"""

_POSTURE_TRAVERSE = """
[robot]
name = moca-like

[run]
name = posture_traverse
duration = 7.0
dt_physics = 0.001

[event.1]
t = 0.2
button = P

[profile.1]
t0 = 0.4
t1 = 4.4
force = 6 0 0

[profile.2]
t0 = 4.4
t1 = 5.4
force = -1.5 0 0
"""

_PRESETS = {
    "wall_insertion": _WALL_INSERTION,
    "load_carry": _LOAD_CARRY,
    "path_track": _PATH_TRACK,
    "posture_traverse": _POSTURE_TRAVERSE,
}


def builtin_scenarios() -> tuple:
    return tuple(sorted(_PRESETS))


def builtin_scenario(name: str) -> ScenarioConfig:
    if name not in _PRESETS:
        _fail("scenario", f"unknown scenario {name!r} (have {builtin_scenarios()})")
    return parse_config_text(_PRESETS[name], name=name)
