"""Deterministic fixed-timestep simulator.

Structure of one 1 kHz interface tick:

  button events -> scripted wrench -> admittance update -> controller
  -> log row -> physics substeps (dt_physics each)

The torque-controlled robot integrates full arm dynamics (semi-implicit
Euler) with the base tracking its commanded velocity kinematically; the
velocity-controlled robot tracks commanded joint velocities stiffly. The
log row for tick k captures the state at t = k ms together with the
command and external wrench injected during that tick, so every row is
reproducible from the previous one.

No wall clock, no RNG: identical configs produce bit-identical logs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .clik import ClikParams, clik_step
from .config import TICK, ScenarioConfig
from .dynamics import (
    arm_gravity,
    arm_mass_matrix,
    gravity_vector,
    lump_point_mass,
    rnea_bias,
    whole_body_mass,
)
from .errors import IntegrationFault
from .impedance import (
    ImpedanceParams,
    base_torque_to_velocity,
    cartesian_wrench,
    nullspace_torque,
    weight_matrix,
    whole_body_torque,
)
from .interface import (
    LOCOMOTION,
    TRANSLATION,
    InterfaceState,
    admittance_step,
    handle_button,
)
from .model import (
    JointState,
    Pose,
    Twist,
    Wrench,
    arm_frames,
    base_transform,
    fk_ee,
    whole_body_jacobian,
)
from .geometry import quat_to_matrix

# emergency brake: dq decays with this time constant once the safety
# latch trips (reaches 1e-6 of a 2 rad/s start well inside 0.5 s)
BRAKE_TAU = 0.03
# velocity controller runs at 500 Hz, every other interface tick
CLIK_DIVISOR = 2


@dataclass(frozen=True)
class Wall:
    """Contact plane with outward unit normal (pointing back at the robot)."""

    point: np.ndarray
    normal: np.ndarray
    stiffness: float
    damping: float

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float).reshape(3))
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float).reshape(3))


def contact_wrench(walls, ee_pos, ee_vel) -> np.ndarray:
    """Sum of penalty contact wrenches at the end-effector point.

    Spring on penetration depth, damping on the approach speed only, so
    withdrawal is never sticky; each wall pushes along its own normal and
    never pulls. Pure point contact: the torque part stays zero.
    """
    if isinstance(ee_pos, Pose):
        ee_pos = ee_pos.position
    if isinstance(ee_vel, Twist):
        ee_vel = ee_vel.linear
    F = np.zeros(6)
    for w in walls:
        depth = -float((ee_pos - w.point) @ w.normal)
        if depth <= 0.0:
            continue
        approach = -float(ee_vel @ w.normal)
        f_n = w.stiffness * depth + w.damping * max(approach, 0.0)
        if f_n > 0.0:
            F[:3] += f_n * w.normal
    return F


@dataclass
class World:
    """Full mutable simulation state for one scenario run."""

    cfg: ScenarioConfig
    q: np.ndarray
    dq: np.ndarray
    iface: InterfaceState
    kind: str  # impedance | clik | none
    imp: ImpedanceParams | None
    clik: ClikParams | None
    walls: tuple
    human_wrench: np.ndarray = field(default_factory=lambda: np.zeros(6))
    # live-session input summed onto the scripted profile (bridge owns this)
    external_wrench: np.ndarray = field(default_factory=lambda: np.zeros(6))
    cmd: np.ndarray = None
    base_cmd: np.ndarray = field(default_factory=lambda: np.zeros(3))
    safety_stop: bool = False
    peak_f_ext: float = 0.0
    last_f_ext: np.ndarray = field(default_factory=lambda: np.zeros(6))
    tick: int = 0
    t: float = 0.0
    event_idx: int = 0
    # cached per-run constants
    g_vec: np.ndarray = None
    payload_w: np.ndarray = None
    n_sub: int = 1
    h: float = TICK
    force_limit: float = 0.0

    @property
    def payload_attached(self) -> bool:
        return self.iface.gripper_closed and self.cfg.payload_mass > 0.0


def make_world(cfg: ScenarioConfig) -> World:
    model = cfg.model
    q = (cfg.initial_q if cfg.initial_q is not None else model.whole_body_home()).copy()
    dq = np.zeros(model.n)
    x0 = fk_ee(model, q)
    iface = InterfaceState.initial(x0, q_pref=q.copy())
    if cfg.start_priority == LOCOMOTION:
        iface = replace(iface, priority=LOCOMOTION)
    kind = cfg.controller_kind()
    imp = cfg.gains.impedance_params(model.n_arm, iface.priority) if kind == "impedance" else None
    clik = cfg.gains.clik_params(model.n_arm, iface.priority) if kind == "clik" else None
    walls = tuple(
        Wall(w.resolve_point(x0.position), w.normal, w.stiffness, w.damping) for w in cfg.walls
    )
    world = World(
        cfg=cfg, q=q, dq=dq, iface=iface, kind=kind, imp=imp, clik=clik, walls=walls,
        cmd=np.zeros(model.n),
        g_vec=gravity_vector(model, cfg.g0),
        payload_w=np.array([0.0, 0.0, -cfg.payload_mass * cfg.g0, 0.0, 0.0, 0.0]),
        n_sub=int(round(TICK / cfg.dt_physics)),
        h=cfg.dt_physics,
        force_limit=model.payload_limit * 9.81,
    )
    return world


def _ee_point(model, q, frames) -> np.ndarray:
    p_b, R_b = base_transform(q)
    R_m = R_b @ quat_to_matrix(model.mount_quat)
    return p_b + R_b @ model.mount_pos + R_m @ frames.ee_pos


def _measured_wrench(world: World, q, dq, frames, J) -> np.ndarray:
    """Contact plus carried-payload weight, as the wrist sensor would see it."""
    p_e = _ee_point(world.cfg.model, q, frames)
    v_e = J[:3] @ dq
    f = contact_wrench(world.walls, p_e, v_e)
    if world.payload_attached:
        f = f + world.payload_w
    return f


def _latch_safety(world: World):
    world.safety_stop = True
    world.cmd = np.zeros(world.cfg.model.n)
    world.base_cmd = np.zeros(3)


def _check_wrench(world: World, f_meas: np.ndarray):
    world.last_f_ext = f_meas
    norm = float(np.linalg.norm(f_meas[:3]))
    if norm > world.peak_f_ext:
        world.peak_f_ext = norm
    if not world.safety_stop and norm > world.force_limit:
        _latch_safety(world)


def _brake(world: World, h: float):
    world.dq *= np.exp(-h / BRAKE_TAU)
    world.q[:3] += h * world.dq[:3]
    world.q[3:] += h * world.dq[3:]


def press_button(world: World, button: str):
    """Route one button press into the interface; a priority flip swaps
    the active controller gain set."""
    cfg = world.cfg
    before = world.iface.priority
    frames = arm_frames(cfg.model, world.q[3:])
    pose = fk_ee(cfg.model, world.q, frames)
    world.iface = handle_button(world.iface, button, JointState(world.q, world.dq), pose)
    if world.iface.priority != before:
        if world.kind == "impedance":
            world.imp = cfg.gains.impedance_params(cfg.model.n_arm, world.iface.priority)
        elif world.kind == "clik":
            world.clik = cfg.gains.clik_params(cfg.model.n_arm, world.iface.priority)


def _apply_events(world: World):
    cfg = world.cfg
    while world.event_idx < len(cfg.events) and cfg.events[world.event_idx].t <= world.t + 1e-9:
        ev = cfg.events[world.event_idx]
        world.event_idx += 1
        press_button(world, ev.button)


def _profile_wrench(world: World) -> np.ndarray:
    f = np.zeros(6)
    t = world.t
    for seg in world.cfg.profile:
        if seg.t0 - 1e-9 <= t < seg.t1 - 1e-9:
            f += seg.wrench
    return f


def _interface_tick(world: World, dt: float):
    world.human_wrench = _profile_wrench(world) + world.external_wrench
    world.iface = admittance_step(
        world.cfg.admittance, world.iface, Wrench.from_array(world.human_wrench), dt
    )


_ZERO6 = np.zeros(6)


def _arm_accel(world: World, q, dq, comp: bool):
    """Arm acceleration and measured EE wrench at an explicit state."""
    model = world.cfg.model
    frames = arm_frames(model, q[3:])
    if world.walls or world.payload_attached:
        J = whole_body_jacobian(model, q, frames)
        f_meas = _measured_wrench(world, q, dq, frames, J)
        tau_ext = J[:, 3:].T @ f_meas
    else:
        f_meas = _ZERO6
        tau_ext = 0.0
    plant = frames
    if world.payload_attached:
        plant = lump_point_mass(frames, world.cfg.payload_mass, frames.ee_pos)
    tau = world.cmd[3:] + tau_ext - rnea_bias(plant, dq[3:], np.zeros(3))
    if not comp:
        tau = tau - arm_gravity(frames, world.g_vec)
    return np.linalg.solve(arm_mass_matrix(plant), tau), f_meas


def _torque_substep(world: World, comp: bool):
    """Explicit-midpoint step of the torque-controlled plant.

    The base follows its velocity command exactly (or through a
    first-order lag, integrated exactly over the substep), so only the
    arm state enters the two-stage update. Midpoint keeps the free-swing
    energy drift well under the semi-implicit level at the same cost
    order, which matters for the fixed dt floor of 1e-4 s.
    """
    h = world.h
    a1, f_meas = _arm_accel(world, world.q, world.dq, comp)
    _check_wrench(world, f_meas)
    if world.safety_stop:
        _brake(world, h)
        return

    lag = world.cfg.velocity_lag
    if lag > 0.0:
        decay = np.exp(-h / lag)
        v_base = world.base_cmd + (world.dq[:3] - world.base_cmd) * decay
    else:
        v_base = world.base_cmd

    q_mid = world.q.copy()
    dq_mid = world.dq.copy()
    q_mid[:3] += 0.5 * h * v_base
    q_mid[3:] += 0.5 * h * world.dq[3:]
    dq_mid[:3] = v_base
    dq_mid[3:] += 0.5 * h * a1
    a2, _ = _arm_accel(world, q_mid, dq_mid, comp)

    world.q[:3] += h * v_base
    world.q[3:] += h * (world.dq[3:] + 0.5 * h * a1)
    world.dq[:3] = v_base
    world.dq[3:] += h * a2


def _velocity_substep(world: World):
    """One step of the stiff velocity-tracking plant."""
    model = world.cfg.model
    h = world.h
    frames = arm_frames(model, world.q[3:])
    J = whole_body_jacobian(model, world.q, frames)
    f_meas = _measured_wrench(world, world.q, world.dq, frames, J)
    _check_wrench(world, f_meas)
    if world.safety_stop:
        _brake(world, h)
        return
    lag = world.cfg.velocity_lag
    if lag > 0.0:
        world.dq += (world.cmd - world.dq) * (h / lag)
    else:
        world.dq[:] = world.cmd
    world.q += h * world.dq


def _controller_moca(world: World):
    if world.safety_stop:
        return
    model = world.cfg.model
    frames = arm_frames(model, world.q[3:])
    J = whole_body_jacobian(model, world.q, frames)
    M = whole_body_mass(model, world.imp.base, world.q[3:], frames)
    W = weight_matrix(M, world.imp.eta_b, world.imp.eta_a)
    x = fk_ee(model, world.q, frames)
    dx = Twist.from_array(J @ world.dq)
    F = cartesian_wrench(world.imp, x, dx, world.iface.x_d, world.iface.dx_d)
    tau_0 = nullspace_torque(world.imp, world.q, world.dq, world.iface.q_pref)
    world.cmd = whole_body_torque(J, M, W, F.as_array(), tau_0, regularize=True)
    world.base_cmd = base_torque_to_velocity(world.imp.base, world.cmd[:3], world.base_cmd, TICK)


def _controller_kairos(world: World):
    if world.safety_stop or world.tick % CLIK_DIVISOR != 0:
        return
    frames = arm_frames(world.cfg.model, world.q[3:])
    world.cmd = clik_step(
        world.cfg.model, world.clik, JointState(world.q, world.dq), world.iface,
        clamp=True, frames=frames,
    )


def _controller_none(world: World):
    world.cmd = np.zeros(world.cfg.model.n)
    world.base_cmd = np.zeros(3)


_CONTROLLERS = {
    "impedance": _controller_moca,
    "clik": _controller_kairos,
    "none": _controller_none,
}


def _substep(world: World):
    if world.kind == "clik":
        _velocity_substep(world)
    else:
        _torque_substep(world, world.cfg.gravity_comp and world.kind == "impedance")


def _advance_tick(world: World):
    _apply_events(world)
    _interface_tick(world, TICK)
    _CONTROLLERS[world.kind](world)
    for _ in range(world.n_sub):
        _substep(world)
    world.tick += 1
    world.t = world.tick * TICK


def step_moca(world: World, dt: float = TICK) -> World:
    """Advance the impedance-controlled world by one interface tick."""
    if abs(dt - TICK) > 1e-12:
        raise ValueError(f"step length is one {TICK} s interface tick")
    if world.kind != "impedance":
        raise ValueError(f"world runs the {world.kind!r} controller")
    _advance_tick(world)
    return world


def step_kairos(world: World, dt: float = TICK) -> World:
    """Advance the velocity-controlled world by one interface tick."""
    if abs(dt - TICK) > 1e-12:
        raise ValueError(f"step length is one {TICK} s interface tick")
    if world.kind != "clik":
        raise ValueError(f"world runs the {world.kind!r} controller")
    _advance_tick(world)
    return world


def step_free(world: World, dt: float = TICK) -> World:
    """Undriven torque plant: zero commands, no gravity compensation."""
    if abs(dt - TICK) > 1e-12:
        raise ValueError(f"step length is one {TICK} s interface tick")
    if world.kind != "none":
        raise ValueError(f"world runs the {world.kind!r} controller")
    _advance_tick(world)
    return world


# ---------------------------------------------------------------------------
# logging


def log_columns(n: int) -> list:
    cols = ["t"]
    cols += [f"q{i}" for i in range(n)]
    cols += [f"dq{i}" for i in range(n)]
    cols += ["x_px", "x_py", "x_pz", "x_qw", "x_qx", "x_qy", "x_qz"]
    cols += ["x_d_px", "x_d_py", "x_d_pz", "x_d_qw", "x_d_qx", "x_d_qy", "x_d_qz"]
    cols += [f"f_h_{c}" for c in ("x", "y", "z", "tx", "ty", "tz")]
    cols += [f"f_ext_{c}" for c in ("x", "y", "z", "tx", "ty", "tz")]
    cols += [f"cmd{i}" for i in range(n)]
    cols += ["mode_a", "mode_m", "mode_g", "mode_p", "safety_stop"]
    return cols


@dataclass
class SimLog:
    """Tick-sampled run history plus scalar outcome metadata."""

    scenario: str
    robot: str
    n: int
    columns: list
    data: np.ndarray
    config_hash: str
    version: str
    safety_stop: bool
    peak_f_ext: float

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise KeyError(
                f"unknown channel {name!r}; valid channels: {', '.join(self.columns)}"
            ) from None
        return self.data[:, idx]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.data:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def save(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def read_log_csv(path: str):
    """(columns, data) back from a saved log."""
    with open(path) as fh:
        header = fh.readline().strip()
        columns = header.split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(columns):
        raise ValueError(f"{path}: {data.shape[1]} columns of data, {len(columns)} names")
    return columns, data


def _log_row(world: World, out: np.ndarray):
    model = world.cfg.model
    n = model.n
    frames = arm_frames(model, world.q[3:])
    J = whole_body_jacobian(model, world.q, frames)
    x = fk_ee(model, world.q, frames)
    f_meas = _measured_wrench(world, world.q, world.dq, frames, J)
    i = 0
    out[i] = world.t
    i += 1
    out[i : i + n] = world.q
    i += n
    out[i : i + n] = world.dq
    i += n
    out[i : i + 7] = x.as_array()
    i += 7
    out[i : i + 7] = world.iface.x_d.as_array()
    i += 7
    out[i : i + 6] = world.human_wrench
    i += 6
    out[i : i + 6] = f_meas
    i += 6
    out[i : i + n] = world.cmd
    i += n
    out[i] = 1.0 if world.iface.admittance_active else 0.0
    out[i + 1] = 1.0 if world.iface.motion_mode == TRANSLATION else 0.0
    out[i + 2] = 1.0 if world.iface.gripper_closed else 0.0
    out[i + 3] = 1.0 if world.iface.priority == LOCOMOTION else 0.0
    out[i + 4] = 1.0 if world.safety_stop else 0.0


def run_scenario(cfg: ScenarioConfig) -> SimLog:
    """Execute one scenario start-to-finish and return the tick log."""
    from . import __version__

    world = make_world(cfg)
    n_ticks = int(round(cfg.duration / TICK))
    columns = log_columns(cfg.model.n)
    data = np.empty((n_ticks, len(columns)))

    for k in range(n_ticks):
        _apply_events(world)
        _interface_tick(world, TICK)
        _CONTROLLERS[world.kind](world)
        _log_row(world, data[k])
        for _ in range(world.n_sub):
            _substep(world)
        world.tick += 1
        world.t = world.tick * TICK
        if not (np.all(np.isfinite(world.q)) and np.all(np.isfinite(world.dq))):
            raise IntegrationFault(
                f"non-finite state at t={world.t:.4f} s (tick {world.tick})"
            )

    return SimLog(
        scenario=cfg.name,
        robot=cfg.robot_name,
        n=cfg.model.n,
        columns=columns,
        data=data,
        config_hash=cfg.config_hash(),
        version=__version__,
        safety_stop=world.safety_stop,
        peak_f_ext=world.peak_f_ext,
    )


# ---------------------------------------------------------------------------
# report metrics


def rms_tracking_error(log: SimLog) -> float:
    """RMS of the EE position error against the reference, over the run."""
    dx = log.column("x_px") - log.column("x_d_px")
    dy = log.column("x_py") - log.column("x_d_py")
    dz = log.column("x_pz") - log.column("x_d_pz")
    return float(np.sqrt(np.mean(dx * dx + dy * dy + dz * dz)))


def mode_switch_count(log: SimLog) -> int:
    """Number of manipulation/locomotion transitions recorded."""
    p = log.column("mode_p")
    return int(np.sum(p[1:] != p[:-1]))


def priority_sequence(log: SimLog) -> list:
    """Priorities in visit order, e.g. ['manipulation', 'locomotion', ...]."""
    p = log.column("mode_p")
    names = ["manipulation" if v == 0.0 else "locomotion" for v in p]
    out = [names[0]]
    for name in names[1:]:
        if name != out[-1]:
            out.append(name)
    return out
