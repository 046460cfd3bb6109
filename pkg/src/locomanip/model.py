"""Robot description and geometry-derived quantities.

A robot is a planar omnidirectional base (x, y, yaw — two prismatic joints
plus a vertical revolute) carrying a serial revolute arm. Joint vectors are
base-first: q = [x, y, yaw, q_a1 ... q_a{n_a}].

Two built-in models ship embedded in the same declarative text format that
`load_robot_model` reads from disk: ``moca-like`` (7-DoF arm, 3 kg payload
limit) and ``kairos-like`` (6-DoF arm, 16 kg payload limit).
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ModelError
from .geometry import (
    IDENTITY_QUAT,
    matrix_to_quat,
    normalize_quat,
    quat_conj,
    quat_mul,
    quat_to_matrix,
    quat_to_rotvec,
    skew,
    wrap_angle,
    yaw_matrix,
)

N_BASE = 3  # planar base: x [m], y [m], yaw [rad]


# ---------------------------------------------------------------------------
# task-space containers


@dataclass
class Pose:
    """Position [m] + canonical unit quaternion [w, x, y, z]."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        self.orientation = normalize_quat(self.orientation)

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.zeros(3), IDENTITY_QUAT.copy())

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy())

    def as_array(self) -> np.ndarray:
        """7-vector [px, py, pz, qw, qx, qy, qz]."""
        return np.concatenate([self.position, self.orientation])


@dataclass
class Twist:
    linear: np.ndarray
    angular: np.ndarray

    def __post_init__(self):
        self.linear = np.asarray(self.linear, dtype=float).reshape(3)
        self.angular = np.asarray(self.angular, dtype=float).reshape(3)

    @staticmethod
    def zero() -> "Twist":
        return Twist(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_array(v) -> "Twist":
        v = np.asarray(v, dtype=float).reshape(6)
        return Twist(v[:3], v[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])


@dataclass
class Wrench:
    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        self.force = np.asarray(self.force, dtype=float).reshape(3)
        self.torque = np.asarray(self.torque, dtype=float).reshape(3)

    @staticmethod
    def zero() -> "Wrench":
        return Wrench(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_array(v) -> "Wrench":
        v = np.asarray(v, dtype=float).reshape(6)
        return Wrench(v[:3], v[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque])


@dataclass
class JointState:
    """Whole-body positions/velocities, base-first. Yaw is kept in (-pi, pi]."""

    q: np.ndarray
    dq: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).copy()
        self.dq = np.asarray(self.dq, dtype=float).copy()
        if self.q.shape != self.dq.shape or self.q.ndim != 1:
            raise DimensionError("q and dq must be 1-D arrays of equal length")
        self.q[2] = wrap_angle(self.q[2])

    def copy(self) -> "JointState":
        return JointState(self.q.copy(), self.dq.copy())


# ---------------------------------------------------------------------------
# robot description


@dataclass(frozen=True)
class ArmJoint:
    """One revolute joint and the link it drives.

    `origin`/`orientation` place the joint frame in the parent frame;
    `axis` is the unit rotation axis in that frame; `com`/`inertia` describe
    the link mass distribution in the rotated joint frame.
    """

    axis: np.ndarray
    origin: np.ndarray
    mass: float
    com: np.ndarray
    inertia: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    # reflected rotor inertia seen through the gearbox [kg.m^2]; adds to the
    # mass-matrix diagonal only (no Coriolis or gravity contribution)
    armature: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float).reshape(3))
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float).reshape(3))
        object.__setattr__(self, "com", np.asarray(self.com, dtype=float).reshape(3))
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape == (3,):
            inertia = np.diag(inertia)
        object.__setattr__(self, "inertia", inertia.reshape(3, 3))
        object.__setattr__(self, "orientation", normalize_quat(self.orientation))
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-12:
            raise ModelError("joint axis must be unit-norm")
        if not self.mass > 0.0:
            raise ModelError("link mass must be positive")
        if np.any(np.abs(self.inertia - self.inertia.T) > 1e-12):
            raise ModelError("link inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(self.inertia) <= 0.0):
            raise ModelError("link inertia must be positive definite")
        if self.armature < 0.0:
            raise ModelError("armature inertia must be non-negative")
        # constants for the Rodrigues form R(q) = I + sin(q) K + (1-cos(q)) K^2
        K = skew(self.axis)
        object.__setattr__(self, "_R_local", quat_to_matrix(self.orientation))
        object.__setattr__(self, "_K", K)
        object.__setattr__(self, "_K2", K @ K)


@dataclass(frozen=True)
class RobotModel:
    name: str
    joints: tuple
    mount_pos: np.ndarray
    mount_quat: np.ndarray
    tool_pos: np.ndarray
    tool_quat: np.ndarray
    payload_limit: float
    q_home: np.ndarray
    vel_limit_base: float = 1.0
    vel_limit_arm: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "mount_pos", np.asarray(self.mount_pos, dtype=float).reshape(3))
        object.__setattr__(self, "mount_quat", normalize_quat(self.mount_quat))
        object.__setattr__(self, "tool_pos", np.asarray(self.tool_pos, dtype=float).reshape(3))
        object.__setattr__(self, "tool_quat", normalize_quat(self.tool_quat))
        object.__setattr__(self, "q_home", np.asarray(self.q_home, dtype=float).reshape(-1))
        if self.q_home.size != self.n_arm:
            raise ModelError("q_home length must equal the arm joint count")

    @property
    def n_base(self) -> int:
        return N_BASE

    @property
    def n_arm(self) -> int:
        return len(self.joints)

    @property
    def n(self) -> int:
        return N_BASE + len(self.joints)

    def check_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise DimensionError(f"expected q of length {self.n}, got shape {q.shape}")
        return q

    def check_q_arm(self, q_a) -> np.ndarray:
        q_a = np.asarray(q_a, dtype=float)
        if q_a.shape != (self.n_arm,):
            raise DimensionError(f"expected arm vector of length {self.n_arm}, got {q_a.shape}")
        return q_a

    def whole_body_home(self) -> np.ndarray:
        return np.concatenate([np.zeros(N_BASE), self.q_home])


# ---------------------------------------------------------------------------
# kinematics


@dataclass
class ArmFrames:
    """Per-link frames in the arm-base (mount) frame, plus the tool pose.

    p: joint origins (n_a, 3); z: joint axes (n_a, 3); R: link orientations
    (n_a, 3, 3); c: link COMs (n_a, 3); Iw: link inertias about their COM
    expressed in the arm-base frame (n_a, 3, 3); m: masses (n_a,);
    armature: reflected rotor inertias (n_a,).
    """

    p: np.ndarray
    z: np.ndarray
    R: np.ndarray
    c: np.ndarray
    Iw: np.ndarray
    m: np.ndarray
    armature: np.ndarray
    ee_pos: np.ndarray
    ee_R: np.ndarray


def arm_frames(model: RobotModel, q_a) -> ArmFrames:
    q_a = model.check_q_arm(q_a)
    n = model.n_arm
    p = np.zeros((n, 3))
    z = np.zeros((n, 3))
    R = np.zeros((n, 3, 3))
    c = np.zeros((n, 3))
    Iw = np.zeros((n, 3, 3))
    m = np.zeros(n)
    armature = np.array([joint.armature for joint in model.joints])
    sin_q, cos_q = np.sin(q_a), np.cos(q_a)
    eye = np.eye(3)
    R_prev = eye
    p_prev = np.zeros(3)
    for i, joint in enumerate(model.joints):
        p_i = p_prev + R_prev @ joint.origin
        R_fixed = R_prev @ joint._R_local
        R_rot = eye + sin_q[i] * joint._K + (1.0 - cos_q[i]) * joint._K2
        R_i = R_fixed @ R_rot
        p[i], R[i] = p_i, R_i
        z[i] = R_fixed @ joint.axis
        c[i] = p_i + R_i @ joint.com
        Iw[i] = R_i @ joint.inertia @ R_i.T
        m[i] = joint.mass
        p_prev, R_prev = p_i, R_i
    ee_pos = p_prev + R_prev @ model.tool_pos
    ee_R = R_prev @ quat_to_matrix(model.tool_quat)
    return ArmFrames(p=p, z=z, R=R, c=c, Iw=Iw, m=m, armature=armature, ee_pos=ee_pos, ee_R=ee_R)


def base_transform(q) -> tuple:
    """(position, rotation matrix) of the base frame in the world."""
    return np.array([q[0], q[1], 0.0]), yaw_matrix(q[2])


def pose_error(x_d: Pose, x: Pose) -> np.ndarray:
    """6-vector [position difference; axis-angle of the relative rotation]."""
    e = np.empty(6)
    e[:3] = x_d.position - x.position
    e[3:] = quat_to_rotvec(quat_mul(x_d.orientation, quat_conj(x.orientation)))
    return e


def fk_ee(model: RobotModel, q, frames: ArmFrames | None = None) -> Pose:
    """World end-effector pose.

    Parameters
    ----------
    model : RobotModel
    q : (n,) array, base-first whole-body positions
    frames : optional precomputed `arm_frames(model, q[3:])`

    Returns
    -------
    Pose with canonical unit quaternion.
    """
    q = model.check_q(q)
    if frames is None:
        frames = arm_frames(model, q[N_BASE:])
    p_b, R_b = base_transform(q)
    R_m = R_b @ quat_to_matrix(model.mount_quat)
    p_m = p_b + R_b @ model.mount_pos
    pos = p_m + R_m @ frames.ee_pos
    rot = R_m @ frames.ee_R
    return Pose(pos, matrix_to_quat(rot))


def whole_body_jacobian(model: RobotModel, q, frames: ArmFrames | None = None) -> np.ndarray:
    """6xn geometric Jacobian in the world frame, rows [linear; angular],
    columns base(x, y, yaw) then arm joints."""
    q = model.check_q(q)
    if frames is None:
        frames = arm_frames(model, q[N_BASE:])
    p_b, R_b = base_transform(q)
    R_m = R_b @ quat_to_matrix(model.mount_quat)
    p_m = p_b + R_b @ model.mount_pos
    p_e = p_m + R_m @ frames.ee_pos

    n = model.n
    J = np.zeros((6, n))
    J[0, 0] = 1.0
    J[1, 1] = 1.0
    ez = np.array([0.0, 0.0, 1.0])
    J[:3, 2] = np.cross(ez, p_e - p_b)
    J[3:, 2] = ez
    z_w = frames.z @ R_m.T  # rows: axes in world
    p_w = frames.p @ R_m.T + p_m
    J[:3, N_BASE:] = np.cross(z_w, p_e - p_w).T
    J[3:, N_BASE:] = z_w.T
    return J


def arm_jacobian(model: RobotModel, q_a, frames: ArmFrames | None = None) -> np.ndarray:
    """6xn_a geometric Jacobian of the arm chain in the arm-base frame."""
    q_a = model.check_q_arm(q_a)
    if frames is None:
        frames = arm_frames(model, q_a)
    J = np.zeros((6, model.n_arm))
    J[:3] = np.cross(frames.z, frames.ee_pos - frames.p).T
    J[3:] = frames.z.T
    return J


def manipulability(J_a) -> float:
    """sqrt(det(J_a J_a^T)); 0 when the determinant is negative within noise."""
    J_a = np.asarray(J_a, dtype=float)
    d = float(np.linalg.det(J_a @ J_a.T))
    if d < 1e-14:
        return 0.0
    return float(np.sqrt(d))


# ---------------------------------------------------------------------------
# model files


def _parse_vec(raw: str, n: int, path: str) -> np.ndarray:
    parts = raw.split()
    if len(parts) != n:
        raise ModelError(f"{path}: expected {n} numbers, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ModelError(f"{path}: {exc}") from None


def _parse_inertia(raw: str, path: str) -> np.ndarray:
    parts = [float(p) for p in raw.split()]
    if len(parts) == 3:
        return np.diag(parts)
    if len(parts) == 6:
        xx, yy, zz, xy, xz, yz = parts
        return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
    raise ModelError(f"{path}: inertia needs 3 (diagonal) or 6 (xx yy zz xy xz yz) numbers")


def _model_from_parser(cp: configparser.ConfigParser) -> RobotModel:
    if "robot" not in cp:
        raise ModelError("missing [robot] section")
    rob = cp["robot"]
    name = rob.get("name", "unnamed")

    def section_pose(section: str):
        if section in cp:
            pos = _parse_vec(cp[section].get("pos", "0 0 0"), 3, f"{section}.pos")
            quat = _parse_vec(cp[section].get("quat", "1 0 0 0"), 4, f"{section}.quat")
        else:
            pos, quat = np.zeros(3), IDENTITY_QUAT.copy()
        return pos, quat

    mount_pos, mount_quat = section_pose("mount")
    tool_pos, tool_quat = section_pose("tool")

    joint_sections = sorted(
        (s for s in cp.sections() if s.startswith("joint.")),
        key=lambda s: int(s.split(".", 1)[1]),
    )
    if not joint_sections:
        raise ModelError("model file defines no [joint.N] sections")
    joints = []
    for s in joint_sections:
        sec = cp[s]
        for key in ("axis", "pos", "mass", "com", "inertia"):
            if key not in sec:
                raise ModelError(f"{s}: missing required key '{key}'")
        joints.append(
            ArmJoint(
                axis=_parse_vec(sec["axis"], 3, f"{s}.axis"),
                origin=_parse_vec(sec["pos"], 3, f"{s}.pos"),
                orientation=_parse_vec(sec.get("quat", "1 0 0 0"), 4, f"{s}.quat"),
                mass=float(sec["mass"]),
                com=_parse_vec(sec["com"], 3, f"{s}.com"),
                inertia=_parse_inertia(sec["inertia"], f"{s}.inertia"),
                armature=float(sec.get("armature", "0")),
            )
        )

    n_a = len(joints)
    q_home = (
        _parse_vec(rob["q_home"], n_a, "robot.q_home") if "q_home" in rob else np.zeros(n_a)
    )
    return RobotModel(
        name=name,
        joints=tuple(joints),
        mount_pos=mount_pos,
        mount_quat=mount_quat,
        tool_pos=tool_pos,
        tool_quat=tool_quat,
        payload_limit=float(rob.get("payload_limit", "0")),
        q_home=q_home,
        vel_limit_base=float(rob.get("vel_limit_base", "1.0")),
        vel_limit_arm=float(rob.get("vel_limit_arm", "2.0")),
    )


def load_robot_model_text(text: str) -> RobotModel:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_file(io.StringIO(text))
    return _model_from_parser(cp)


def load_robot_model(path: str) -> RobotModel:
    """Load a robot from a declarative text file (INI sections per joint)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ModelError(f"cannot read model file: {path}")
    return _model_from_parser(cp)


# 7-DoF torque-controlled arm on the heavy omnidirectional base.
_MOCA_LIKE = """
[robot]
name = moca-like
payload_limit = 3.0
q_home = 0.0 0.5 0.0 -1.3 0.0 0.8 0.0

[mount]
pos = 0 0 0.5

[tool]
pos = 0 0 0.10

[joint.1]
axis = 0 0 1
pos = 0 0 0.15
mass = 3.5
com = 0 0 0.10
inertia = 0.030 0.030 0.010
armature = 0.15

[joint.2]
axis = 0 1 0
pos = 0 0 0.15
mass = 3.5
com = 0 0 0.10
inertia = 0.030 0.030 0.010
armature = 0.15

[joint.3]
axis = 0 0 1
pos = 0 0 0.20
mass = 2.5
com = 0 0 0.10
inertia = 0.020 0.020 0.008
armature = 0.12

[joint.4]
axis = 0 -1 0
pos = 0 0 0.20
mass = 2.5
com = 0 0 0.10
inertia = 0.020 0.020 0.008
armature = 0.12

[joint.5]
axis = 0 0 1
pos = 0 0 0.20
mass = 2.0
com = 0 0 0.08
inertia = 0.012 0.012 0.005
armature = 0.08

[joint.6]
axis = 0 1 0
pos = 0 0 0.15
mass = 1.5
com = 0 0 0.06
inertia = 0.008 0.008 0.003
armature = 0.06

[joint.7]
axis = 0 0 1
pos = 0 0 0.10
mass = 0.8
com = 0 0 0.03
inertia = 0.003 0.003 0.002
armature = 0.05"""

# 6-DoF velocity-controlled arm rated for heavy payloads.
_KAIROS_LIKE = """
[robot]
name = kairos-like
payload_limit = 16.0
q_home = 0.0 0.5 1.1 -0.6 1.57 0.0

[mount]
pos = 0 0 0.5

[tool]
pos = 0 0 0.12

[joint.1]
axis = 0 0 1
pos = 0 0 0.12
mass = 7.5
com = 0 0 0.08
inertia = 0.080 0.080 0.040
armature = 0.35

[joint.2]
axis = 0 1 0
pos = 0 0 0.10
mass = 10.0
com = 0 0 0.22
inertia = 0.300 0.300 0.050
armature = 0.35

[joint.3]
axis = 0 1 0
pos = 0 0 0.45
mass = 5.0
com = 0 0 0.18
inertia = 0.120 0.120 0.020
armature = 0.25

[joint.4]
axis = 0 1 0
pos = 0 0 0.40
mass = 2.0
com = 0 0 0.06
inertia = 0.010 0.010 0.006
armature = 0.12

[joint.5]
axis = 0 0 1
pos = 0 0 0.12
mass = 2.0
com = 0 0 0.05
inertia = 0.008 0.008 0.004
armature = 0.12

[joint.6]
axis = 0 1 0
pos = 0 0 0.10
mass = 1.5
com = 0 0 0.04
inertia = 0.005 0.005 0.003
armature = 0.1"""

_BUILTINS = {"moca-like": _MOCA_LIKE, "kairos-like": _KAIROS_LIKE}


def builtin_model_names() -> tuple:
    return tuple(sorted(_BUILTINS))


def builtin_model(name: str) -> RobotModel:
    """One of the embedded models: 'moca-like' or 'kairos-like'."""
    if name not in _BUILTINS:
        raise ModelError(f"unknown built-in model '{name}' (have: {', '.join(sorted(_BUILTINS))})")
    return load_robot_model_text(_BUILTINS[name])
