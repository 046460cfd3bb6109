"""Admittance-type human command interface.

The operator's wrench is turned into a desired end-effector motion by the
virtual admittance M_adm * ddx_d + D_adm * dx_d = wrench, integrated
semi-implicitly at the control rate. Four buttons mutate the session state:

    A  toggle the admittance interface on/off
    M  toggle translation-only vs roto-translation motion
    G  open/close the gripper (payload attach in the simulator)
    P  switch motion priority between manipulation and locomotion

Wrench and desired motion are expressed in the world frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, NotPositiveDefinite
from .geometry import quat_exp, quat_mul
from .model import JointState, Pose, Twist, Wrench

TRANSLATION = "translation"
ROTO_TRANSLATION = "roto-translation"
MANIPULATION = "manipulation"
LOCOMOTION = "locomotion"

BUTTONS = ("A", "M", "G", "P")


@dataclass(frozen=True)
class AdmittanceParams:
    """Diagonal virtual mass/damping of the command-side admittance.

    Defaults are the user-study trade-off values: 6 kg / 20 N s/m on the
    translational channels, 1 kg m^2 / 1.5 N m s/rad on the rotational ones.
    """

    mass: np.ndarray = field(default_factory=lambda: np.array([6.0, 6.0, 6.0, 1.0, 1.0, 1.0]))
    damping: np.ndarray = field(
        default_factory=lambda: np.array([20.0, 20.0, 20.0, 1.5, 1.5, 1.5])
    )

    def __post_init__(self):
        object.__setattr__(self, "mass", np.asarray(self.mass, dtype=float).reshape(6))
        object.__setattr__(self, "damping", np.asarray(self.damping, dtype=float).reshape(6))
        if np.any(self.mass <= 0.0) or np.any(self.damping <= 0.0):
            raise NotPositiveDefinite("admittance mass/damping must be strictly positive")

    def time_constants(self) -> np.ndarray:
        return self.mass / self.damping


@dataclass(frozen=True)
class InterfaceState:
    """Session state owned by the interface; advanced only through
    `admittance_step` and `handle_button`."""

    x_d: Pose
    dx_d: Twist
    q_pref: np.ndarray
    admittance_active: bool = True
    motion_mode: str = ROTO_TRANSLATION
    gripper_closed: bool = False
    priority: str = MANIPULATION
    fault: bool = False

    def __post_init__(self):
        object.__setattr__(self, "q_pref", np.asarray(self.q_pref, dtype=float).reshape(-1))
        if self.motion_mode not in (TRANSLATION, ROTO_TRANSLATION):
            raise ValueError(f"unknown motion mode '{self.motion_mode}'")
        if self.priority not in (MANIPULATION, LOCOMOTION):
            raise ValueError(f"unknown priority '{self.priority}'")

    @staticmethod
    def initial(x0: Pose, q_pref) -> "InterfaceState":
        return InterfaceState(x_d=x0.copy(), dx_d=Twist.zero(), q_pref=q_pref)


def admittance_step(
    params: AdmittanceParams, state: InterfaceState, human_wrench: Wrench, dt: float
) -> InterfaceState:
    """One semi-implicit integration step of the admittance law.

    Velocity first: dx' = (dx + dt M^-1 lam) / (1 + dt M^-1 D), elementwise
    on the diagonal channels; then the pose, with the orientation advanced
    by the quaternion exponential of the world angular velocity.

    A non-finite wrench leaves the motion state untouched and raises the
    fault flag; translation mode gates both the torque input and the
    angular velocity to zero.
    """
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
    lam = human_wrench.as_array()
    if not np.all(np.isfinite(lam)):
        return replace(state, fault=True)
    if not state.admittance_active:
        return replace(state, dx_d=Twist.zero(), fault=False)

    v = state.dx_d.as_array()
    if state.motion_mode == TRANSLATION:
        lam = lam.copy()
        lam[3:] = 0.0
        v = v.copy()
        v[3:] = 0.0
    ratio = dt / params.mass
    v_new = (v + ratio * lam) / (1.0 + ratio * params.damping)
    pos = state.x_d.position + dt * v_new[:3]
    if state.motion_mode == TRANSLATION:
        quat = state.x_d.orientation.copy()
    else:
        quat = quat_mul(quat_exp(dt * v_new[3:]), state.x_d.orientation)
    return replace(
        state,
        x_d=Pose(pos, quat),
        dx_d=Twist(v_new[:3], v_new[3:]),
        fault=False,
    )


def handle_button(
    state: InterfaceState, button: str, current_q: JointState, current_pose: Pose
) -> InterfaceState:
    """Apply one button press.

    `current_q` feeds the preferred-configuration capture on a
    manipulation-to-locomotion switch; `current_pose` is the measured
    end-effector pose the reference re-anchors to when the interface is
    switched off.
    """
    if button == "A":
        active = not state.admittance_active
        if not active:
            return replace(
                state, admittance_active=False, dx_d=Twist.zero(), x_d=current_pose.copy()
            )
        return replace(state, admittance_active=True)
    if button == "M":
        mode = ROTO_TRANSLATION if state.motion_mode == TRANSLATION else TRANSLATION
        dx = state.dx_d
        if mode == TRANSLATION:
            dx = Twist(dx.linear.copy(), np.zeros(3))
        return replace(state, motion_mode=mode, dx_d=dx)
    if button == "G":
        return replace(state, gripper_closed=not state.gripper_closed)
    if button == "P":
        if state.priority == MANIPULATION:
            if current_q.q.shape != state.q_pref.shape:
                raise DimensionError("current_q does not match the stored q_pref length")
            return replace(state, priority=LOCOMOTION, q_pref=current_q.q.copy())
        return replace(state, priority=MANIPULATION)
    raise ValueError(f"unknown button '{button}' (expected one of {BUTTONS})")
