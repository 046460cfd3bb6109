"""Weighted closed-loop inverse differential kinematics control.

Velocity-interface counterpart of the impedance controller: the primary task
tracks the desired end-effector motion through damped, weighted least
squares

    dq_d1 = (J^T W1 J + W2)^-1 J^T W1 (dx_d + K err(x_d, x))

where W2 = diag(w_b 1_nb, w_a k^2 1_na) regularizes the solution and the
damping factor k grows as the arm approaches a singular posture (measured by
the manipulability w). A secondary posture task is projected through the
null space of J.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionError, NotPositiveDefinite
from .interface import LOCOMOTION, MANIPULATION, InterfaceState
from .model import (
    N_BASE,
    JointState,
    RobotModel,
    arm_frames,
    arm_jacobian,
    fk_ee,
    manipulability,
    pose_error,
    whole_body_jacobian,
)


@dataclass(frozen=True)
class ClikParams:
    """Gains and weights of the differential-kinematics tracker.

    `K` closes the pose loop [1/s]; `W1` weights tracking residuals;
    `w_b`/`w_a` price base/arm velocity; `k0`/`w_t` shape the singularity
    damping schedule; `k_i` drives the secondary posture task (zero in
    manipulation priority).
    """

    n_arm: int
    K: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5, 0.5, 0.05, 0.01, 0.01]))
    W1: np.ndarray = field(
        default_factory=lambda: np.array([1000.0, 1000.0, 1000.0, 500.0, 500.0, 500.0])
    )
    w_b: float = 100.0
    w_a: float = 1.0
    k0: float = 2.0
    w_t: float = 1e-3
    k_i: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "K", np.asarray(self.K, dtype=float).reshape(6))
        object.__setattr__(self, "W1", np.asarray(self.W1, dtype=float).reshape(6))
        if np.any(self.K < 0):
            raise NotPositiveDefinite("pose feedback gains must be non-negative")
        if np.any(self.W1 <= 0):
            raise NotPositiveDefinite("tracking weight W1 must be positive definite")
        if self.w_b < 0 or self.w_a < 0 or self.k_i < 0 or self.k0 < 0:
            raise NotPositiveDefinite("weights must be non-negative")
        if not self.w_t > 0:
            raise NotPositiveDefinite("manipulability threshold w_t must be positive")

    @property
    def n(self) -> int:
        return N_BASE + self.n_arm

    @staticmethod
    def for_priority(n_arm: int, priority: str = MANIPULATION, **overrides) -> "ClikParams":
        """locomotion: (w_b, w_a, k_i) = (10, 0.5, 1); manipulation: (100, 1, 0)."""
        if priority == MANIPULATION:
            values = dict(w_b=100.0, w_a=1.0, k_i=0.0)
        elif priority == LOCOMOTION:
            values = dict(w_b=10.0, w_a=0.5, k_i=1.0)
        else:
            raise ValueError(f"unknown priority '{priority}'")
        values.update(overrides)
        return ClikParams(n_arm=n_arm, **values)


def damping_factor(w: float, params: ClikParams) -> float:
    """k = 1 + k0 (1 - w/w_t)^2 below the manipulability threshold, else 1."""
    if w < 0:
        raise ValueError("manipulability cannot be negative")
    if w > params.w_t:
        return 1.0
    ratio = 1.0 - w / params.w_t
    return 1.0 + params.k0 * ratio * ratio


def regularization_weight(params: ClikParams, k: float) -> np.ndarray:
    """W2 = diag(w_b 1_nb, w_a k^2 1_na) as a vector of diagonal entries."""
    if k < 1.0:
        raise ValueError("damping factor k must be >= 1")
    return np.concatenate(
        [np.full(N_BASE, params.w_b), np.full(params.n_arm, params.w_a * k * k)]
    )


def primary_velocity(
    J: np.ndarray, params: ClikParams, W2: np.ndarray, x, x_d, dx_d
) -> np.ndarray:
    """Minimizer of the damped weighted tracking cost."""
    v_ref = dx_d.as_array() + params.K * pose_error(x_d, x)
    JtW1 = J.T * params.W1[None, :]
    A = JtW1 @ J + np.diag(W2)
    return cho_solve(cho_factor(0.5 * (A + A.T)), JtW1 @ v_ref)


def secondary_velocity(params: ClikParams, q, q_pref) -> np.ndarray:
    """Posture-restoring joint velocity; the base block is always zero."""
    q = np.asarray(q, dtype=float)
    q_pref = np.asarray(q_pref, dtype=float)
    if q.shape != q_pref.shape or q.shape != (params.n,):
        raise DimensionError("q and q_pref must match the parameter dimension")
    out = params.k_i * (q_pref - q)
    out[:N_BASE] = 0.0
    return out


def nullspace_project(J: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(I - pinv(J) J) v with SVD truncation at 1e-8 of the top singular value."""
    v = np.asarray(v, dtype=float)
    return v - np.linalg.pinv(J, rcond=1e-8) @ (J @ v)


def clamp_velocity(model: RobotModel, dq: np.ndarray) -> np.ndarray:
    """Per-joint saturation at the model velocity limits."""
    out = dq.copy()
    out[:N_BASE] = np.clip(out[:N_BASE], -model.vel_limit_base, model.vel_limit_base)
    out[N_BASE:] = np.clip(out[N_BASE:], -model.vel_limit_arm, model.vel_limit_arm)
    return out


def clik_step(
    model: RobotModel,
    params: ClikParams,
    state: JointState,
    interface: InterfaceState,
    clamp: bool = True,
    frames=None,
) -> np.ndarray:
    """Whole-body desired joint velocity for one control tick."""
    q = model.check_q(state.q)
    if frames is None:
        frames = arm_frames(model, q[N_BASE:])
    J = whole_body_jacobian(model, q, frames)
    w = manipulability(arm_jacobian(model, q[N_BASE:], frames))
    k = damping_factor(w, params)
    W2 = regularization_weight(params, k)
    x = fk_ee(model, q, frames)
    dq_d = primary_velocity(J, params, W2, x, interface.x_d, interface.dx_d)
    if params.k_i > 0.0:
        dq_d = dq_d + nullspace_project(J, secondary_velocity(params, q, interface.q_pref))
    if clamp:
        dq_d = clamp_velocity(model, dq_d)
    return dq_d
