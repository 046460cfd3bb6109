"""Weighted whole-body Cartesian impedance control.

The torque command realizes a desired end-effector impedance and distributes
the effort between base and arm through a configurable weighting metric:

    tau_c = W^-1 M^-1 J^T Lambda_W Lambda^-1 F
            + (I - W^-1 M^-1 J^T Lambda_W J M^-1) tau_0

with W = H^T M^-1 H, H = diag(eta_B I_3, eta_A I_na). Among all torques that
produce the task wrench F through the dynamically consistent transpose,
tau_c (tau_0 = 0) is the minimizer of tau^T W tau, so large eta_B makes base
motion expensive and pushes effort to the arm, and vice versa.

Base torques are not applied directly: the virtual admittance
M_v ddq_b + D_v dq_b = tau_v turns them into velocity commands for the
velocity-controlled base.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import BaseVirtualParams
from .errors import DimensionError, NotPositiveDefinite, SingularityError
from .interface import LOCOMOTION, MANIPULATION
from .model import N_BASE, Pose, Twist, Wrench, pose_error

# Tikhonov ridge applied to the 6x6 task-space kernels near singularities
RIDGE = 1e-6
SV_FLOOR = 1e-10


@dataclass(frozen=True)
class ImpedanceParams:
    """Gains of the Cartesian impedance and its null-space posture task.

    Diagonals are stored as vectors. `K_0`/`D_0` are whole-body length with
    the base block exactly zero: the posture task never drags the base.
    """

    K_d: np.ndarray
    D_d: np.ndarray
    K_0: np.ndarray
    D_0: np.ndarray
    eta_b: float
    eta_a: float
    xi: float = 0.7
    base: BaseVirtualParams = field(default_factory=BaseVirtualParams)

    def __post_init__(self):
        object.__setattr__(self, "K_d", np.asarray(self.K_d, dtype=float).reshape(6))
        object.__setattr__(self, "D_d", np.asarray(self.D_d, dtype=float).reshape(6))
        object.__setattr__(self, "K_0", np.asarray(self.K_0, dtype=float).reshape(-1))
        object.__setattr__(self, "D_0", np.asarray(self.D_0, dtype=float).reshape(-1))
        if np.any(self.K_d < 0) or np.any(self.D_d < 0):
            raise NotPositiveDefinite("Cartesian gains must be non-negative")
        if self.K_0.shape != self.D_0.shape:
            raise DimensionError("K_0 and D_0 must have equal length")
        if np.any(self.K_0[:N_BASE] != 0.0) or np.any(self.D_0[:N_BASE] != 0.0):
            raise NotPositiveDefinite("posture gain base block must be exactly zero")
        if np.any(self.K_0 < 0) or np.any(self.D_0 < 0):
            raise NotPositiveDefinite("posture gains must be non-negative")
        if self.eta_b <= 0 or self.eta_a <= 0:
            raise NotPositiveDefinite("weight penalties eta must be strictly positive")

    @property
    def n(self) -> int:
        return self.K_0.size

    @staticmethod
    def for_priority(
        n_arm: int,
        priority: str = MANIPULATION,
        xi: float = 0.7,
        K_d=None,
        base: BaseVirtualParams | None = None,
    ) -> "ImpedanceParams":
        """Default gain set for a priority mode.

        manipulation: eta = (5, 1), arm posture stiffness 5;
        locomotion:   eta = (1, 6), arm posture stiffness 50 so the base
        follows the arm.
        """
        if priority == MANIPULATION:
            eta_b, eta_a, k0_arm = 5.0, 1.0, 5.0
        elif priority == LOCOMOTION:
            eta_b, eta_a, k0_arm = 1.0, 6.0, 50.0
        else:
            raise ValueError(f"unknown priority '{priority}'")
        K_d = np.array([500.0] * 3 + [30.0] * 3) if K_d is None else np.asarray(K_d, float)
        K_0 = np.concatenate([np.zeros(N_BASE), np.full(n_arm, k0_arm)])
        return ImpedanceParams(
            K_d=K_d,
            D_d=2.0 * xi * np.sqrt(K_d),
            K_0=K_0,
            D_0=2.0 * xi * np.sqrt(K_0),
            eta_b=eta_b,
            eta_a=eta_a,
            xi=xi,
            base=base if base is not None else BaseVirtualParams(),
        )


def cartesian_wrench(params: ImpedanceParams, x: Pose, dx: Twist, x_d: Pose, dx_d: Twist) -> Wrench:
    """F = D_d (dx_d - dx) + K_d err(x_d, x)."""
    F = params.D_d * (dx_d.as_array() - dx.as_array()) + params.K_d * pose_error(x_d, x)
    return Wrench(F[:3], F[3:])


def _spd_inverse(M: np.ndarray, label: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{label} must be square")
    if np.abs(M - M.T).max() > 1e-9 * (1.0 + np.abs(M).max()):
        raise NotPositiveDefinite(f"{label} must be symmetric")
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{label} must be positive definite") from None
    Linv = np.linalg.inv(L)
    return Linv.T @ Linv


def weight_matrix(M: np.ndarray, eta_b: float, eta_a: float) -> np.ndarray:
    """W = H^T M^-1 H with H = diag(eta_b I_3, eta_a I_na); SPD by construction."""
    Minv = _spd_inverse(M, "inertia matrix")
    n = M.shape[0]
    h = np.concatenate([np.full(N_BASE, eta_b), np.full(n - N_BASE, eta_a)])
    W = h[:, None] * Minv * h[None, :]
    return 0.5 * (W + W.T)


def _inv_6x6(A: np.ndarray, regularize: bool):
    """Inverse of a symmetric PSD 6x6 task kernel with a singularity gate."""
    A = 0.5 * (A + A.T)
    sv = np.linalg.eigvalsh(A)
    if sv[0] <= SV_FLOOR:
        if not regularize:
            raise SingularityError(max(sv[0], 0.0))
        A = A + RIDGE * np.eye(A.shape[0])
    Ainv = np.linalg.inv(A)
    return 0.5 * (Ainv + Ainv.T)


def weighted_task_inertias(
    J: np.ndarray, M: np.ndarray, W: np.ndarray, regularize: bool = False
):
    """(Lambda, Lambda_W, Jbar).

    Lambda = (J M^-1 J^T)^-1, Jbar = M^-1 J^T Lambda,
    Lambda_W = (J M^-1 W^-1 M^-1 J^T)^-1 — the generalization of the
    square-Jacobian form J^-T M W M J^-1 to redundant robots.
    """
    Minv = _spd_inverse(M, "inertia matrix")
    Winv = _spd_inverse(W, "weight matrix")
    JMinv = J @ Minv
    Lam = _inv_6x6(JMinv @ J.T, regularize)
    Lam_W = _inv_6x6(JMinv @ Winv @ JMinv.T, regularize)
    Jbar = Minv @ J.T @ Lam
    return Lam, Lam_W, Jbar


def nullspace_torque(params: ImpedanceParams, q, dq, q_pref) -> np.ndarray:
    """tau_0 = -D_0 dq + K_0 (q_pref - q); base components are zero."""
    q = np.asarray(q, dtype=float)
    dq = np.asarray(dq, dtype=float)
    q_pref = np.asarray(q_pref, dtype=float)
    if not (q.shape == dq.shape == q_pref.shape == (params.n,)):
        raise DimensionError("q, dq, q_pref must all match the parameter dimension")
    return -params.D_0 * dq + params.K_0 * (q_pref - q)


def whole_body_torque(
    J: np.ndarray,
    M: np.ndarray,
    W: np.ndarray,
    F: np.ndarray,
    tau_0: np.ndarray,
    regularize: bool = False,
) -> np.ndarray:
    """Task torque plus weighted-null-space posture torque.

    The returned tau_c satisfies Jbar^T tau_c = F for any tau_0.
    """
    F = np.asarray(F, dtype=float).reshape(6)
    tau_0 = np.asarray(tau_0, dtype=float)
    Minv = _spd_inverse(M, "inertia matrix")
    Winv = _spd_inverse(W, "weight matrix")
    JMinv = J @ Minv
    A = JMinv @ J.T
    Lam = _inv_6x6(A, regularize)
    Lam_W = _inv_6x6(JMinv @ Winv @ JMinv.T, regularize)
    G = Winv @ JMinv.T @ Lam_W  # n x 6 weighted generalized transpose-inverse
    tau_task = G @ (A @ F)  # Lambda^-1 F = (J M^-1 J^T) F
    return tau_task + tau_0 - G @ (JMinv @ tau_0)


def base_torque_to_velocity(
    base: BaseVirtualParams, tau_v: np.ndarray, dq_b: np.ndarray, dt: float
) -> np.ndarray:
    """Virtual base admittance M_v ddq_b + D_v dq_b = tau_v, one
    semi-implicit step; the result is the base velocity command."""
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
    tau_v = np.asarray(tau_v, dtype=float).reshape(3)
    dq_b = np.asarray(dq_b, dtype=float).reshape(3)
    ratio = dt / base.mass
    return (dq_b + ratio * tau_v) / (1.0 + ratio * base.damping)
