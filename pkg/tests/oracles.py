"""Independent oracle implementations used to cross-check the package.

Everything here is deliberately written on a different code path from
src/locomanip: homogeneous 4x4 matrices and scipy Rotations instead of
quaternion chains, dense KKT solves instead of the controller's closed form,
stacked least squares instead of normal equations. Tests freeze expected
values against these routes.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation


# ---------------------------------------------------------------------------
# homogeneous-transform forward kinematics


def _homog(rot: np.ndarray, trans) -> np.ndarray:
    T = np.eye(4)
    T[:3, :3] = rot
    T[:3, 3] = np.asarray(trans, dtype=float)
    return T


def _quat_to_rot(q_wxyz) -> np.ndarray:
    w, x, y, z = q_wxyz
    return Rotation.from_quat([x, y, z, w]).as_matrix()


def fk_matrix_oracle(model, q) -> np.ndarray:
    """World EE pose of a whole-body state as a 4x4 homogeneous matrix.

    Walks the same model description as the package but composes plain
    matrix products: base planar pose * mount * per-joint (fixed * rotation)
    * tool.
    """
    q = np.asarray(q, dtype=float)
    bx, by, yaw = q[0], q[1], q[2]
    T = _homog(Rotation.from_euler("z", yaw).as_matrix(), [bx, by, 0.0])
    T = T @ _homog(_quat_to_rot(model.mount_quat), model.mount_pos)
    for joint, angle in zip(model.joints, q[3:]):
        T = T @ _homog(_quat_to_rot(joint.orientation), joint.origin)
        T = T @ _homog(Rotation.from_rotvec(angle * np.asarray(joint.axis)).as_matrix(), [0, 0, 0])
    T = T @ _homog(_quat_to_rot(model.tool_quat), model.tool_pos)
    return T


def arm_fk_matrix_oracle(model, q_a, upto: int | None = None) -> np.ndarray:
    """Arm-only FK in the arm-base (mount) frame.

    With `upto=k` the chain stops after k joints and the tool transform is
    omitted, giving the frame of link k.
    """
    T = np.eye(4)
    for joint, angle in zip(model.joints[:upto], np.asarray(q_a, dtype=float)):
        T = T @ _homog(_quat_to_rot(joint.orientation), joint.origin)
        T = T @ _homog(Rotation.from_rotvec(angle * np.asarray(joint.axis)).as_matrix(), [0, 0, 0])
    if upto is None:
        T = T @ _homog(_quat_to_rot(model.tool_quat), model.tool_pos)
    return T


# ---------------------------------------------------------------------------
# finite-difference Jacobians


def _pose_delta(T_plus: np.ndarray, T_minus: np.ndarray, step: float) -> np.ndarray:
    """6-vector [dp; dtheta]/step between two close poses."""
    dp = (T_plus[:3, 3] - T_minus[:3, 3]) / step
    R_rel = T_plus[:3, :3] @ T_minus[:3, :3].T
    dth = Rotation.from_matrix(R_rel).as_rotvec() / step
    return np.concatenate([dp, dth])


def jacobian_fd_oracle(fk, q, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference geometric Jacobian of a matrix-valued fk(q)."""
    q = np.asarray(q, dtype=float)
    cols = []
    for j in range(q.size):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        cols.append(_pose_delta(fk(qp), fk(qm), 2.0 * h))
    return np.stack(cols, axis=1)


def rotvec_between(R_target: np.ndarray, R_current: np.ndarray) -> np.ndarray:
    """Axis-angle vector of the rotation taking R_current onto R_target."""
    return Rotation.from_matrix(R_target @ R_current.T).as_rotvec()


# ---------------------------------------------------------------------------
# quadratic programs / least squares


def kkt_equality_qp(A: np.ndarray, B: np.ndarray, f: np.ndarray) -> np.ndarray:
    """argmin 0.5 tau' A tau  s.t.  B' tau = f, by a dense KKT solve.

    A is (n, n) SPD, B is (n, m) with full column rank, f is (m,).
    """
    n, m = B.shape
    K = np.zeros((n + m, n + m))
    K[:n, :n] = A
    K[:n, n:] = B
    K[n:, :n] = B.T
    rhs = np.concatenate([np.zeros(n), f])
    sol = np.linalg.solve(K, rhs)
    return sol[:n]


def stacked_wls(J: np.ndarray, w1: np.ndarray, w2: np.ndarray, v: np.ndarray) -> np.ndarray:
    """argmin |sqrt(W1)(J qd - v)|^2 + |sqrt(W2) qd|^2 via one lstsq call.

    w1, w2 are the diagonals. Rows are stacked so the normal equations are
    never formed explicitly.
    """
    m, n = J.shape
    top = np.sqrt(w1)[:, None] * J
    bottom = np.diag(np.sqrt(w2))
    A = np.vstack([top, bottom])
    b = np.concatenate([np.sqrt(w1) * v, np.zeros(n)])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return sol


def svd_nullspace_basis(J: np.ndarray, rcond: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of J."""
    _, s, Vt = np.linalg.svd(J)
    rank = int(np.sum(s > rcond * s[0])) if s.size else 0
    return Vt[rank:].T


# ---------------------------------------------------------------------------
# closed forms


def first_order_step_response(lam: float, m: float, d: float, t: float) -> float:
    """v(t) of m*dv/dt + d*v = lam from rest: (lam/d)(1 - exp(-d t / m))."""
    return (lam / d) * (1.0 - np.exp(-d * t / m))


def pendulum_gravity_torque(mass: float, length: float, q: float, g: float = 9.81) -> float:
    """Single link, horizontal axis, com at `length` along the link."""
    return mass * g * length * np.cos(q)
