"""Arm rigid-body dynamics and the block-diagonal whole-body model.

The arm chain is evaluated in the arm-base frame. The base is planar and yaw
is about the world z axis, so the gravity vector seen by the arm is
independent of the base pose: g_arm = R_mount^T (0, 0, -g0).

The base itself contributes no gravity or Coriolis terms; its virtual mass
and damping play the inertia/velocity-force roles in the whole-body model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotPositiveDefinite
from .geometry import quat_to_matrix, skew
from .model import ArmFrames, RobotModel, arm_frames

GRAVITY = 9.81


@dataclass(frozen=True)
class BaseVirtualParams:
    """Diagonal virtual mass/damping of the velocity-controlled base."""

    mass: np.ndarray = field(default_factory=lambda: np.array([105.0, 105.0, 21.0]))
    damping: np.ndarray = field(default_factory=lambda: np.array([1050.0, 1050.0, 210.0]))

    def __post_init__(self):
        object.__setattr__(self, "mass", np.asarray(self.mass, dtype=float).reshape(3))
        object.__setattr__(self, "damping", np.asarray(self.damping, dtype=float).reshape(3))
        if np.any(self.mass <= 0.0) or np.any(self.damping <= 0.0):
            raise NotPositiveDefinite("base virtual mass/damping must be strictly positive")


@dataclass
class ArmDynamics:
    M: np.ndarray
    C: np.ndarray
    g: np.ndarray


@dataclass
class WholeBodyDynamics:
    M: np.ndarray
    cqd_plus_damping: np.ndarray
    g: np.ndarray


def gravity_vector(model: RobotModel, g0: float = GRAVITY) -> np.ndarray:
    """World gravity (0,0,-g0) expressed in the arm-base frame."""
    return quat_to_matrix(model.mount_quat).T @ np.array([0.0, 0.0, -g0])


def lump_point_mass(frames: ArmFrames, mass: float, point: np.ndarray) -> ArmFrames:
    """Frames with an extra point mass rigidly attached to the last link."""
    if mass <= 0.0:
        return frames
    m_old = frames.m[-1]
    m_new = m_old + mass
    c_new = (m_old * frames.c[-1] + mass * point) / m_new
    d_old = frames.c[-1] - c_new
    d_pt = point - c_new
    I_new = (
        frames.Iw[-1]
        + m_old * (d_old @ d_old * np.eye(3) - np.outer(d_old, d_old))
        + mass * (d_pt @ d_pt * np.eye(3) - np.outer(d_pt, d_pt))
    )
    m = frames.m.copy()
    c = frames.c.copy()
    Iw = frames.Iw.copy()
    m[-1], c[-1], Iw[-1] = m_new, c_new, I_new
    return ArmFrames(
        p=frames.p, z=frames.z, R=frames.R, c=c, Iw=Iw, m=m,
        armature=frames.armature, ee_pos=frames.ee_pos, ee_R=frames.ee_R,
    )


# ---------------------------------------------------------------------------
# mass matrix (composite-rigid-body accumulation)


def _suffix_sum(x: np.ndarray) -> np.ndarray:
    """out[i] = sum over j >= i of x[j], along axis 0."""
    return np.cumsum(x[::-1], axis=0)[::-1]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise cross product; avoids np.cross call overhead in hot loops."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


def arm_mass_matrix(frames: ArmFrames) -> np.ndarray:
    """Composite-rigid-body mass matrix: column j is the joint torque
    produced by a unit acceleration of joint j carrying links j..n-1."""
    m, c, p, z, Iw = frames.m, frames.c, frames.p, frames.z, frames.Iw
    n = m.size
    eye = np.eye(3)
    # composite bodies (links i..n-1): mass, COM, inertia about the COM
    comp_m = _suffix_sum(m)
    comp_c = _suffix_sum(m[:, None] * c) / comp_m[:, None]
    # parallel-axis through the arm-base origin and back to the composite COM
    about_origin = Iw + m[:, None, None] * (
        np.einsum("ij,ij->i", c, c)[:, None, None] * eye - np.einsum("ij,ik->ijk", c, c)
    )
    comp_I = _suffix_sum(about_origin) - comp_m[:, None, None] * (
        np.einsum("ij,ij->i", comp_c, comp_c)[:, None, None] * eye
        - np.einsum("ij,ik->ijk", comp_c, comp_c)
    )
    # unit-acceleration wrench of composite j at its joint origin
    f = comp_m[:, None] * _cross(z, comp_c - p)
    n_mom = np.einsum("ijk,ik->ij", comp_I, z) + _cross(comp_c - p, f)
    # M[i, j] = z_i . (n_j + (p_j - p_i) x f_j) for i <= j
    rel = p[None, :, :] - p[:, None, :]
    full = np.einsum("ik,jk->ij", z, n_mom) + np.einsum("ik,ijk->ij", z, _cross(rel, f[None, :, :]))
    upper = np.triu(full)
    return upper + np.triu(full, 1).T + np.diag(frames.armature)


def arm_gravity(frames: ArmFrames, g_vec: np.ndarray) -> np.ndarray:
    """Gravity torque vector (left-hand-side convention: M ddq + C dq + g = tau)."""
    # suffix sums: total mass and first moment of links i..n-1
    s_m = _suffix_sum(frames.m)
    s_mc = _suffix_sum(frames.m[:, None] * frames.c)
    moment = _cross(s_mc - s_m[:, None] * frames.p, g_vec)
    return -np.einsum("ij,ij->i", frames.z, moment)


# ---------------------------------------------------------------------------
# Coriolis matrix (Christoffel symbols of the analytic mass-matrix gradient)


def _link_jacobians(frames: ArmFrames):
    """Per-link COM Jacobians: Jv (nl,3,n) and Jw (nl,3,n)."""
    n = frames.m.size
    Jv = np.zeros((n, 3, n))
    Jw = np.zeros((n, 3, n))
    for i in range(n):
        for j in range(i + 1):
            Jv[i, :, j] = np.cross(frames.z[j], frames.c[i] - frames.p[j])
            Jw[i, :, j] = frames.z[j]
    return Jv, Jw


def mass_matrix_gradient(frames: ArmFrames) -> np.ndarray:
    """DM[k] = dM/dq_k, analytic.

    Built from the link-Jacobian form of M; the column derivatives follow
    from the rigid-chain rules dz_j/dq_k = z_k x z_j (k < j),
    dc_i/dq_k = z_k x (c_i - p_k) (k <= i), dp_j/dq_k = z_k x (p_j - p_k)
    (k < j), which collapse to the two cases below.
    """
    n = frames.m.size
    Jv, Jw = _link_jacobians(frames)
    DM = np.zeros((n, n, n))
    for k in range(n):
        z_k = frames.z[k]
        dJv = np.zeros((n, 3, n))
        dJw = np.zeros((n, 3, n))
        for i in range(k, n):
            for j in range(i + 1):
                if k < j:
                    dJv[i, :, j] = np.cross(z_k, Jv[i, :, j])
                    dJw[i, :, j] = np.cross(z_k, frames.z[j])
                elif j <= k:
                    dJv[i, :, j] = np.cross(frames.z[j], np.cross(z_k, frames.c[i] - frames.p[k]))
        Sk = skew(z_k)
        dMk = np.zeros((n, n))
        for i in range(n):
            m_i = frames.m[i]
            dMk += m_i * (dJv[i].T @ Jv[i] + Jv[i].T @ dJv[i])
            IwJ = frames.Iw[i] @ Jw[i]
            dMk += dJw[i].T @ IwJ + IwJ.T @ dJw[i]
            if k <= i:
                dIw = Sk @ frames.Iw[i] - frames.Iw[i] @ Sk
                dMk += Jw[i].T @ dIw @ Jw[i]
        DM[k] = dMk
    return DM


def coriolis_matrix(frames: ArmFrames, dq_a: np.ndarray) -> np.ndarray:
    """Christoffel-convention C(q, dq): C_ij = sum_k c_ijk dq_k."""
    dq_a = np.asarray(dq_a, dtype=float)
    DM = mass_matrix_gradient(frames)
    term1 = np.einsum("kij,k->ij", DM, dq_a)
    term2 = np.einsum("jik,k->ij", DM, dq_a)
    term3 = np.einsum("ijk,k->ij", DM, dq_a)
    return 0.5 * (term1 + term2 - term3)


# ---------------------------------------------------------------------------
# recursive Newton-Euler bias (fast path for the plant)


def rnea_bias(frames: ArmFrames, dq_a: np.ndarray, g_vec: np.ndarray) -> np.ndarray:
    """C(q,dq) dq + g in one O(n) pass (zero joint accelerations).

    Gravity enters through the standard trick of accelerating the base by
    -g_vec; pass a zero vector for the pure velocity product. Both the
    forward recursions (cumulative sums along the chain) and the backward
    force/moment accumulation (suffix sums about the arm-base origin) are
    expressed in batched array form.
    """
    m, c, p, z, Iw = frames.m, frames.c, frames.p, frames.z, frames.Iw
    n = m.size
    dq_a = np.asarray(dq_a, dtype=float)

    def prev(x):
        out = np.zeros_like(x)
        out[1:] = x[:-1]
        return out

    zdq = z * dq_a[:, None]
    omega = np.cumsum(zdq, axis=0)
    omega_prev = prev(omega)
    alpha = np.cumsum(_cross(omega_prev, zdq), axis=0)
    alpha_prev = prev(alpha)
    r = np.zeros_like(p)
    r[1:] = p[1:] - p[:-1]
    step = _cross(alpha_prev, r) + _cross(omega_prev, _cross(omega_prev, r))
    a_joint = -np.asarray(g_vec, dtype=float)[None, :] + np.cumsum(step, axis=0)
    r_c = c - p
    a_com = a_joint + _cross(alpha, r_c) + _cross(omega, _cross(omega, r_c))

    F = m[:, None] * a_com
    N = np.einsum("ijk,ik->ij", Iw, alpha) + _cross(omega, np.einsum("ijk,ik->ij", Iw, omega))
    f_suf = _suffix_sum(F)
    moment_suf = _suffix_sum(N + _cross(c, F))
    n_vec = moment_suf - _cross(p, f_suf)
    return np.einsum("ij,ij->i", z, n_vec)


# ---------------------------------------------------------------------------
# energies


def potential_energy(frames: ArmFrames, g_vec: np.ndarray) -> float:
    return float(-np.sum(frames.m[:, None] * g_vec[None, :] * frames.c))


def kinetic_energy(frames: ArmFrames, dq_a: np.ndarray) -> float:
    M = arm_mass_matrix(frames)
    dq_a = np.asarray(dq_a, dtype=float)
    return float(0.5 * dq_a @ M @ dq_a)


def mechanical_energy(model: RobotModel, q_a, dq_a, g0: float = GRAVITY) -> float:
    frames = arm_frames(model, q_a)
    return kinetic_energy(frames, dq_a) + potential_energy(frames, gravity_vector(model, g0))


# ---------------------------------------------------------------------------
# public entry points


def arm_dynamics(model: RobotModel, q_a, dq_a, g0: float = GRAVITY) -> ArmDynamics:
    """Mass matrix, Christoffel Coriolis matrix and gravity vector of the arm.

    Parameters
    ----------
    model : RobotModel
    q_a, dq_a : (n_a,) arm positions/velocities
    g0 : gravity magnitude [m/s^2]; 0 gives the zero-gravity variant.
    """
    q_a = model.check_q_arm(q_a)
    dq_a = model.check_q_arm(dq_a)
    frames = arm_frames(model, q_a)
    return ArmDynamics(
        M=arm_mass_matrix(frames),
        C=coriolis_matrix(frames, dq_a),
        g=arm_gravity(frames, gravity_vector(model, g0)),
    )


def assemble_whole_body(
    arm: ArmDynamics, base: BaseVirtualParams, dq: np.ndarray
) -> WholeBodyDynamics:
    """Block-diagonal whole-body model: inertia diag(M_v, M_a), velocity
    force [D_v dq_b; C_a dq_a], gravity [0; g_a]."""
    dq = np.asarray(dq, dtype=float)
    n_a = arm.M.shape[0]
    if dq.shape != (3 + n_a,):
        raise DimensionError(f"expected whole-body dq of length {3 + n_a}")
    n = 3 + n_a
    M = np.zeros((n, n))
    M[:3, :3] = np.diag(base.mass)
    M[3:, 3:] = arm.M
    cqd = np.concatenate([base.damping * dq[:3], arm.C @ dq[3:]])
    g = np.concatenate([np.zeros(3), arm.g])
    return WholeBodyDynamics(M=M, cqd_plus_damping=cqd, g=g)


def whole_body_mass(model: RobotModel, base: BaseVirtualParams, q_a, frames: ArmFrames | None = None) -> np.ndarray:
    """Just the block-diagonal inertia (controller hot path)."""
    if frames is None:
        frames = arm_frames(model, q_a)
    n = model.n
    M = np.zeros((n, n))
    M[:3, :3] = np.diag(base.mass)
    M[3:, 3:] = arm_mass_matrix(frames)
    return M
