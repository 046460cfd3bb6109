"""Runtime property checks for the release gate.

Each group re-states an invariant the test suite also covers, but in a
form that ships with the package and runs from the command line.  Groups
report (cases, max residual, tolerance) so regressions show up as numbers,
not just booleans.  The checked implementations can be swapped via the
`hooks` mapping, which the test suite uses to prove the checks actually
discriminate (a deliberately broken torque law must fail here).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import clik as _clik
from . import impedance as _imp
from .config import GainConfig
from .dynamics import (
    BaseVirtualParams,
    arm_gravity,
    arm_mass_matrix,
    coriolis_matrix,
    gravity_vector,
    mechanical_energy,
    potential_energy,
    whole_body_mass,
)
from .interface import TRANSLATION, AdmittanceParams, InterfaceState, admittance_step
from .model import (
    JointState,
    Pose,
    Twist,
    Wrench,
    arm_frames,
    arm_jacobian,
    builtin_model,
    fk_ee,
    manipulability,
    pose_error,
    whole_body_jacobian,
)
from .sim import Wall, contact_wrench


@dataclass(frozen=True)
class GroupResult:
    group: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "cases": self.cases,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "note": self.note,
        }


def _result(group, cases, residual, tol, note="") -> GroupResult:
    residual = float(residual)
    ok = bool(np.isfinite(residual) and residual <= tol)
    return GroupResult(group, cases, residual, tol, ok, note)


def _random_q(rng, model):
    q = np.concatenate([rng.normal(scale=0.5, size=3), rng.normal(scale=0.8, size=model.n_arm)])
    return q


def _full_rank_state(rng, model, w_min=1e-2):
    while True:
        q = _random_q(rng, model)
        frames = arm_frames(model, q[3:])
        if manipulability(arm_jacobian(model, q[3:], frames)) > w_min:
            return q, frames


# ---------------------------------------------------------------------------
# groups


def _check_dynamics(rng, hooks) -> GroupResult:
    worst = 0.0
    cases = 0
    h = 1e-6
    for name in ("moca-like", "kairos-like"):
        model = builtin_model(name)
        g_vec = gravity_vector(model)
        for _ in range(6):
            q = rng.normal(scale=0.8, size=model.n_arm)
            dq = rng.normal(size=model.n_arm)
            frames = arm_frames(model, q)
            M = arm_mass_matrix(frames)
            worst = max(worst, np.abs(M - M.T).max())
            if np.linalg.eigvalsh(M).min() <= 0.0:
                worst = np.inf
            # passivity: d/dt M - 2 C skew symmetric
            C = coriolis_matrix(frames, dq)
            M_dot = (
                arm_mass_matrix(arm_frames(model, q + h * dq))
                - arm_mass_matrix(arm_frames(model, q - h * dq))
            ) / (2 * h)
            S = M_dot - 2 * C
            worst = max(worst, np.abs(S + S.T).max())
            # gravity torque is the gradient of the potential
            g_tau = arm_gravity(frames, g_vec)
            for k in range(model.n_arm):
                qp, qm = q.copy(), q.copy()
                qp[k] += h
                qm[k] -= h
                dU = (
                    potential_energy(arm_frames(model, qp), g_vec)
                    - potential_energy(arm_frames(model, qm), g_vec)
                ) / (2 * h)
                worst = max(worst, abs(g_tau[k] - dU))
            cases += 1
    return _result("dynamics", cases, worst, 1e-5, "finite-difference bound")


def _impedance_instance(rng, model, gains, base):
    q, frames = _full_rank_state(rng, model)
    J = whole_body_jacobian(model, q, frames)
    M = whole_body_mass(model, base, q[3:], frames)
    eta_b, eta_a = 1.0 + 4.0 * rng.random(), 1.0 + 4.0 * rng.random()
    W = _imp.weight_matrix(M, eta_b, eta_a)
    F = rng.normal(scale=20.0, size=6)
    tau_0 = rng.normal(scale=5.0, size=model.n)
    return J, M, W, F, tau_0


def _check_task_consistency(rng, hooks) -> GroupResult:
    torque = hooks["whole_body_torque"]
    model = builtin_model("moca-like")
    gains = GainConfig()
    base = BaseVirtualParams()
    worst = 0.0
    cases = 200
    for _ in range(cases):
        J, M, W, F, tau_0 = _impedance_instance(rng, model, gains, base)
        tau_c = torque(J, M, W, F, tau_0)
        _, _, Jbar = _imp.weighted_task_inertias(J, M, W)
        res = np.linalg.norm(Jbar.T @ tau_c - F) / (1.0 + np.linalg.norm(F))
        worst = max(worst, res)
    return _result("task-consistency", cases, worst, 1e-8)


def _check_null_space(rng, hooks) -> GroupResult:
    torque = hooks["whole_body_torque"]
    model = builtin_model("moca-like")
    gains = GainConfig()
    base = BaseVirtualParams()
    worst = 0.0
    cases = 200
    for _ in range(cases):
        J, M, W, _, tau_0 = _impedance_instance(rng, model, gains, base)
        tau_c = torque(J, M, W, np.zeros(6), tau_0)
        Lam, _, _ = _imp.weighted_task_inertias(J, M, W)
        # the posture torque must produce no task acceleration
        res = np.linalg.norm(Lam @ (J @ np.linalg.solve(M, tau_c)))
        res /= max(np.linalg.norm(tau_0), 1e-12)
        worst = max(worst, res)
    return _result("null-space", cases, worst, 1e-8)


def _check_weighting(rng, hooks) -> GroupResult:
    torque = hooks["whole_body_torque"]
    model = builtin_model("moca-like")
    base = BaseVirtualParams()
    worst = 0.0
    cases = 50
    for _ in range(cases):
        q, frames = _full_rank_state(rng, model)
        J = whole_body_jacobian(model, q, frames)
        M = whole_body_mass(model, base, q[3:], frames)
        F = rng.normal(scale=20.0, size=6)
        norms = []
        for eta_b in (1.0, 5.0, 25.0):
            W = _imp.weight_matrix(M, eta_b, 1.0)
            tau_c = torque(J, M, W, F, np.zeros(model.n))
            norms.append(np.linalg.norm(tau_c[:3]))
        # base effort must strictly decrease as the base penalty grows
        violation = max(norms[1] - norms[0], norms[2] - norms[1])
        worst = max(worst, violation)
    return _result("weighting", cases, worst, 0.0, "monotone over eta_B in {1,5,25}")


def _check_clik_lsq(rng, hooks) -> GroupResult:
    solve = hooks["clik_step"]
    model = builtin_model("kairos-like")
    gains = GainConfig()
    worst = 0.0
    cases = 100
    for _ in range(cases):
        q, frames = _full_rank_state(rng, model)
        params = gains.clik_params(model.n_arm, "manipulation")  # k_i = 0
        x = fk_ee(model, q, frames)
        x_d = Pose(x.position + rng.normal(scale=0.05, size=3), x.orientation)
        dx_d = Twist(rng.normal(scale=0.2, size=3), rng.normal(scale=0.1, size=3))
        iface = InterfaceState(x_d=x_d, dx_d=dx_d, q_pref=model.whole_body_home())
        dq_d = solve(model, params, JointState(q, np.zeros(model.n)), iface, clamp=False)
        # the solution satisfies the damped weighted normal equations
        J = whole_body_jacobian(model, q, frames)
        w = manipulability(arm_jacobian(model, q[3:], frames))
        k = _clik.damping_factor(w, params)
        W2 = _clik.regularization_weight(params, k)
        v_ref = dx_d.as_array() + params.K * pose_error(x_d, x)
        JtW1 = J.T * params.W1[None, :]
        lhs = (JtW1 @ J + np.diag(W2)) @ dq_d
        rhs = JtW1 @ v_ref
        res = np.linalg.norm(lhs - rhs) / max(np.linalg.norm(rhs), 1e-9)
        worst = max(worst, res)

        # with the secondary task on, the task-space velocity is unchanged
        params_l = gains.clik_params(model.n_arm, "locomotion")
        iface_l = InterfaceState(
            x_d=x_d, dx_d=dx_d, q_pref=model.whole_body_home(), priority="locomotion",
        )
        dq_l = solve(model, params_l, JointState(q, np.zeros(model.n)), iface_l, clamp=False)
        dq_l0 = solve(
            model,
            _clik.ClikParams(
                n_arm=model.n_arm, K=params_l.K, W1=params_l.W1, w_b=params_l.w_b,
                w_a=params_l.w_a, k0=params_l.k0, w_t=params_l.w_t, k_i=0.0,
            ),
            JointState(q, np.zeros(model.n)), iface_l, clamp=False,
        )
        res2 = np.linalg.norm(J @ (dq_l - dq_l0)) / max(np.linalg.norm(J @ dq_l0), 1e-9)
        worst = max(worst, res2)
    return _result("clik-lsq", cases, worst, 1e-6)


def _check_damping_schedule(rng, hooks) -> GroupResult:
    factor = hooks["damping_factor"]
    gains = GainConfig()
    params = gains.clik_params(6, "locomotion")
    worst = abs(factor(params.w_t, params) - 1.0)
    worst = max(worst, abs(factor(0.0, params) - (1.0 + params.k0)))
    worst = max(worst, abs(factor(10.0, params) - 1.0))
    grid = np.linspace(0.0, 2.0 * params.w_t, 10_000)
    vals = np.array([factor(w, params) for w in grid])
    jumps = np.abs(np.diff(vals))
    # continuity at the grid scale: jumps shrink with spacing
    worst = max(worst, jumps.max() - 5.0 * params.k0 * (grid[1] - grid[0]) / params.w_t)
    if np.any(np.diff(vals) > 1e-12):
        worst = np.inf  # must be non-increasing in w
    return _result("damping-schedule", 3 + grid.size, worst, 1e-9)


def _check_admittance(rng, hooks) -> GroupResult:
    params = AdmittanceParams()
    dt = 1e-3
    q_pref = np.zeros(9)
    worst = 0.0
    # discrete step response has the exact closed form v_N = v_ss (1 - a^N)
    state = InterfaceState.initial(Pose.identity(), q_pref)
    wrench = Wrench.from_array([20.0, 0, 0, 0, 0, 0])
    m, d = params.mass[0], params.damping[0]
    a = 1.0 / (1.0 + dt * d / m)
    for k in range(1, 501):
        state = admittance_step(params, state, wrench, dt)
        v_exact = (20.0 / d) * (1.0 - a**k)
        worst = max(worst, abs(state.dx_d.linear[0] - v_exact))
    # translation mode must gate torques entirely
    gated = replace(InterfaceState.initial(Pose.identity(), q_pref), motion_mode=TRANSLATION)
    torque_in = Wrench.from_array([0, 0, 0, 2.0, 2.0, 2.0])
    for _ in range(100):
        gated = admittance_step(params, gated, torque_in, dt)
    worst = max(worst, np.abs(gated.dx_d.angular).max())
    # a non-finite wrench freezes the state and flags a fault
    frozen = admittance_step(params, state, Wrench.from_array([np.nan, 0, 0, 0, 0, 0]), dt)
    if not frozen.fault:
        worst = np.inf
    worst = max(worst, np.abs(frozen.dx_d.as_array() - state.dx_d.as_array()).max())
    return _result("admittance", 502, worst, 1e-12)


def _check_contact(rng, hooks) -> GroupResult:
    worst = 0.0
    cases = 300
    normal = np.array([-1.0, 0.0, 0.0])
    wall = Wall(point=np.zeros(3), normal=normal, stiffness=1e4, damping=300.0)
    for _ in range(cases):
        p = rng.normal(scale=0.05, size=3)
        v = rng.normal(scale=1.0, size=3)
        F = contact_wrench((wall,), p, v)
        worst = max(worst, np.abs(F[3:]).max())  # never any torque
        worst = max(worst, -float(F[:3] @ normal))  # never adhesive
        if -(p @ normal) <= 0.0:
            worst = max(worst, np.abs(F).max())  # zero outside the wall
    return _result("contact", cases, worst, 0.0)


def _check_energy(rng, hooks) -> GroupResult:
    from .config import parse_config_text
    from .sim import run_scenario

    cfg = parse_config_text(
        "[robot]\nname = moca-like\n",
        overrides=["run.controller=none", "run.duration=0.25", "run.dt_physics=0.0001"],
        name="verify-energy",
    )
    log = run_scenario(cfg)
    n = cfg.model.n
    row0, row1 = log.data[0], log.data[-1]
    E0 = mechanical_energy(cfg.model, row0[4 : 1 + n], row0[1 + n + 3 : 1 + 2 * n])
    E1 = mechanical_energy(cfg.model, row1[4 : 1 + n], row1[1 + n + 3 : 1 + 2 * n])
    drift_per_s = abs(E1 - E0) / abs(E0) / 0.25
    return _result("energy", 1, drift_per_s, 1e-3, "free-arm drift per second")


_GROUPS = {
    "dynamics": _check_dynamics,
    "task-consistency": _check_task_consistency,
    "null-space": _check_null_space,
    "weighting": _check_weighting,
    "clik-lsq": _check_clik_lsq,
    "damping-schedule": _check_damping_schedule,
    "admittance": _check_admittance,
    "contact": _check_contact,
    "energy": _check_energy,
}

_DEFAULT_HOOKS = {
    "whole_body_torque": _imp.whole_body_torque,
    "clik_step": _clik.clik_step,
    "damping_factor": _clik.damping_factor,
}


def group_names() -> tuple:
    return tuple(_GROUPS)


def run_group(name: str, seed: int = 0, hooks: dict | None = None) -> GroupResult:
    if name not in _GROUPS:
        raise KeyError(f"unknown property group '{name}'; valid: {', '.join(_GROUPS)}")
    merged = dict(_DEFAULT_HOOKS)
    if hooks:
        merged.update(hooks)
    rng = np.random.default_rng(seed)
    return _GROUPS[name](rng, merged)


def run_all(names=None, seed: int = 0, hooks: dict | None = None) -> list:
    picked = list(names) if names else list(_GROUPS)
    return [run_group(name, seed=seed, hooks=hooks) for name in picked]
