import numpy as np
import pytest

from locomanip.errors import NotPositiveDefinite
from locomanip.interface import (
    LOCOMOTION,
    MANIPULATION,
    InterfaceState,
)
from locomanip.clik import (
    ClikParams,
    clamp_velocity,
    clik_step,
    damping_factor,
    nullspace_project,
    primary_velocity,
    regularization_weight,
    secondary_velocity,
)
from locomanip.model import (
    JointState,
    Pose,
    Twist,
    builtin_model,
    fk_ee,
    whole_body_jacobian,
)

from oracles import stacked_wls, svd_nullspace_basis


@pytest.fixture(scope="module")
def kairos():
    return builtin_model("kairos-like")


def iface_at(model, q, **kw):
    x = fk_ee(model, q)
    defaults = dict(x_d=x, dx_d=Twist.zero(), q_pref=q.copy())
    defaults.update(kw)
    return InterfaceState(**defaults)


# ---------------------------------------------------------------------------
# damping schedule


def test_damping_factor_schedule():
    p = ClikParams(n_arm=6)
    assert damping_factor(p.w_t, p) == 1.0
    assert damping_factor(0.0, p) == pytest.approx(3.0)
    assert damping_factor(p.w_t / 2, p) == pytest.approx(1.5)
    assert damping_factor(10.0, p) == 1.0


def test_damping_factor_continuous_at_threshold():
    p = ClikParams(n_arm=6)
    eps = 1e-9
    below = damping_factor(p.w_t - eps, p)
    above = damping_factor(p.w_t + eps, p)
    assert abs(below - above) < 1e-8


def test_damping_factor_rejects_negative():
    with pytest.raises(ValueError):
        damping_factor(-0.1, ClikParams(n_arm=6))


def test_regularization_weight_values():
    loco = ClikParams.for_priority(6, LOCOMOTION)
    W2 = regularization_weight(loco, 1.0)
    assert np.allclose(W2, [10, 10, 10] + [0.5] * 6)
    W2 = regularization_weight(loco, 3.0)
    assert np.allclose(W2[3:], 4.5)
    assert np.all(W2 > 0)
    with pytest.raises(ValueError):
        regularization_weight(loco, 0.5)


# ---------------------------------------------------------------------------
# primary task


def test_primary_velocity_zero_at_zero_error(kairos):
    q = kairos.whole_body_home()
    p = ClikParams.for_priority(kairos.n_arm, MANIPULATION)
    J = whole_body_jacobian(kairos, q)
    x = fk_ee(kairos, q)
    dq = primary_velocity(J, p, regularization_weight(p, 1.0), x, x, Twist.zero())
    assert np.allclose(dq, 0.0, atol=1e-15)


def test_primary_velocity_matches_stacked_least_squares_oracle(kairos):
    rng = np.random.default_rng(51)
    p = ClikParams.for_priority(kairos.n_arm, LOCOMOTION)
    for _ in range(25):
        q = rng.normal(size=kairos.n) * 0.8
        J = whole_body_jacobian(kairos, q)
        x = fk_ee(kairos, q)
        x_d = Pose(x.position + rng.normal(size=3) * 0.05, x.orientation)
        dx_d = Twist(rng.normal(size=3) * 0.1, rng.normal(size=3) * 0.1)
        k = rng.uniform(1.0, 3.0)
        W2 = regularization_weight(p, k)
        got = primary_velocity(J, p, W2, x, x_d, dx_d)
        v_ref = dx_d.as_array() + p.K * (
            np.concatenate([x_d.position - x.position, np.zeros(3)])
        )
        ref = stacked_wls(J, p.W1, W2, v_ref)
        assert np.allclose(got, ref, atol=1e-6)


def test_adaptive_damping_shrinks_velocity_at_singular_pose(kairos):
    # outstretched arm: manipulability collapses to zero
    q = np.zeros(kairos.n)
    J = whole_body_jacobian(kairos, q)
    x = fk_ee(kairos, q)
    x_d = Pose(x.position + np.array([0.0, 0.0, 0.1]), x.orientation)
    p = ClikParams.for_priority(kairos.n_arm, LOCOMOTION)
    dq_adaptive = primary_velocity(J, p, regularization_weight(p, 3.0), x, x_d, Twist.zero())
    dq_frozen = primary_velocity(J, p, regularization_weight(p, 1.0), x, x_d, Twist.zero())
    assert np.linalg.norm(dq_adaptive[3:]) <= np.linalg.norm(dq_frozen[3:])


def test_primary_velocity_finite_at_singular_jacobian():
    p = ClikParams(n_arm=6)
    J = np.zeros((6, 9))
    dq = primary_velocity(
        J, p, regularization_weight(p, 3.0), Pose.identity(),
        Pose(np.array([1.0, 0, 0]), np.array([1.0, 0, 0, 0])), Twist.zero(),
    )
    assert np.all(np.isfinite(dq))
    assert np.allclose(dq, 0.0)  # J^T W1 v = 0 for J = 0


# ---------------------------------------------------------------------------
# secondary task and projection


def test_secondary_velocity_zero_in_manipulation():
    p = ClikParams.for_priority(6, MANIPULATION)
    q = np.linspace(0, 1, 9)
    assert np.allclose(secondary_velocity(p, q, q + 1.0), 0.0)


def test_secondary_velocity_posture_pull():
    p = ClikParams.for_priority(6, LOCOMOTION)
    q = np.zeros(9)
    q_pref = np.concatenate([np.full(3, 9.0), np.full(6, 0.2)])
    out = secondary_velocity(p, q, q_pref)
    assert np.all(out[:3] == 0.0)
    assert np.allclose(out[3:], 0.2)


def test_nullspace_project_annihilates_task(kairos):
    rng = np.random.default_rng(52)
    for _ in range(20):
        q = rng.normal(size=kairos.n) * 0.8
        J = whole_body_jacobian(kairos, q)
        v = rng.normal(size=kairos.n)
        Nv = nullspace_project(J, v)
        assert np.linalg.norm(J @ Nv) <= 1e-8 * np.linalg.norm(J) * (np.linalg.norm(v) + 1)


def test_nullspace_project_square_full_rank_is_zero():
    rng = np.random.default_rng(53)
    J = rng.normal(size=(6, 6)) + 4 * np.eye(6)
    v = rng.normal(size=6)
    assert np.allclose(nullspace_project(J, v), 0.0, atol=1e-10)


def test_nullspace_project_keeps_null_vectors(kairos):
    rng = np.random.default_rng(54)
    q = rng.normal(size=kairos.n) * 0.5
    J = whole_body_jacobian(kairos, q)
    basis = svd_nullspace_basis(J)
    v = basis @ rng.normal(size=basis.shape[1])
    assert np.allclose(nullspace_project(J, v), v, atol=1e-9)


# ---------------------------------------------------------------------------
# full step


def test_clik_step_zero_at_tracking_equilibrium(kairos):
    q = kairos.whole_body_home()
    state = JointState(q=q, dq=np.zeros(kairos.n))
    p = ClikParams.for_priority(kairos.n_arm, MANIPULATION)
    dq = clik_step(kairos, p, state, iface_at(kairos, q))
    assert np.allclose(dq, 0.0, atol=1e-12)


def test_clik_step_moves_toward_target(kairos):
    q = kairos.whole_body_home()
    state = JointState(q=q, dq=np.zeros(kairos.n))
    p = ClikParams.for_priority(kairos.n_arm, MANIPULATION)
    x = fk_ee(kairos, q)
    iface = iface_at(kairos, q, x_d=Pose(x.position + np.array([0.05, 0, 0]), x.orientation))
    dq = clik_step(kairos, p, state, iface)
    v = whole_body_jacobian(kairos, q) @ dq
    assert v[0] > 0  # end effector heads toward +x


def test_clik_step_clamps_velocity(kairos):
    q = kairos.whole_body_home()
    state = JointState(q=q, dq=np.zeros(kairos.n))
    p = ClikParams.for_priority(kairos.n_arm, MANIPULATION)
    x = fk_ee(kairos, q)
    iface = iface_at(
        kairos, q,
        x_d=Pose(x.position + np.array([5.0, 0, 0]), x.orientation),
        dx_d=Twist(np.array([10.0, 0, 0]), np.zeros(3)),
    )
    dq = clik_step(kairos, p, state, iface)
    assert np.all(np.abs(dq[:3]) <= kairos.vel_limit_base + 1e-12)
    assert np.all(np.abs(dq[3:]) <= kairos.vel_limit_arm + 1e-12)
    raw = clik_step(kairos, p, state, iface, clamp=False)
    assert np.abs(raw).max() > np.abs(dq).max()


def test_clik_step_secondary_respects_primary(kairos):
    # with a posture offset in locomotion mode, the task-space velocity
    # produced by the secondary term stays (numerically) zero
    q = kairos.whole_body_home()
    state = JointState(q=q, dq=np.zeros(kairos.n))
    loco = ClikParams.for_priority(kairos.n_arm, LOCOMOTION)
    iface = iface_at(kairos, q, q_pref=q + 0.3, priority=LOCOMOTION)
    manip_like = ClikParams.for_priority(kairos.n_arm, LOCOMOTION, k_i=0.0)
    dq_with = clik_step(kairos, loco, state, iface, clamp=False)
    dq_without = clik_step(kairos, manip_like, state, iface, clamp=False)
    J = whole_body_jacobian(kairos, q)
    assert np.allclose(J @ (dq_with - dq_without), 0.0, atol=1e-8)
    assert np.linalg.norm(dq_with - dq_without) > 1e-4  # posture term active


def test_clamp_velocity_limits(kairos):
    dq = np.concatenate([np.full(3, 5.0), np.full(kairos.n_arm, -7.0)])
    out = clamp_velocity(kairos, dq)
    assert np.all(out[:3] == kairos.vel_limit_base)
    assert np.all(out[3:] == -kairos.vel_limit_arm)


def test_priority_presets():
    manip = ClikParams.for_priority(6, MANIPULATION)
    loco = ClikParams.for_priority(6, LOCOMOTION)
    assert (manip.w_b, manip.w_a, manip.k_i) == (100.0, 1.0, 0.0)
    assert (loco.w_b, loco.w_a, loco.k_i) == (10.0, 0.5, 1.0)
    assert np.allclose(manip.K, [0.5, 0.5, 0.5, 0.05, 0.01, 0.01])
    assert np.allclose(manip.W1, [1000.0] * 3 + [500.0] * 3)
    with pytest.raises(ValueError):
        ClikParams.for_priority(6, "diagonal")
    with pytest.raises(NotPositiveDefinite):
        ClikParams(n_arm=6, w_t=0.0)
