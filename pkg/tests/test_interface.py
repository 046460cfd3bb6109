import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locomanip.errors import NotPositiveDefinite
from locomanip.geometry import quat_to_rotvec
from locomanip.interface import (
    LOCOMOTION,
    MANIPULATION,
    ROTO_TRANSLATION,
    TRANSLATION,
    AdmittanceParams,
    InterfaceState,
    admittance_step,
    handle_button,
)
from locomanip.model import JointState, Pose, Twist, Wrench

from oracles import first_order_step_response

DT = 1e-3


def fresh_state(**kw) -> InterfaceState:
    defaults = dict(x_d=Pose.identity(), dx_d=Twist.zero(), q_pref=np.zeros(10))
    defaults.update(kw)
    return InterfaceState(**defaults)


def run_constant_wrench(params, state, wrench, t_end, dt=DT):
    steps = int(round(t_end / dt))
    for _ in range(steps):
        state = admittance_step(params, state, wrench, dt)
    return state


# ---------------------------------------------------------------------------
# admittance law


def test_step_response_reaches_analytic_steady_state():
    params = AdmittanceParams()
    state = fresh_state()
    wrench = Wrench(np.array([20.0, 0.0, 0.0]), np.zeros(3))
    state = run_constant_wrench(params, state, wrench, 3.0)
    # steady state lam/D = 20/20 = 1 m/s
    assert state.dx_d.linear[0] == pytest.approx(1.0, abs=1e-3)
    assert np.allclose(state.dx_d.linear[1:], 0.0)
    assert np.allclose(state.dx_d.angular, 0.0)


def test_step_response_tracks_first_order_curve():
    params = AdmittanceParams()
    state = fresh_state()
    wrench = Wrench(np.array([20.0, 0.0, 0.0]), np.zeros(3))
    t = 0.0
    for _ in range(600):
        state = admittance_step(params, state, wrench, DT)
        t += DT
        expected = first_order_step_response(20.0, 6.0, 20.0, t)
        assert state.dx_d.linear[0] == pytest.approx(expected, abs=2e-3)


def test_zero_wrench_decay_time_constant():
    params = AdmittanceParams()
    state = fresh_state(dx_d=Twist(np.array([0.5, 0.0, 0.0]), np.zeros(3)))
    state = run_constant_wrench(params, state, Wrench.zero(), 0.3)
    # one time constant M/D = 0.3 s
    assert state.dx_d.linear[0] == pytest.approx(0.5 * np.exp(-1.0), rel=5e-3)


def test_velocity_converges_within_spec_tolerance():
    params = AdmittanceParams()
    state = fresh_state()
    wrench = Wrench(np.array([8.0, -4.0, 2.0]), np.array([0.3, 0.0, -0.3]))
    tau_max = params.time_constants().max()
    state = run_constant_wrench(params, state, wrench, 10.0 * tau_max)
    v_ss = wrench.as_array() / params.damping
    err = np.abs(state.dx_d.as_array() - v_ss)
    assert np.all(err <= 1e-3 * (np.abs(v_ss) + 1e-12) + 1e-9)


def test_first_order_convergence_in_dt():
    params = AdmittanceParams()
    wrench = Wrench(np.array([10.0, 0.0, 0.0]), np.zeros(3))
    # analytic position under a constant-force step from rest
    tau = 6.0 / 20.0
    v_ss = 0.5
    x_true = v_ss * (1.0 - tau * (1.0 - np.exp(-1.0 / tau)))

    def final_x(dt):
        state = fresh_state()
        state = run_constant_wrench(params, state, wrench, 1.0, dt=dt)
        return state.x_d.position[0]

    e_coarse = abs(final_x(1e-3) - x_true)
    e_fine = abs(final_x(5e-4) - x_true)
    assert 1.7 <= e_coarse / e_fine <= 2.3


def test_translation_mode_gates_torque():
    params = AdmittanceParams()
    state = fresh_state(motion_mode=TRANSLATION)
    wrench = Wrench(np.zeros(3), np.array([2.0, -1.0, 0.5]))
    out = run_constant_wrench(params, state, wrench, 0.5)
    assert np.array_equal(out.x_d.position, state.x_d.position)
    assert np.array_equal(out.x_d.orientation, state.x_d.orientation)
    assert np.allclose(out.dx_d.as_array(), 0.0)


def test_roto_translation_integrates_orientation():
    params = AdmittanceParams()
    state = fresh_state()
    wrench = Wrench(np.zeros(3), np.array([0.0, 0.0, 1.5]))
    t_end = 2.0
    state = run_constant_wrench(params, state, wrench, t_end)
    # angular channel: tau = 1/1.5 s, steady rate 1.5/1.5 = 1 rad/s
    tau = 1.0 / 1.5
    assert state.dx_d.angular[2] == pytest.approx(1.0 - np.exp(-t_end / tau), abs=1e-3)
    rv = quat_to_rotvec(state.x_d.orientation)
    angle_true = t_end - tau * (1.0 - np.exp(-t_end / tau))
    assert rv[2] == pytest.approx(angle_true, abs=2e-3)
    assert abs(rv[0]) < 1e-9 and abs(rv[1]) < 1e-9


def test_non_finite_wrench_flags_fault_and_freezes_state():
    params = AdmittanceParams()
    state = fresh_state(dx_d=Twist(np.array([0.2, 0, 0]), np.zeros(3)))
    bad = Wrench(np.array([np.nan, 0.0, 0.0]), np.zeros(3))
    out = admittance_step(params, state, bad, DT)
    assert out.fault
    assert np.array_equal(out.x_d.position, state.x_d.position)
    assert np.array_equal(out.dx_d.as_array(), state.dx_d.as_array())
    # a good sample clears the fault
    good = admittance_step(params, out, Wrench.zero(), DT)
    assert not good.fault


@settings(max_examples=25, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(-100, 100, allow_nan=False),
            st.floats(-100, 100, allow_nan=False),
            st.floats(-100, 100, allow_nan=False),
        ),
        min_size=1,
        max_size=30,
    )
)
def test_inactive_interface_holds_pose_bitwise(forces):
    params = AdmittanceParams()
    state = fresh_state(admittance_active=False)
    anchor = state.x_d.as_array().copy()
    for f in forces:
        state = admittance_step(params, state, Wrench(np.array(f), np.zeros(3)), DT)
        assert np.array_equal(state.x_d.as_array(), anchor)
        assert np.all(state.dx_d.as_array() == 0.0)


def test_dt_bounds_enforced():
    params = AdmittanceParams()
    state = fresh_state()
    with pytest.raises(ValueError):
        admittance_step(params, state, Wrench.zero(), 0.0)
    with pytest.raises(ValueError):
        admittance_step(params, state, Wrench.zero(), 0.02)


def test_params_validation():
    with pytest.raises(NotPositiveDefinite):
        AdmittanceParams(mass=np.zeros(6))
    with pytest.raises(NotPositiveDefinite):
        AdmittanceParams(damping=-np.ones(6))


# ---------------------------------------------------------------------------
# buttons


def joint_state(n=10):
    return JointState(q=np.linspace(0, 1, n), dq=np.zeros(n))


def test_button_a_toggle_involution():
    state = fresh_state()
    pose = Pose(np.array([0.3, 0.2, 0.9]), np.array([1.0, 0, 0, 0]))
    once = handle_button(state, "A", joint_state(), pose)
    twice = handle_button(once, "A", joint_state(), pose)
    assert once.admittance_active != state.admittance_active
    assert twice.admittance_active == state.admittance_active


def test_button_a_off_snaps_reference_to_measured_pose():
    state = fresh_state(dx_d=Twist(np.array([0.4, 0, 0]), np.zeros(3)))
    pose = Pose(np.array([1.0, 2.0, 3.0]), np.array([1.0, 0, 0, 0]))
    out = handle_button(state, "A", joint_state(), pose)
    assert not out.admittance_active
    assert np.array_equal(out.x_d.position, pose.position)
    assert np.allclose(out.dx_d.as_array(), 0.0)


def test_button_m_toggles_and_zeroes_angular_rate():
    state = fresh_state(dx_d=Twist(np.array([0.1, 0, 0]), np.array([0.0, 0.0, 0.7])))
    out = handle_button(state, "M", joint_state(), Pose.identity())
    assert out.motion_mode == TRANSLATION
    assert np.allclose(out.dx_d.angular, 0.0)
    assert np.array_equal(out.dx_d.linear, state.dx_d.linear)
    back = handle_button(out, "M", joint_state(), Pose.identity())
    assert back.motion_mode == ROTO_TRANSLATION


def test_button_g_isolated_toggle():
    state = fresh_state()
    out = handle_button(state, "G", joint_state(), Pose.identity())
    assert out.gripper_closed != state.gripper_closed
    assert out.admittance_active == state.admittance_active
    assert out.motion_mode == state.motion_mode
    assert out.priority == state.priority
    assert np.array_equal(out.q_pref, state.q_pref)
    assert np.array_equal(out.x_d.as_array(), state.x_d.as_array())


def test_button_p_captures_q_pref_only_on_switch_to_locomotion():
    state = fresh_state()
    q_star = joint_state()
    out = handle_button(state, "P", q_star, Pose.identity())
    assert out.priority == LOCOMOTION
    assert np.array_equal(out.q_pref, q_star.q)

    # switching back must not recapture
    other = JointState(q=np.full(10, 7.0), dq=np.zeros(10))
    back = handle_button(out, "P", other, Pose.identity())
    assert back.priority == MANIPULATION
    assert np.array_equal(back.q_pref, q_star.q)


def test_q_pref_untouched_by_steps_and_other_buttons():
    params = AdmittanceParams()
    state = fresh_state()
    ref = state.q_pref.copy()
    state = run_constant_wrench(params, state, Wrench(np.array([5.0, 0, 0]), np.zeros(3)), 0.2)
    for b in ("A", "M", "G"):
        state = handle_button(state, b, joint_state(), Pose.identity())
    assert np.array_equal(state.q_pref, ref)


def test_unknown_button_rejected():
    with pytest.raises(ValueError):
        handle_button(fresh_state(), "X", joint_state(), Pose.identity())
