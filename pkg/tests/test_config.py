"""Scenario configuration: parsing, validation, overrides, presets."""

import numpy as np
import pytest

from locomanip.config import (
    ButtonEvent,
    ProfileSegment,
    WallSpec,
    apply_overrides,
    builtin_scenario,
    builtin_scenarios,
    load_config,
    parse_config_text,
)
from locomanip.errors import ConfigError

MINIMAL = "[robot]\nname = moca-like\n"


def test_minimal_defaults():
    cfg = parse_config_text(MINIMAL)
    assert cfg.robot_name == "moca-like"
    assert cfg.controller_kind() == "impedance"
    assert cfg.duration == 5.0
    assert cfg.dt_physics == 1e-3
    assert cfg.gravity and cfg.gravity_comp
    assert cfg.start_priority == "manipulation"
    assert cfg.payload_mass == 0.0
    assert cfg.walls == () and cfg.profile == () and cfg.events == ()


def test_controller_auto_follows_robot():
    cfg = parse_config_text("[robot]\nname = kairos-like\n")
    assert cfg.controller_kind() == "clik"
    cfg = parse_config_text("[robot]\nname = kairos-like\n[run]\ncontroller = impedance\n")
    assert cfg.controller_kind() == "impedance"


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[robot]\nname = hal9000\n", "robot.name"),
        ("[robot]\nname = moca-like\n[run]\ncontroller = pid\n", "run.controller"),
        ("[robot]\nname = moca-like\n[run]\nduration = -1\n", "run.duration"),
        ("[robot]\nname = moca-like\n[run]\ndt_physics = 0.002\n", "run.dt_physics"),
        ("[robot]\nname = moca-like\n[run]\ndt_physics = 5e-5\n", "run.dt_physics"),
        ("[robot]\nname = moca-like\n[run]\ndt_physics = 0.0003\n", "run.dt_physics"),
        ("[robot]\nname = moca-like\n[run]\nstart_priority = idle\n", "run.start_priority"),
        ("[robot]\nname = moca-like\n[mystery]\nx = 1\n", "mystery"),
        ("[robot]\nname = moca-like\nwheels = 4\n", "robot.wheels"),
        ("[robot]\nname = moca-like\n[admittance]\nmass = 1 2 3\n", "admittance.mass"),
        ("[robot]\nname = moca-like\ninitial_q = 1 2 3\n", "robot.initial_q"),
        ("[robot]\nname = moca-like\nvelocity_lag = -0.1\n", "robot.velocity_lag"),
        ("[robot]\nname = moca-like\n[payload]\nmass = -2\n", "payload.mass"),
    ],
)
def test_validation_errors_carry_field_path(text, fragment):
    with pytest.raises(ConfigError) as err:
        parse_config_text(text)
    assert fragment in str(err.value)


def test_dt_must_divide_tick():
    # 2.5e-4 divides 1e-3, 3e-4 does not
    cfg = parse_config_text(MINIMAL + "[run]\ndt_physics = 0.00025\n")
    assert cfg.dt_physics == 2.5e-4
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL + "[run]\ndt_physics = 0.0003\n")


def test_wall_section_parsing():
    text = MINIMAL + "[wall.1]\noffset = 0.05\nnormal = 0 0 1\nstiffness = 1e4\ndamping = 50\n"
    cfg = parse_config_text(text)
    assert len(cfg.walls) == 1
    w = cfg.walls[0]
    assert w.offset == 0.05 and w.stiffness == 1e4
    ee0 = np.array([1.0, 2.0, 3.0])
    assert np.allclose(w.resolve_point(ee0), [1.0, 2.0, 2.95])


def test_wall_absolute_point():
    w = WallSpec(normal=[1.0, 0.0, 0.0], stiffness=1e3, damping=0.0, point=[0.5, 0.0, 0.0])
    assert np.allclose(w.resolve_point(np.zeros(3)), [0.5, 0.0, 0.0])


def test_wall_validation():
    with pytest.raises(ConfigError):
        WallSpec(normal=[1.0, 1.0, 0.0], stiffness=1.0, damping=0.0, offset=0.1)
    with pytest.raises(ConfigError):
        WallSpec(normal=[1.0, 0.0, 0.0], stiffness=-1.0, damping=0.0, offset=0.1)
    with pytest.raises(ConfigError):  # both point and offset
        WallSpec(normal=[1.0, 0.0, 0.0], stiffness=1.0, damping=0.0,
                 point=[0.0, 0.0, 0.0], offset=0.1)
    with pytest.raises(ConfigError):  # neither
        WallSpec(normal=[1.0, 0.0, 0.0], stiffness=1.0, damping=0.0)


def test_profile_assembly_and_ordering():
    text = (
        MINIMAL
        + "[profile.2]\nt0 = 1.0\nt1 = 2.0\nforce = 0 1 0\n"
        + "[profile.1]\nt0 = 0.0\nt1 = 0.5\nforce = 1 0 0\ntorque = 0 0 0.2\n"
    )
    cfg = parse_config_text(text)
    assert [s.t0 for s in cfg.profile] == [0.0, 1.0]
    assert np.allclose(cfg.profile[0].wrench, [1, 0, 0, 0, 0, 0.2])


def test_profile_rejects_bad_interval():
    with pytest.raises(ConfigError):
        ProfileSegment(1.0, 1.0, np.zeros(6))
    with pytest.raises(ConfigError):
        ProfileSegment(-0.5, 1.0, np.zeros(6))


def test_events_sorted_and_validated():
    text = MINIMAL + "[event.2]\nt = 0.5\nbutton = G\n[event.1]\nt = 1.0\nbutton = P\n"
    cfg = parse_config_text(text)
    assert [(e.t, e.button) for e in cfg.events] == [(0.5, "G"), (1.0, "P")]
    with pytest.raises(ConfigError):
        ButtonEvent(0.1, "Q")


def test_payload_attach_time_becomes_gripper_event():
    cfg = parse_config_text(MINIMAL + "[payload]\nmass = 2\nattach_time = 0.3\ndetach_time = 0.9\n")
    assert [(e.t, e.button) for e in cfg.events] == [(0.3, "G"), (0.9, "G")]


def test_override_paths():
    cfg = parse_config_text(
        MINIMAL,
        overrides=["robot=kairos-like", "run.duration=2.5", "wall.1.offset=0.1",
                   "wall.1.normal=-1 0 0", "wall.1.stiffness=5e4"],
    )
    assert cfg.robot_name == "kairos-like"
    assert cfg.duration == 2.5
    assert len(cfg.walls) == 1 and cfg.walls[0].stiffness == 5e4


def test_override_errors():
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL, overrides=["duration=2"])  # missing section
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL, overrides=["run.blah=2"])
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL, overrides=["nosuch.key=2"])
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL, overrides=["run.duration"])  # no value


def test_dump_round_trip_preserves_hash():
    cfg = parse_config_text(MINIMAL, overrides=["run.duration=1.5", "payload.mass=3"])
    text = cfg.dump()
    cfg2 = parse_config_text(text)
    assert cfg2.config_hash() == cfg.config_hash()
    assert cfg2.duration == 1.5 and cfg2.payload_mass == 3.0


def test_override_changes_hash():
    a = parse_config_text(MINIMAL)
    b = parse_config_text(MINIMAL, overrides=["run.duration=4.99"])
    assert a.config_hash() != b.config_hash()


def test_builtin_scenarios_parse():
    names = builtin_scenarios()
    assert set(names) >= {"wall_insertion", "load_carry", "path_track"}
    for name in names:
        cfg = builtin_scenario(name)
        assert cfg.name == name


def test_builtin_scenario_facts():
    wi = builtin_scenario("wall_insertion")
    assert wi.robot_name == "moca-like" and wi.dt_physics == 1e-4 and len(wi.walls) == 1
    lc = builtin_scenario("load_carry")
    assert lc.robot_name == "kairos-like" and lc.payload_mass == 10.0
    assert [e.button for e in lc.events] == ["G", "P", "P", "G"]
    with pytest.raises(ConfigError):
        builtin_scenario("nope")


def test_load_config_accepts_path_and_preset(tmp_path):
    p = tmp_path / "scene.cfg"
    p.write_text(MINIMAL + "[run]\nduration = 0.25\n")
    cfg = load_config(str(p))
    assert cfg.duration == 0.25
    cfg = load_config("path_track")
    assert cfg.name == "path_track"
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.cfg"))


def test_initial_q_length_checked():
    q = " ".join(["0.1"] * 10)
    cfg = parse_config_text(f"[robot]\nname = moca-like\ninitial_q = {q}\n")
    assert cfg.initial_q.shape == (10,)
    with pytest.raises(ConfigError):
        parse_config_text("[robot]\nname = kairos-like\ninitial_q = " + q + "\n")


def test_gain_factories():
    cfg = parse_config_text(MINIMAL)
    imp_m = cfg.gains.impedance_params(7, "manipulation")
    assert imp_m.eta_b == 5.0 and imp_m.eta_a == 1.0
    assert np.all(imp_m.K_0[3:] == 5.0) and np.all(imp_m.K_0[:3] == 0.0)
    imp_l = cfg.gains.impedance_params(7, "locomotion")
    assert imp_l.eta_b == 1.0 and imp_l.eta_a == 6.0
    assert np.all(imp_l.K_0[3:] == 50.0)
    cl_m = cfg.gains.clik_params(6, "manipulation")
    assert cl_m.w_b == 100.0 and cl_m.w_a == 1.0 and cl_m.k_i == 0.0
    cl_l = cfg.gains.clik_params(6, "locomotion")
    assert cl_l.w_b == 10.0 and cl_l.w_a == 0.5 and cl_l.k_i == 1.0


def test_gain_overrides_flow_through():
    cfg = parse_config_text(MINIMAL, overrides=["controller.eta_manip=2 3", "controller.xi=1.0"])
    p = cfg.gains.impedance_params(7, "manipulation")
    assert p.eta_b == 2.0 and p.eta_a == 3.0 and p.xi == 1.0
