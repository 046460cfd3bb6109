"""Whole-body loco-manipulation control for mobile manipulators.

Two controller families over a shared planar-base + serial-arm model:

* weighted Cartesian impedance (torque arms),
* weighted closed-loop inverse differential kinematics (velocity arms),

plus an admittance-type human command interface, a deterministic
fixed-timestep simulator, and a websocket bridge for interactive use.

The bridge and CLI live in :mod:`locomanip.bridge` and :mod:`locomanip.cli`;
they are not re-exported here so that importing the package does not pull
in the web stack.
"""

__version__ = "0.1.0"

from .clik import ClikParams, clik_step, damping_factor
from .config import (
    TICK,
    ScenarioConfig,
    builtin_scenario,
    builtin_scenarios,
    load_config,
    parse_config_text,
)
from .errors import (
    ConfigError,
    DimensionError,
    IntegrationFault,
    LocomanipError,
    ModelError,
    NotPositiveDefinite,
    SingularityError,
)
from .impedance import ImpedanceParams, base_torque_to_velocity, whole_body_torque
from .interface import (
    AdmittanceParams,
    InterfaceState,
    admittance_step,
    handle_button,
)
from .model import (
    JointState,
    Pose,
    RobotModel,
    Twist,
    Wrench,
    builtin_model,
    builtin_model_names,
    fk_ee,
    load_robot_model,
    manipulability,
    whole_body_jacobian,
)
from .sim import (
    SimLog,
    make_world,
    run_scenario,
    step_free,
    step_kairos,
    step_moca,
)
from .verify import group_names, run_all, run_group

__all__ = [
    "AdmittanceParams",
    "ClikParams",
    "ConfigError",
    "DimensionError",
    "ImpedanceParams",
    "IntegrationFault",
    "InterfaceState",
    "JointState",
    "LocomanipError",
    "ModelError",
    "NotPositiveDefinite",
    "Pose",
    "RobotModel",
    "ScenarioConfig",
    "SimLog",
    "SingularityError",
    "TICK",
    "Twist",
    "Wrench",
    "admittance_step",
    "base_torque_to_velocity",
    "builtin_model",
    "builtin_model_names",
    "builtin_scenario",
    "builtin_scenarios",
    "clik_step",
    "damping_factor",
    "fk_ee",
    "group_names",
    "handle_button",
    "load_config",
    "load_robot_model",
    "make_world",
    "manipulability",
    "parse_config_text",
    "run_all",
    "run_group",
    "run_scenario",
    "step_free",
    "step_kairos",
    "step_moca",
    "whole_body_jacobian",
    "whole_body_torque",
    "__version__",
]
