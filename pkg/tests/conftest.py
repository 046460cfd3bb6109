import numpy as np
import pytest

from locomanip.geometry import IDENTITY_QUAT
from locomanip.model import ArmJoint, RobotModel, builtin_model


def make_pendulum(mass=2.0, length=1.0) -> RobotModel:
    """Single link rotating about -y, COM at +x: gravity torque is
    m g length cos(q) with the sign convention M ddq + C dq + g = tau."""
    joint = ArmJoint(
        axis=np.array([0.0, -1.0, 0.0]),
        origin=np.zeros(3),
        mass=mass,
        com=np.array([length, 0.0, 0.0]),
        inertia=np.array([1e-3, 1e-3, 1e-3]),
    )
    return RobotModel(
        name="pendulum",
        joints=(joint,),
        mount_pos=np.zeros(3),
        mount_quat=IDENTITY_QUAT,
        tool_pos=np.array([length, 0.0, 0.0]),
        tool_quat=IDENTITY_QUAT,
        payload_limit=1.0,
        q_home=np.zeros(1),
    )


def make_planar_2r() -> RobotModel:
    joints = (
        ArmJoint(
            axis=np.array([0.0, -1.0, 0.0]),
            origin=np.zeros(3),
            mass=1.5,
            com=np.array([0.25, 0.0, 0.0]),
            inertia=np.array([2e-3, 2e-3, 2e-3]),
        ),
        ArmJoint(
            axis=np.array([0.0, -1.0, 0.0]),
            origin=np.array([0.5, 0.0, 0.0]),
            mass=1.0,
            com=np.array([0.25, 0.0, 0.0]),
            inertia=np.array([1e-3, 1e-3, 1e-3]),
        ),
    )
    return RobotModel(
        name="planar-2r",
        joints=joints,
        mount_pos=np.zeros(3),
        mount_quat=IDENTITY_QUAT,
        tool_pos=np.array([0.5, 0.0, 0.0]),
        tool_quat=IDENTITY_QUAT,
        payload_limit=1.0,
        q_home=np.zeros(2),
    )


@pytest.fixture(scope="session")
def pendulum():
    return make_pendulum()


@pytest.fixture(scope="session")
def planar_2r():
    return make_planar_2r()


@pytest.fixture(scope="session")
def moca_like():
    return builtin_model("moca-like")


@pytest.fixture(scope="session")
def kairos_like():
    return builtin_model("kairos-like")
