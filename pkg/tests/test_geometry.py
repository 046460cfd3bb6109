import numpy as np
import pytest
from hypothesis import given, strategies as st

from locomanip.errors import DimensionError
from locomanip import geometry as geo

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


def random_quat(rng):
    q = rng.normal(size=4)
    return geo.normalize_quat(q)


def test_normalize_canonicalizes_sign():
    q = geo.normalize_quat([-1.0, 0.0, 0.0, 0.0])
    assert q[0] == 1.0
    q = geo.normalize_quat([0.5, 0.5, 0.5, 0.5])
    assert np.isclose(np.linalg.norm(q), 1.0)


def test_normalize_rejects_degenerate():
    with pytest.raises(ValueError):
        geo.normalize_quat([0.0, 0.0, 0.0, 0.0])
    with pytest.raises(DimensionError):
        geo.normalize_quat([1.0, 0.0, 0.0])


def test_mul_conj_is_identity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = random_quat(rng)
        qq = geo.quat_mul(q, geo.quat_conj(q))
        assert np.allclose(qq, geo.IDENTITY_QUAT, atol=1e-12)


def test_rotate_matches_matrix():
    rng = np.random.default_rng(4)
    for _ in range(20):
        q = random_quat(rng)
        v = rng.normal(size=3)
        assert np.allclose(geo.quat_rotate(q, v), geo.quat_to_matrix(q) @ v, atol=1e-12)


def test_mul_composes_like_matrices():
    rng = np.random.default_rng(5)
    for _ in range(20):
        q1, q2 = random_quat(rng), random_quat(rng)
        R = geo.quat_to_matrix(geo.quat_mul(q1, q2))
        assert np.allclose(R, geo.quat_to_matrix(q1) @ geo.quat_to_matrix(q2), atol=1e-12)


@given(vec3)
def test_exp_rotvec_round_trip(w):
    q = geo.quat_exp(w)
    r = geo.quat_to_rotvec(q)
    # rotvec is defined modulo 2*pi on the angle; compare rotations
    assert np.allclose(geo.quat_to_matrix(geo.quat_exp(r)), geo.quat_to_matrix(q), atol=1e-9)


def test_exp_small_angle_stable():
    for scale in (1e-14, 1e-11, 1e-8):
        w = np.array([scale, 0.0, 0.0])
        q = geo.quat_exp(w)
        assert np.isclose(np.linalg.norm(q), 1.0, atol=1e-15)
        assert np.allclose(geo.quat_to_rotvec(q), w, atol=1e-16)


def test_matrix_round_trip_all_shepperd_branches():
    # rotations near 0 and near pi about each axis hit all four branches
    cases = [
        np.array([0.01, 0.0, 0.0]),
        np.array([np.pi - 0.01, 0.0, 0.0]),
        np.array([0.0, np.pi - 0.01, 0.0]),
        np.array([0.0, 0.0, np.pi - 0.01]),
        np.array([1.0, 2.0, -0.5]),
    ]
    for w in cases:
        q = geo.quat_exp(w)
        R = geo.quat_to_matrix(q)
        q2 = geo.matrix_to_quat(R)
        assert np.allclose(q, q2, atol=1e-12) or np.allclose(q, -q2, atol=1e-12)


def test_axis_angle_matrix_matches_quat():
    rng = np.random.default_rng(6)
    for _ in range(10):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        ang = rng.uniform(-3.0, 3.0)
        R1 = geo.axis_angle_matrix(axis, ang)
        R2 = geo.quat_to_matrix(geo.quat_from_axis_angle(axis, ang))
        assert np.allclose(R1, R2, atol=1e-12)


@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_wrap_angle_range(a):
    w = geo.wrap_angle(a)
    assert -np.pi < w <= np.pi
    assert np.isclose(np.sin(w), np.sin(a), atol=1e-9)
    assert np.isclose(np.cos(w), np.cos(a), atol=1e-9)


def test_wrap_angle_boundaries():
    assert geo.wrap_angle(np.pi) == pytest.approx(np.pi)
    assert geo.wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert geo.wrap_angle(0.0) == 0.0
    assert geo.wrap_angle(3.0 * np.pi) == pytest.approx(np.pi)


def test_skew_matches_cross():
    rng = np.random.default_rng(7)
    a, b = rng.normal(size=3), rng.normal(size=3)
    assert np.allclose(geo.skew(a) @ b, np.cross(a, b))
    assert np.allclose(geo.skew(a).T, -geo.skew(a))


def test_yaw_matrix():
    R = geo.yaw_matrix(np.pi / 2)
    assert np.allclose(R @ np.array([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-12)
    assert np.allclose(R[2], [0.0, 0.0, 1.0])
