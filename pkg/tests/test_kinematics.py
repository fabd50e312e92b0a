import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad_vec

from oracles import rot_y, rot_z
from softarm_rc.arm import (ArmParams, ArmState, curvature_and_plane, forward_kinematics,
                            section_kinematics, twist)
from softarm_rc.errors import InvalidStateError

P = ArmParams()
L0 = P.rest_length
D = P.neutral_offset


def arc_oracle(lengths):
    """Integrate the unit tangent along a constant-curvature arc numerically."""
    L1, L2, L3 = lengths
    total = L1 + L2 + L3
    s = total / 3
    # L1^2 + L2^2 + L3^2 - L1 L2 - L2 L3 - L1 L3, written without cancellation
    radicand = ((L1 - L2) ** 2 + (L2 - L3) ** 2 + (L1 - L3) ** 2) / 2
    kappa = 2 * math.sqrt(radicand) / (D * total)
    phi = math.atan2(math.sqrt(3) * (L2 - L3), L2 + L3 - 2 * L1)
    ez = np.array([0.0, 0.0, 1.0])
    tangent = lambda u: rot_z(phi) @ rot_y(kappa * u) @ ez  # noqa: E731
    p, _ = quad_vec(tangent, 0.0, s, epsabs=1e-14, epsrel=1e-13)
    R = rot_z(phi) @ rot_y(kappa * s) @ rot_z(-phi)
    return R, p


def chain_oracle(q):
    R = np.eye(3)
    p = np.zeros(3)
    tips = []
    for i in range(3):
        Rs, ps = arc_oracle(L0 + q[3 * i:3 * i + 3])
        p = p + R @ ps
        tips.append(p.copy())
        R = R @ Rs @ rot_z(P.section_joint_offset)
    return np.array(tips)


lengths_st = st.tuples(*[st.floats(0.13, 0.22) for _ in range(3)])


def test_equal_lengths_is_pure_translation():
    T = section_kinematics((0.15, 0.15, 0.15))
    np.testing.assert_allclose(T.translation, [0, 0, 0.15], atol=1e-15)
    np.testing.assert_allclose(T.rotation, np.eye(3), atol=1e-15)


def test_bent_section_matches_arc_integration():
    T = section_kinematics((0.16, 0.15, 0.15))
    R, p = arc_oracle((0.16, 0.15, 0.15))
    # frozen from the oracle: the arm bends away from the long actuator
    np.testing.assert_allclose(p, [-0.0399288139, 0.0, 0.1461668834], atol=1e-10)
    np.testing.assert_allclose(T.translation, p, atol=1e-12)
    np.testing.assert_allclose(T.rotation, R, atol=1e-12)


@given(lengths_st)
def test_section_matches_oracle(lengths):
    T = section_kinematics(lengths)
    R, p = arc_oracle(lengths)
    np.testing.assert_allclose(T.translation, p, atol=1e-11)
    np.testing.assert_allclose(T.rotation, R, atol=1e-11)
    np.testing.assert_allclose(T.rotation @ T.rotation.T, np.eye(3), atol=1e-12)


def test_nearly_straight_section_uses_series_limit():
    # kappa * s ~ 1e-8, well inside the series branch
    T = section_kinematics((0.15 + 1e-10, 0.15, 0.15))
    R, p = arc_oracle((0.15 + 1e-10, 0.15, 0.15))
    np.testing.assert_allclose(T.translation, p, atol=1e-15)
    assert np.all(np.isfinite(T.rotation))


@given(lengths_st)
def test_cyclic_permutation_rotates_tip_by_120_degrees(lengths):
    L1, L2, L3 = lengths
    p = section_kinematics((L1, L2, L3)).translation
    p_perm = section_kinematics((L3, L1, L2)).translation
    errors = [np.max(np.abs(rot_z(sign * 2 * math.pi / 3) @ p - p_perm)) for sign in (1, -1)]
    assert min(errors) < 1e-9


def test_curvature_and_plane_values():
    s, kappa, phi = curvature_and_plane((0.16, 0.15, 0.15))
    assert s == pytest.approx(0.46 / 3)
    assert kappa == pytest.approx(2 * 0.01 / (D * 0.46))
    assert phi == pytest.approx(math.pi)


def test_straight_arm_tips():
    tips = forward_kinematics(ArmState())
    np.testing.assert_allclose(tips, [[0, 0, 0.15], [0, 0, 0.30], [0, 0, 0.45]], atol=1e-15)


def test_bent_base_carries_rest_chords():
    q = np.zeros(9)
    q[:3] = (0.03, 0.0, 0.01)
    tips = forward_kinematics(q)
    R = section_kinematics(L0 + q[:3]).rotation
    chord = np.array([0.0, 0.0, L0])
    np.testing.assert_allclose(tips[1] - tips[0], R @ chord, atol=1e-14)
    np.testing.assert_allclose(tips[2] - tips[1], R @ chord, atol=1e-14)


@given(st.lists(st.floats(-0.01, 0.07), min_size=9, max_size=9))
def test_chain_matches_composed_oracle(q):
    q = np.array(q)
    np.testing.assert_allclose(forward_kinematics(q), chain_oracle(q), atol=1e-11)


@given(st.lists(st.floats(-0.01, P.max_extension), min_size=9, max_size=9))
def test_tip_spacing_bounded_by_full_extension(q):
    tips = np.vstack([np.zeros(3), forward_kinematics(np.array(q))])
    spacing = np.linalg.norm(np.diff(tips, axis=0), axis=1)
    assert np.all(spacing <= L0 + P.max_extension + 1e-12)


def test_transform_composition_and_twist():
    A = section_kinematics((0.16, 0.14, 0.15))
    B = twist(0.4)
    C = A @ B
    x = np.array([0.1, -0.2, 0.3])
    np.testing.assert_allclose(C.apply(x), A.apply(B.apply(x)), atol=1e-15)


@pytest.mark.parametrize("bad", [(0.15, 0.0, 0.15), (0.15, -0.1, 0.15), (np.nan, 0.15, 0.15),
                                 (0.15, 0.15, 1.0)])
def test_invalid_lengths_rejected(bad):
    with pytest.raises(InvalidStateError):
        section_kinematics(bad)
