"""Constant-curvature kinematics of the three-section arm.

Each section is a circular arc. For actuator lengths ``(L1, L2, L3)`` at
``d_n`` from the neutral axis:

    s     = (L1 + L2 + L3) / 3
    kappa = 2 sqrt(L1^2 + L2^2 + L3^2 - L1 L2 - L2 L3 - L1 L3) / (d_n (L1 + L2 + L3))
    phi   = atan2(sqrt(3) (L2 - L3), L2 + L3 - 2 L1)

The arc bends towards ``phi`` in the section base frame. Adjacent sections
are joined with a fixed twist about the neutral axis.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidStateError
from . import _kernels
from .params import N_COORDS, ArmParams, ArmState

LENGTH_MARGIN = 0.05


@dataclass(frozen=True)
class Transform:
    rotation: np.ndarray
    translation: np.ndarray

    def __matmul__(self, other):
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def apply(self, point):
        return self.rotation @ np.asarray(point, dtype=float) + self.translation


def twist(angle):
    """Pure rotation about the neutral (z) axis."""
    c, s = math.cos(angle), math.sin(angle)
    return Transform(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]), np.zeros(3))


def curvature_and_plane(lengths, params=None):
    """Return ``(s, kappa, phi)`` for one section."""
    d = (params or ArmParams()).neutral_offset
    L1, L2, L3 = _checked_lengths(lengths, params or ArmParams())
    total = L1 + L2 + L3
    radicand = max(L1 * L1 + L2 * L2 + L3 * L3 - L1 * L2 - L2 * L3 - L1 * L3, 0.0)
    kappa = 2.0 * math.sqrt(radicand) / (d * total)
    phi = math.atan2(math.sqrt(3.0) * (L2 - L3), L2 + L3 - 2.0 * L1)
    return total / 3.0, kappa, phi


def _checked_lengths(lengths, params):
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (3,):
        raise InvalidStateError(f"expected 3 actuator lengths, got shape {lengths.shape}")
    upper = params.rest_length + params.max_extension + LENGTH_MARGIN
    for L in lengths:
        if not math.isfinite(L) or L <= 0.0:
            raise InvalidStateError(f"actuator length must be finite and positive, got {L!r}")
        if L >= upper:
            raise InvalidStateError(f"actuator length {L!r} m exceeds {upper} m")
    return float(lengths[0]), float(lengths[1]), float(lengths[2])


def section_kinematics(lengths, params=None):
    """Base-to-tip rigid transform of one section from its actuator lengths."""
    params = params or ArmParams()
    L1, L2, L3 = _checked_lengths(lengths, params)
    R = np.empty((3, 3))
    p = np.empty(3)
    _kernels.section_transform(L1, L2, L3, params.neutral_offset, R, p)
    return Transform(R, p)


def forward_kinematics(state, params=None):
    """Tip coordinates of the three sections, shape (3, 3), one row per tip.

    ``state`` may be an ``ArmState`` or a bare array of extensions.
    """
    params = params or ArmParams()
    q = state.q if isinstance(state, ArmState) else np.asarray(state, dtype=float)
    if q.shape != (N_COORDS,):
        raise InvalidStateError(f"expected {N_COORDS} extensions, got shape {q.shape}")
    for i in range(3):
        _checked_lengths(params.rest_length + q[3 * i:3 * i + 3], params)
    L0, d, cz, sz = params.kernel_args()[:4]
    out = np.empty((3, 3))
    _kernels.tip_positions(np.ascontiguousarray(q), L0, d, cz, sz, out)
    return out
