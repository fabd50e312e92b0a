"""Physical constants of the three-section pneumatic arm."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError, InvalidStateError

N_SECTIONS = 3
PMA_PER_SECTION = 3
N_COORDS = N_SECTIONS * PMA_PER_SECTION

DEFAULT_STIFFNESS = 1546.0
DEFAULT_DAMPING_RATIO = 0.15


@dataclass(frozen=True)
class ArmParams:
    """Geometry, mass and actuator constants (SI units).

    ``stiffness`` is chosen so that a 600 kPa command (500 kPa past the
    deadzone) extends an actuator by ``max_extension``. When ``damping`` or
    ``effective_mass`` are left as None they resolve to
    ``2 * 0.15 * sqrt(k * m_eff)`` and ``section_mass / 3``.

    The base frame's +z axis runs down the neutral axis of the hanging arm,
    which is also the direction of gravity. Set ``hanging=False`` for an
    upright arm (gravity along -z); note that the default stiffness cannot
    hold an upright arm straight.
    """

    rest_length: float = 0.15
    max_extension: float = 0.065
    neutral_offset: float = 0.0125
    section_joint_offset: float = math.pi / 3
    section_mass: float = 0.13
    pma_radius: float = 0.008
    stiffness: float = DEFAULT_STIFFNESS
    damping: float | None = None
    effective_mass: float | None = None
    gravity: float = 9.81
    deadzone_pressure: float = 1.0e5
    pressure_unit: float = 1.0e5
    deadzone: bool = True
    hanging: bool = True

    def __post_init__(self):
        positive = (
            "rest_length", "max_extension", "neutral_offset", "section_joint_offset",
            "section_mass", "pma_radius", "stiffness", "damping", "effective_mass",
            "pressure_unit",
        )
        for name in positive:
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ContractError(f"ArmParams.{name} must be finite and > 0, got {value!r}")
        if self.effective_mass is None:
            object.__setattr__(self, "effective_mass", self.section_mass / 3.0)
        if self.damping is None:
            c = 2.0 * DEFAULT_DAMPING_RATIO * math.sqrt(self.stiffness * self.effective_mass)
            object.__setattr__(self, "damping", c)
        if not (math.isfinite(self.gravity) and self.gravity >= 0):
            raise ContractError(f"ArmParams.gravity must be >= 0, got {self.gravity!r}")
        if not (math.isfinite(self.deadzone_pressure) and self.deadzone_pressure >= 0):
            raise ContractError("ArmParams.deadzone_pressure must be >= 0")
        if self.max_extension >= self.rest_length:
            raise ContractError("max_extension must be smaller than rest_length")

    @property
    def damping_ratio(self):
        return self.damping / (2.0 * math.sqrt(self.stiffness * self.effective_mass))

    @property
    def natural_frequency(self):
        """Undamped per-actuator natural frequency in Hz (gravity ignored)."""
        return math.sqrt(self.stiffness / self.effective_mass) / (2.0 * math.pi)

    @property
    def pma_area(self):
        return math.pi * self.pma_radius ** 2

    def kernel_args(self):
        """Scalar tuple consumed by the compiled kernels, in their argument order."""
        gsign = 1.0 if self.hanging else -1.0
        return (
            self.rest_length,
            self.neutral_offset,
            math.cos(self.section_joint_offset),
            math.sin(self.section_joint_offset),
            self.stiffness,
            self.damping,
            self.effective_mass,
            gsign * self.section_mass * self.gravity,
        )

    def soft_range(self):
        return (-0.01, self.max_extension + 0.02)


@dataclass
class ArmState:
    """Actuator extensions ``q`` (m), their rates ``qdot`` (m/s) and time ``t`` (s)."""

    q: np.ndarray = field(default_factory=lambda: np.zeros(N_COORDS))
    qdot: np.ndarray = field(default_factory=lambda: np.zeros(N_COORDS))
    t: float = 0.0

    def __post_init__(self):
        self.q = np.array(self.q, dtype=float)
        self.qdot = np.array(self.qdot, dtype=float)
        if self.q.shape != (N_COORDS,) or self.qdot.shape != (N_COORDS,):
            raise ContractError(f"ArmState expects q and qdot of shape ({N_COORDS},)")

    def check_finite(self):
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qdot))):
            raise InvalidStateError(f"non-finite arm state at t={self.t}")
        return self

    def copy(self):
        return ArmState(self.q.copy(), self.qdot.copy(), self.t)
