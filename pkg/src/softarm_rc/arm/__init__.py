"""Surrogate dynamics and kinematics of the pneumatic continuum arm."""

from .dynamics import (
    H_MAX,
    N_FRAGMENTS,
    SENSOR_NAMES,
    SensorTrace,
    dynamics_rhs,
    gravity_force,
    gravity_potential,
    integrate_step,
    mechanical_energy,
    pressure_to_force,
    resolve_step,
    simulate_response,
)
from .kinematics import Transform, curvature_and_plane, forward_kinematics, section_kinematics, twist
from .params import N_COORDS, ArmParams, ArmState

__all__ = [
    "ArmParams", "ArmState", "H_MAX", "N_COORDS", "N_FRAGMENTS", "SENSOR_NAMES",
    "SensorTrace", "Transform", "curvature_and_plane", "dynamics_rhs", "forward_kinematics",
    "gravity_force", "gravity_potential", "integrate_step", "mechanical_energy",
    "pressure_to_force", "resolve_step", "section_kinematics", "simulate_response", "twist",
]
