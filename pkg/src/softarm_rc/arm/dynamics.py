"""Surrogate equations of motion and their integration.

The arm is modelled per actuator coordinate as

    m_eff * qddot = F - c * qdot - k * q - dU_g/dq

with ``U_g`` the potential of the three section masses lumped at the
midpoints of their chords. ``dU_g/dq`` is taken by central differences, so
all coupling between coordinates enters through the kinematics.
"""

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, IntegrationDivergedError
from . import _kernels
from .params import N_COORDS, ArmParams, ArmState

logger = logging.getLogger(__name__)

H_MAX = 1e-3
N_FRAGMENTS = 10
SENSOR_NAMES = ("s1x", "s1y", "s1z", "s2x", "s2y", "s2z", "s3x", "s3y", "s3z")


def pressure_to_force(u, weights, params=None):
    """Axial forces (N) produced by driving the base section with input ``u``.

    Actuator j sees ``u * w_j * pressure_unit`` Pa; only the part above the
    deadzone pressure produces force, over the actuator area ``pi r^2``.
    """
    params = params or ArmParams()
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (3,):
        raise ContractError(f"expected 3 base-section weights, got shape {weights.shape}")
    if not (0.0 <= u <= 1.0):
        raise ContractError(f"input must lie in [0, 1], got {u!r}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ContractError(f"input weights must be finite and non-negative, got {weights}")
    deadzone = params.deadzone_pressure if params.deadzone else 0.0
    pressure = u * weights * params.pressure_unit
    force = np.zeros(N_COORDS)
    force[:3] = np.maximum(pressure - deadzone, 0.0) * params.pma_area
    return force


def gravity_potential(q, params=None):
    params = params or ArmParams()
    L0, d, cz, sz, *_, mg = params.kernel_args()
    return _kernels.gravity_potential(np.asarray(q, dtype=float), L0, d, cz, sz, mg)


def gravity_force(q, params=None):
    """Gradient of the gravitational potential, the ``G`` term of the model."""
    params = params or ArmParams()
    L0, d, cz, sz, *_, mg = params.kernel_args()
    out = np.empty(N_COORDS)
    _kernels.gravity_gradient(np.ascontiguousarray(q, dtype=float), L0, d, cz, sz, mg, out)
    return out


def mechanical_energy(state, params=None, force=None):
    """Kinetic + elastic + gravitational energy, minus the work potential of a constant ``force``."""
    params = params or ArmParams()
    q, v = state.q, state.qdot
    energy = (
        0.5 * params.effective_mass * float(v @ v)
        + 0.5 * params.stiffness * float(q @ q)
        + gravity_potential(q, params)
    )
    if force is not None:
        energy -= float(np.asarray(force) @ q)
    return energy


def _check_force(force):
    force = np.ascontiguousarray(force, dtype=float)
    if force.shape != (N_COORDS,):
        raise ContractError(f"expected a force vector of shape ({N_COORDS},)")
    return force


def dynamics_rhs(state, force, params=None):
    """Time derivative ``(qdot, qddot)`` of the state under a constant force."""
    params = params or ArmParams()
    force = _check_force(force)
    L0, d, cz, sz, k, c, m, mg = params.kernel_args()
    grad = np.empty(N_COORDS)
    acc = np.empty(N_COORDS)
    _kernels.acceleration(
        np.ascontiguousarray(state.q), np.ascontiguousarray(state.qdot), force,
        L0, d, cz, sz, k, c, m, mg, grad, acc,
    )
    if not np.all(np.isfinite(acc)):
        raise IntegrationDivergedError(f"non-finite acceleration at t={state.t}", t=state.t)
    return state.qdot.copy(), acc


def integrate_step(state, force, h, params=None, h_max=H_MAX):
    """One fixed-step RK4 advance with the force held constant; returns a new state."""
    params = params or ArmParams()
    if not (0.0 < h <= h_max):
        raise ContractError(f"step size must satisfy 0 < h <= {h_max}, got {h!r}")
    force = _check_force(force)
    q = state.q.copy()
    v = state.qdot.copy()
    work = np.empty((9, 9))
    _kernels.rk4_step(q, v, force, h, *params.kernel_args(), work)
    t = state.t + h
    bad = _kernels._bad_index(q, v)
    if bad >= 0:
        raise IntegrationDivergedError(
            f"integration diverged at t={t:.6g} s in coordinate {bad}", t=t, index=bad)
    return ArmState(q, v, t)


def resolve_step(tau, h=None, h_max=H_MAX, n_fragments=N_FRAGMENTS):
    """Pick the RK4 step so that the sampling interval ``tau / n_fragments`` is a whole number of steps.

    Returns ``(h, substeps)``. Without an explicit ``h`` the target is
    ``min(h_max, tau / 100)``; the step is only ever shortened.
    """
    if not (tau > 0 and math.isfinite(tau)):
        raise ContractError(f"tau must be positive, got {tau!r}")
    interval = tau / n_fragments
    target = min(h_max, tau / 100.0) if h is None else h
    if not (0.0 < target <= h_max):
        raise ContractError(f"step size must satisfy 0 < h <= {h_max}, got {target!r}")
    substeps = max(1, math.ceil(interval / target - 1e-9))
    return interval / substeps, substeps


@dataclass
class SensorTrace:
    """Tip coordinates sampled ``n_fragments`` times per input step, shape (K, n_fragments, 9)."""

    data: np.ndarray
    tau: float
    h: float
    final_state: ArmState | None = None

    @property
    def steps(self):
        return self.data.shape[0]

    @property
    def n_fragments(self):
        return self.data.shape[1]

    def sample_times(self):
        k = np.arange(self.steps)[:, None]
        f = np.arange(1, self.n_fragments + 1)[None, :]
        return (k + f / self.n_fragments) * self.tau

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("step", "frag") + SENSOR_NAMES)
            for k in range(self.steps):
                for f in range(self.n_fragments):
                    writer.writerow([k, f + 1] + [repr(float(x)) for x in self.data[k, f]])


def simulate_response(inputs, weights, params=None, tau=1.0, h=None, h_max=H_MAX,
                      n_fragments=N_FRAGMENTS, initial_state=None):
    """Drive the base section with zero-order-held inputs and record the tips.

    ``inputs`` is an ``InputStream`` or a sequence of values in [0, 1]. Each
    value is held for ``tau`` seconds; the nine tip coordinates are recorded
    at the end of each of the ``n_fragments`` sub-intervals.
    """
    params = params or ArmParams()
    u = np.ascontiguousarray(getattr(inputs, "values", inputs), dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise ContractError("inputs must be a non-empty 1-D sequence")
    if np.any(u < 0) or np.any(u > 1) or not np.all(np.isfinite(u)):
        raise ContractError("inputs must lie in [0, 1]")
    w = np.ascontiguousarray(weights, dtype=float)
    if w.shape != (3,) or np.any(w < 0):
        raise ContractError("weights must be three non-negative values")
    h, substeps = resolve_step(tau, h, h_max, n_fragments)
    state = initial_state.copy() if initial_state is not None else ArmState()
    q, v = state.q, state.qdot
    trace = np.empty((u.size, n_fragments, N_COORDS))
    qrange = np.empty(2)
    deadzone = params.deadzone_pressure if params.deadzone else 0.0
    status, n_steps, bad = _kernels.simulate(
        u, w, q, v, n_fragments, substeps, h, params.pressure_unit, deadzone,
        params.pma_area, *params.kernel_args(), trace, qrange,
    )
    t = state.t + n_steps * h
    if status != _kernels.OK:
        step = (n_steps - 1) // (n_fragments * substeps)
        raise IntegrationDivergedError(
            f"integration diverged at t={t:.6g} s (input step {step}) in coordinate {bad}",
            t=t, index=bad, step=step)
    lo, hi = params.soft_range()
    if qrange[0] < lo or qrange[1] > hi:
        logger.warning("actuator extension left the expected range [%g, %g] m: min %.4g, max %.4g",
                       lo, hi, qrange[0], qrange[1])
    return SensorTrace(trace, tau, h, ArmState(q, v, t))
