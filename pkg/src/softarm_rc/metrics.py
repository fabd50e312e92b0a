"""Error and memory measures on readout output."""

import logging

import numpy as np

from .errors import ContractError, MetricError

logger = logging.getLogger(__name__)

MAX_DELAY = 50
CONSTANT_RTOL = 1e-12


def _is_constant(x, centred_sumsq):
    spread = np.sqrt(centred_sumsq / x.shape[0])
    return spread <= CONSTANT_RTOL * max(float(np.max(np.abs(x))), 1.0)


def _window(y, target, window):
    y = np.asarray(y, dtype=float)
    target = np.asarray(target, dtype=float)
    if y.shape != target.shape:
        raise ContractError(f"output {y.shape} and target {target.shape} differ in shape")
    if window is not None:
        y, target = y[window], target[window]
    if y.shape[0] == 0:
        raise ContractError("empty evaluation window")
    return y, target


def nmse(y, target, window=None):
    """sum (target - y)^2 / sum target^2 over ``window`` (a slice; default everything)."""
    y, target = _window(y, target, window)
    denom = float(np.sum(target ** 2))
    if denom == 0.0:
        raise MetricError("NMSE undefined: target is identically zero in the window")
    return float(np.sum((target - y) ** 2)) / denom


def memory_function(y, target, window=None):
    """Squared correlation of output and target, in [0, 1].

    A constant series has no defined correlation; it scores 0. Spread below
    ``CONSTANT_RTOL`` times the series magnitude counts as constant, since
    a constant computed in floating point is rarely bit-identical.
    """
    y, target = _window(y, target, window)
    dy = y - y.mean()
    dt = target - target.mean()
    vy = float(dy @ dy)
    vt = float(dt @ dt)
    if _is_constant(y, vy) or _is_constant(target, vt):
        logger.debug("degenerate series in memory function (var y=%g, var target=%g)", vy, vt)
        return 0.0
    mf = float(dy @ dt) ** 2 / (vy * vt)
    return min(max(mf, 0.0), 1.0)


def memory_functions(Y, T, window=None):
    """Column-wise ``memory_function`` for output/target matrices."""
    Y = np.asarray(Y, dtype=float)
    T = np.asarray(T, dtype=float)
    return np.array([memory_function(Y[:, i], T[:, i], window) for i in range(Y.shape[1])])


def capacity(mf, max_delay=MAX_DELAY):
    """Sum of the memory function over delays 0..max_delay."""
    mf = np.asarray(mf, dtype=float)
    if mf.shape != (max_delay + 1,):
        raise ContractError(f"expected {max_delay + 1} memory-function values, got shape {mf.shape}")
    if not np.all(np.isfinite(mf)):
        raise ContractError("missing (non-finite) memory-function value")
    return float(mf.sum())
