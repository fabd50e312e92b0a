"""Target series: NARMA emulation and delayed Legendre polynomials."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, TargetDivergedError

NARMA_COEFFICIENTS = (0.3, 0.05, 1.5, 0.1)
NARMA_INPUT_SCALE = 0.2
NARMA_BOUND = 10.0


@dataclass(frozen=True)
class NarmaSpec:
    """NARMA order ``n``; inputs in [0, 1] are mapped affinely onto [0, input_scale]."""

    order: int
    coefficients: tuple = NARMA_COEFFICIENTS
    input_scale: float = NARMA_INPUT_SCALE

    def __post_init__(self):
        if not (2 <= self.order <= 9):
            raise ContractError(f"NARMA order must be in 2..9, got {self.order}")

    @property
    def name(self):
        return f"narma{self.order}"


@dataclass(frozen=True)
class LegendreSpec:
    degree: int
    delay: int
    remap: bool = True

    def __post_init__(self):
        if not (0 <= self.degree <= 10):
            raise ContractError(f"Legendre degree must be in 0..10, got {self.degree}")
        if not (0 <= self.delay <= 50):
            raise ContractError(f"delay must be in 0..50, got {self.delay}")


def _values(inputs):
    return np.asarray(getattr(inputs, "values", inputs), dtype=float)


def narma_target(inputs, spec):
    """Run the NARMA recurrence on the scaled input stream.

    Order 2:  y_k = 0.4 y_{k-1} + 0.4 y_{k-1} y_{k-2} + 0.6 u_k^3 + 0.1
    Order n:  y_k = a y_{k-1} + a' y_{k-1} sum_{j<n} y_{k-1-j} + a'' u_{k-n+1} u_k + a'''

    Values before the start of the stream are zero.
    """
    u = _values(inputs) * spec.input_scale
    n = spec.order
    K = u.size
    y = np.zeros(K)
    if n == 2:
        y1 = y2 = 0.0
        for k in range(K):
            yk = 0.4 * y1 + 0.4 * y1 * y2 + 0.6 * u[k] ** 3 + 0.1
            _check_bound(yk, k)
            y[k] = yk
            y1, y2 = yk, y1
        return y
    a, a1, a2, a3 = spec.coefficients
    for k in range(K):
        y1 = y[k - 1] if k >= 1 else 0.0
        history = sum(y[max(k - n, 0):k])  # y_{k-1} .. y_{k-n}
        u_past = u[k - n + 1] if k - n + 1 >= 0 else 0.0
        yk = a * y1 + a1 * y1 * history + a2 * u_past * u[k] + a3
        _check_bound(yk, k)
        y[k] = yk
    return y


def _check_bound(value, k):
    if not abs(value) < NARMA_BOUND:
        raise TargetDivergedError(f"NARMA target diverged at step {k} (|y| = {abs(value):.3g})", step=k)


def _generalized_binomial(alpha, n):
    """C(alpha, n) for real ``alpha`` via the falling factorial."""
    out = 1.0
    for i in range(n):
        out *= (alpha - i) / (i + 1)
    return out


def legendre_coefficients(n):
    """Power-series coefficients c_m with P_n(x) = sum_m c_m x^m."""
    return np.array([
        2.0 ** n * math.comb(n, m) * _generalized_binomial((n + m - 1) / 2.0, n)
        for m in range(n + 1)
    ])


def legendre_value(n, x):
    """Legendre polynomial of degree ``n`` from its binomial-product expansion."""
    if not (0 <= n <= 10):
        raise ContractError(f"degree must be in 0..10, got {n}")
    coeffs = legendre_coefficients(n)
    x = np.asarray(x, dtype=float)
    # Horner from the top coefficient
    out = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out if out.ndim else float(out)


def legendre_target(inputs, spec):
    """``P_n`` of the input ``d`` steps back; inputs before the stream start count as 0.

    With ``remap`` the input is first mapped from [0, 1] to [-1, 1], the
    interval on which the polynomials are orthogonal.
    """
    u = _values(inputs)
    shifted = np.zeros_like(u)
    shifted[spec.delay:] = u[:u.size - spec.delay]
    x = 2.0 * shifted - 1.0 if spec.remap else shifted
    return legendre_value(spec.degree, x)


def legendre_targets(inputs, degrees, max_delay, remap=True):
    """Stack of targets, column ``i * (max_delay + 1) + d`` for ``degrees[i]`` and delay ``d``."""
    u = _values(inputs)
    cols = []
    for n in degrees:
        for d in range(max_delay + 1):
            cols.append(legendre_target(u, LegendreSpec(n, d, remap)))
    return np.column_stack(cols)


def write_target_csv(path, y):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("k", "y_target"))
        for k, v in enumerate(np.asarray(y, dtype=float)):
            writer.writerow((k, repr(float(v))))
