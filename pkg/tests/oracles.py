"""Reference implementations written independently of the package code."""

import math

import numpy as np


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def arc(lengths, d):
    """Closed-form constant-curvature arc from the curvature/plane formulas."""
    L1, L2, L3 = lengths
    total = L1 + L2 + L3
    s = total / 3
    radicand = ((L1 - L2) ** 2 + (L2 - L3) ** 2 + (L1 - L3) ** 2) / 2
    kappa = 2 * math.sqrt(radicand) / (d * total)
    phi = math.atan2(math.sqrt(3) * (L2 - L3), L2 + L3 - 2 * L1)
    theta = kappa * s
    if theta < 1e-9:
        local = np.array([0.0, 0.0, s])
    else:
        local = np.array([2 * math.sin(theta / 2) ** 2 / kappa, 0.0, math.sin(theta) / kappa])
    return rot_z(phi) @ rot_y(theta) @ rot_z(-phi), rot_z(phi) @ local


def tips(q, params):
    R = np.eye(3)
    p = np.zeros(3)
    out = []
    for i in range(3):
        Rs, ps = arc(params.rest_length + np.asarray(q[3 * i:3 * i + 3]), params.neutral_offset)
        p = p + R @ ps
        out.append(p)
        R = R @ Rs @ rot_z(params.section_joint_offset)
    return np.array(out)


def potential(q, params):
    """Section masses at their chord midpoints; +z points along gravity for a hanging arm."""
    z = np.concatenate([[0.0], tips(q, params)[:, 2]])
    mid = 0.5 * (z[:-1] + z[1:])
    sign = -1.0 if params.hanging else 1.0
    return sign * params.section_mass * params.gravity * mid.sum()


def potential_gradient(q, params, step=1e-5):
    q = np.asarray(q, dtype=float)
    grad = np.empty(q.size)
    for i in range(q.size):
        e = np.zeros(q.size)
        e[i] = step
        grad[i] = (potential(q + e, params) - potential(q - e, params)) / (2 * step)
    return grad


def damped_oscillator(q0, t, k, c, m):
    """Free response of m x'' + c x' + k x = 0 from rest at q0 (underdamped)."""
    w0 = math.sqrt(k / m)
    zeta = c / (2 * math.sqrt(k * m))
    wd = w0 * math.sqrt(1 - zeta ** 2)
    return q0 * math.exp(-zeta * w0 * t) * (math.cos(wd * t) + zeta * w0 / wd * math.sin(wd * t))


def narma_oracle(u, n, steps):
    """Literal transcription of the recurrences with zero history."""
    y = {}
    get = lambda k: y.get(k, 0.0)  # noqa: E731
    uu = lambda k: 0.2 * u[k] if k >= 0 else 0.0  # noqa: E731
    for k in range(steps):
        if n == 2:
            y[k] = 0.4 * get(k - 1) + 0.4 * get(k - 1) * get(k - 2) + 0.6 * uu(k) ** 3 + 0.1
        else:
            s = sum(get(k - j - 1) for j in range(n))
            y[k] = 0.3 * get(k - 1) + 0.05 * get(k - 1) * s + 1.5 * uu(k - n + 1) * uu(k) + 0.1
    return np.array([y[k] for k in range(steps)])


def recurrence_oracle(n, x):
    """Bonnet recurrence (m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}."""
    x = np.asarray(x, dtype=float)
    p_prev, p = np.ones_like(x), x.copy()
    if n == 0:
        return p_prev
    for m in range(1, n):
        p_prev, p = p, ((2 * m + 1) * x * p - m * p_prev) / (m + 1)
    return p
