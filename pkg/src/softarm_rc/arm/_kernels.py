"""Compiled inner loops for the arm simulation.

All kernels take the scalar parameter tuple produced by
``ArmParams.kernel_args()`` unpacked as ``L0, d, cz, sz, k, c, m, mg``:
rest length, neutral-axis offset, cos/sin of the inter-section twist,
stiffness, damping, effective mass and the signed section weight.

Section parametrisation: with actuator j placed at angle -2*pi*j/3 about
the neutral axis, the bending vector ``(tx, ty) = kappa * s * (cos phi, sin phi)``
is linear in the three lengths, which keeps the transform smooth through
the straight configuration.
"""

import math

import numpy as np
from numba import njit

SQRT3 = math.sqrt(3.0)
FD_STEP = 1e-6
SERIES_THRESHOLD = 1e-6
DIVERGENCE_LIMIT = 1.0

OK = 0
DIVERGED = 1


@njit(cache=True)
def _bend(L1, L2, L3, d):
    s = (L1 + L2 + L3) / 3.0
    tx = (L2 + L3 - 2.0 * L1) / (3.0 * d)
    ty = SQRT3 * (L2 - L3) / (3.0 * d)
    th2 = tx * tx + ty * ty
    if th2 < SERIES_THRESHOLD * SERIES_THRESHOLD:
        # sin(t)/t and (1 - cos t)/t^2 to second order
        sa = 1.0 - th2 / 6.0
        ca = 0.5 - th2 / 24.0
    else:
        th = math.sqrt(th2)
        sa = math.sin(th) / th
        ca = (1.0 - math.cos(th)) / th2
    return s, tx, ty, sa, ca


@njit(cache=True)
def section_position(L1, L2, L3, d):
    s, tx, ty, sa, ca = _bend(L1, L2, L3, d)
    return s * ca * tx, s * ca * ty, s * sa


@njit(cache=True)
def section_transform(L1, L2, L3, d, R, p):
    """Write the base-to-tip rotation into ``R`` (3x3) and translation into ``p``."""
    s, tx, ty, sa, ca = _bend(L1, L2, L3, d)
    R[0, 0] = 1.0 - ca * tx * tx
    R[0, 1] = -ca * tx * ty
    R[0, 2] = sa * tx
    R[1, 0] = -ca * tx * ty
    R[1, 1] = 1.0 - ca * ty * ty
    R[1, 2] = sa * ty
    R[2, 0] = -sa * tx
    R[2, 1] = -sa * ty
    R[2, 2] = 1.0 - ca * (tx * tx + ty * ty)
    p[0] = s * ca * tx
    p[1] = s * ca * ty
    p[2] = s * sa


@njit(cache=True)
def _zrow_apply(r0, r1, r2, s, tx, ty, sa, ca, cz, sz):
    """Push the z-row ``r`` of the accumulated rotation through one bent section.

    Returns the height gained over the section and the z-row after the
    section plus the inter-section twist.
    """
    dz = s * (r0 * ca * tx + r1 * ca * ty + r2 * sa)
    a0 = r0 * (1.0 - ca * tx * tx) - r1 * ca * tx * ty - r2 * sa * tx
    a1 = -r0 * ca * tx * ty + r1 * (1.0 - ca * ty * ty) - r2 * sa * ty
    a2 = r0 * sa * tx + r1 * sa * ty + r2 * (1.0 - ca * (tx * tx + ty * ty))
    return dz, a0 * cz + a1 * sz, -a0 * sz + a1 * cz, a2


@njit(cache=True)
def _zrow_section(r0, r1, r2, L1, L2, L3, d, cz, sz):
    s, tx, ty, sa, ca = _bend(L1, L2, L3, d)
    return _zrow_apply(r0, r1, r2, s, tx, ty, sa, ca, cz, sz)


@njit(cache=True)
def tip_positions(q, L0, d, cz, sz, out):
    """Section tip coordinates in the base frame, written to ``out`` (3x3, row per tip)."""
    A = np.eye(3)
    tmp = np.empty((3, 3))
    Rs = np.empty((3, 3))
    ps = np.empty(3)
    t0 = 0.0
    t1 = 0.0
    t2 = 0.0
    for i in range(3):
        section_transform(L0 + q[3 * i], L0 + q[3 * i + 1], L0 + q[3 * i + 2], d, Rs, ps)
        for r in range(3):
            t_r = A[r, 0] * ps[0] + A[r, 1] * ps[1] + A[r, 2] * ps[2]
            if r == 0:
                t0 += t_r
            elif r == 1:
                t1 += t_r
            else:
                t2 += t_r
        out[i, 0] = t0
        out[i, 1] = t1
        out[i, 2] = t2
        # A <- A @ Rs @ Rz(twist)
        for r in range(3):
            for col in range(3):
                tmp[r, col] = A[r, 0] * Rs[0, col] + A[r, 1] * Rs[1, col] + A[r, 2] * Rs[2, col]
        for r in range(3):
            A[r, 0] = tmp[r, 0] * cz + tmp[r, 1] * sz
            A[r, 1] = -tmp[r, 0] * sz + tmp[r, 1] * cz
            A[r, 2] = tmp[r, 2]


@njit(cache=True)
def _heights(q, L0, d, cz, sz):
    dz1, a0, a1, a2 = _zrow_section(0.0, 0.0, 1.0, L0 + q[0], L0 + q[1], L0 + q[2], d, cz, sz)
    dz2, b0, b1, b2 = _zrow_section(a0, a1, a2, L0 + q[3], L0 + q[4], L0 + q[5], d, cz, sz)
    dz3, _, _, _ = _zrow_section(b0, b1, b2, L0 + q[6], L0 + q[7], L0 + q[8], d, cz, sz)
    z1 = dz1
    z2 = z1 + dz2
    z3 = z2 + dz3
    return z1, z2, z3


@njit(cache=True)
def gravity_potential(q, L0, d, cz, sz, mg):
    """Potential of the three section masses lumped at their chord midpoints."""
    z1, z2, z3 = _heights(q, L0, d, cz, sz)
    # sum of (z_{i-1} + z_i) / 2 over the sections
    return -mg * (z1 + z2 + 0.5 * z3)


@njit(cache=True)
def gravity_gradient(q, L0, d, cz, sz, mg, out):
    """Central-difference gradient of ``gravity_potential`` with step FD_STEP.

    Perturbing a coordinate only changes its own section and everything
    distal to it, so the proximal part of the chain and the bend of the
    distal sections are shared between perturbations.
    """
    if mg == 0.0:
        for j in range(9):
            out[j] = 0.0
        return
    e = FD_STEP
    La = L0 + q[0]
    Lb = L0 + q[1]
    Lc = L0 + q[2]
    Ld = L0 + q[3]
    Le = L0 + q[4]
    Lf = L0 + q[5]
    Lg = L0 + q[6]
    Lh = L0 + q[7]
    Li = L0 + q[8]
    s2, tx2, ty2, sa2, ca2 = _bend(Ld, Le, Lf, d)
    s3, tx3, ty3, sa3, ca3 = _bend(Lg, Lh, Li, d)
    _, a0, a1, a2 = _zrow_section(0.0, 0.0, 1.0, La, Lb, Lc, d, cz, sz)
    _, b0, b1, b2 = _zrow_apply(a0, a1, a2, s2, tx2, ty2, sa2, ca2, cz, sz)
    scale = -mg / (2.0 * e)

    # distal section: only z3 moves, weight 1/2
    for j in range(3):
        acc = 0.0
        for sgn in (1.0, -1.0):
            L1 = Lg + sgn * e if j == 0 else Lg
            L2 = Lh + sgn * e if j == 1 else Lh
            L3 = Li + sgn * e if j == 2 else Li
            px, py, pz = section_position(L1, L2, L3, d)
            acc += sgn * 0.5 * (b0 * px + b1 * py + b2 * pz)
        out[6 + j] = scale * acc

    # middle section: z2 moves with weight 3/2 (it also lifts z3), z3 via rotation
    for j in range(3):
        acc = 0.0
        for sgn in (1.0, -1.0):
            L1 = Ld + sgn * e if j == 0 else Ld
            L2 = Le + sgn * e if j == 1 else Le
            L3 = Lf + sgn * e if j == 2 else Lf
            dz2p, c0, c1, c2 = _zrow_section(a0, a1, a2, L1, L2, L3, d, cz, sz)
            dz3p, _, _, _ = _zrow_apply(c0, c1, c2, s3, tx3, ty3, sa3, ca3, cz, sz)
            acc += sgn * (1.5 * dz2p + 0.5 * dz3p)
        out[3 + j] = scale * acc

    # proximal section: whole chain
    for j in range(3):
        acc = 0.0
        for sgn in (1.0, -1.0):
            L1 = La + sgn * e if j == 0 else La
            L2 = Lb + sgn * e if j == 1 else Lb
            L3 = Lc + sgn * e if j == 2 else Lc
            dz1p, c0, c1, c2 = _zrow_section(0.0, 0.0, 1.0, L1, L2, L3, d, cz, sz)
            dz2p, f0, f1, f2 = _zrow_apply(c0, c1, c2, s2, tx2, ty2, sa2, ca2, cz, sz)
            dz3p, _, _, _ = _zrow_apply(f0, f1, f2, s3, tx3, ty3, sa3, ca3, cz, sz)
            acc += sgn * (2.5 * dz1p + 1.5 * dz2p + 0.5 * dz3p)
        out[j] = scale * acc


@njit(cache=True)
def acceleration(q, v, F, L0, d, cz, sz, k, c, m, mg, grad, out):
    gravity_gradient(q, L0, d, cz, sz, mg, grad)
    for i in range(9):
        out[i] = (F[i] - c * v[i] - k * q[i] - grad[i]) / m


@njit(cache=True)
def rk4_step(q, v, F, h, L0, d, cz, sz, k, c, m, mg, work):
    """Advance ``q``, ``v`` in place by one classical Runge-Kutta step.

    ``work`` is a (9, 9) scratch buffer.
    """
    a1 = work[0]
    a2 = work[1]
    a3 = work[2]
    a4 = work[3]
    qs = work[4]
    v2 = work[5]
    v3 = work[6]
    v4 = work[7]
    grad = work[8]
    hh = 0.5 * h
    acceleration(q, v, F, L0, d, cz, sz, k, c, m, mg, grad, a1)
    for i in range(9):
        qs[i] = q[i] + hh * v[i]
        v2[i] = v[i] + hh * a1[i]
    acceleration(qs, v2, F, L0, d, cz, sz, k, c, m, mg, grad, a2)
    for i in range(9):
        qs[i] = q[i] + hh * v2[i]
        v3[i] = v[i] + hh * a2[i]
    acceleration(qs, v3, F, L0, d, cz, sz, k, c, m, mg, grad, a3)
    for i in range(9):
        qs[i] = q[i] + h * v3[i]
        v4[i] = v[i] + h * a3[i]
    acceleration(qs, v4, F, L0, d, cz, sz, k, c, m, mg, grad, a4)
    h6 = h / 6.0
    for i in range(9):
        q[i] += h6 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])
        v[i] += h6 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])


@njit(cache=True)
def _bad_index(q, v):
    for i in range(9):
        if not (math.isfinite(q[i]) and math.isfinite(v[i])) or abs(q[i]) > DIVERGENCE_LIMIT:
            return i
    return -1


@njit(cache=True)
def simulate(u, w, q, v, n_frag, n_sub, h, pressure_unit, deadzone, area,
             L0, d, cz, sz, k, c, m, mg, trace, qrange):
    """Zero-order-hold drive of the base section, sampling tips every ``n_sub`` steps.

    ``q`` and ``v`` hold the initial state and are advanced in place;
    ``trace`` is (K, n_frag, 9); ``qrange`` receives the min and max
    extension seen. Returns ``(status, rk4 step count, bad index)``.
    """
    F = np.zeros(9)
    work = np.empty((9, 9))
    tips = np.empty((3, 3))
    qmin = np.inf
    qmax = -np.inf
    n = 0
    for step in range(u.shape[0]):
        for j in range(3):
            P = u[step] * w[j] * pressure_unit - deadzone
            F[j] = P * area if P > 0.0 else 0.0
        for frag in range(n_frag):
            for _ in range(n_sub):
                rk4_step(q, v, F, h, L0, d, cz, sz, k, c, m, mg, work)
                n += 1
                bad = _bad_index(q, v)
                if bad >= 0:
                    qrange[0] = qmin
                    qrange[1] = qmax
                    return DIVERGED, n, bad
                for i in range(9):
                    if q[i] < qmin:
                        qmin = q[i]
                    if q[i] > qmax:
                        qmax = q[i]
            tip_positions(q, L0, d, cz, sz, tips)
            for i in range(3):
                for j in range(3):
                    trace[step, frag, 3 * i + j] = tips[i, j]
    qrange[0] = qmin
    qrange[1] = qmax
    return OK, n, -1
