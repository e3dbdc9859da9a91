"""Numba twins of the time-stepping kernels.

Same contracts and status codes as :mod:`oswr.kernels_np`; the loops are
fused into single jitted drivers so a whole subdomain solve runs without
returning to Python.  Importing this module requires numba.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from .kernels_np import DEGENERATE_CLOSURE, NONFINITE, OK, PIVOT_RTOL, SINGULAR

_jit = {"cache": True, "nogil": True}


@nb.njit(**_jit)
def thomas(dl, d, du, rhs):
    n = d.shape[0]
    c = np.empty(n)
    dd = np.empty(n)
    x = np.empty(n)
    scale0 = abs(d[0]) + (abs(du[0]) if n > 1 else 0.0)
    if abs(d[0]) < PIVOT_RTOL * max(scale0, 1e-300):
        return x, SINGULAR
    c[0] = du[0] / d[0] if n > 1 else 0.0
    dd[0] = rhs[0] / d[0]
    for i in range(1, n):
        piv = d[i] - dl[i] * c[i - 1]
        scale = abs(dl[i]) + abs(d[i]) + (abs(du[i]) if i < n - 1 else 0.0)
        if abs(piv) < PIVOT_RTOL * max(scale, 1e-300):
            return x, SINGULAR
        if i < n - 1:
            c[i] = du[i] / piv
        dd[i] = (rhs[i] - dl[i] * dd[i - 1]) / piv
    x[n - 1] = dd[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dd[i] - c[i] * x[i + 1]
    return x, OK


@nb.njit(**_jit)
def solve_explicit(u, f, has_f, c, gamma, dx, dt, left_kind, right_kind, p, q, gl, gr):
    nt = u.shape[0] - 1
    m = u.shape[1]
    lam = (c * dt / dx) ** 2
    a_new = 1.0 + 0.5 * gamma * dt
    a_old = 1.0 - 0.5 * gamma * dt
    closure_scale = 1.5 / dx
    for n in range(1, nt):
        for i in range(1, m - 1):
            v = (2.0 * u[n, i] - a_old * u[n - 1, i]
                 + lam * (u[n, i + 1] - 2.0 * u[n, i] + u[n, i - 1])) / a_new
            if has_f:
                v += (dt * dt) * f[n, i] / a_new
            u[n + 1, i] = v
        if left_kind == 1:
            A = -(1.5 / dx + 1.5 * p / dt + q)
            if abs(A) < 1e-14 * closure_scale:
                return DEGENERATE_CLOSURE, n + 1
            K = (4.0 * u[n + 1, 1] - u[n + 1, 2]) / (2.0 * dx) \
                + p * (4.0 * u[n, 0] - u[n - 1, 0]) / (2.0 * dt)
            u[n + 1, 0] = (gl[n + 1] - K) / A
        else:
            u[n + 1, 0] = 0.0
        if right_kind == 1:
            A = 1.5 / dx + 1.5 * p / dt + q
            if abs(A) < 1e-14 * closure_scale:
                return DEGENERATE_CLOSURE, n + 1
            B = (-4.0 * u[n + 1, m - 2] + u[n + 1, m - 3]) / (2.0 * dx) \
                + p * (-4.0 * u[n, m - 1] + u[n - 1, m - 1]) / (2.0 * dt)
            u[n + 1, m - 1] = (gr[n + 1] - B) / A
        else:
            u[n + 1, m - 1] = 0.0
        for i in range(m):
            if not np.isfinite(u[n + 1, i]):
                return NONFINITE, n + 1
    return OK, 0


@nb.njit(**_jit)
def solve_implicit(u, f, has_f, c, gamma, nu, dx, dt, left_kind, right_kind, p, q, gl, gr):
    nt = u.shape[0] - 1
    m = u.shape[1]
    nur = nu / (2.0 * dt * dx * dx)
    diag_val = 1.0 / (dt * dt) + 0.5 * gamma / dt + 2.0 * nur
    dl = np.empty(m)
    d = np.empty(m)
    du = np.empty(m)
    rhs = np.empty(m)
    for n in range(1, nt):
        for i in range(1, m - 1):
            dl[i] = -nur
            du[i] = -nur
            d[i] = diag_val
            rhs[i] = ((2.0 * u[n, i] - u[n - 1, i]) / (dt * dt)
                      + 0.5 * gamma / dt * u[n - 1, i]
                      + (c * c) / (dx * dx) * (u[n, i + 1] - 2.0 * u[n, i] + u[n, i - 1])
                      - nur * (u[n - 1, i + 1] - 2.0 * u[n - 1, i] + u[n - 1, i - 1]))
            if has_f:
                rhs[i] += f[n, i]
        if left_kind == 1:
            A0 = -(1.5 / dx + 1.5 * p / dt + q)
            rhs_c = gl[n + 1] - p * (4.0 * u[n, 0] - u[n - 1, 0]) / (2.0 * dt)
            beta = 1.0 / (2.0 * dx * du[1])
            dl[0] = 0.0
            d[0] = A0 + beta * dl[1]
            du[0] = 2.0 / dx + beta * d[1]
            rhs[0] = rhs_c + beta * rhs[1]
        else:
            dl[0] = 0.0
            du[0] = 0.0
            d[0] = 1.0
            rhs[0] = 0.0
        if right_kind == 1:
            C = 1.5 / dx + 1.5 * p / dt + q
            rhs_c = gr[n + 1] - p * (-4.0 * u[n, m - 1] + u[n - 1, m - 1]) / (2.0 * dt)
            beta = 1.0 / (2.0 * dx * dl[m - 2])
            du[m - 1] = 0.0
            dl[m - 1] = -2.0 / dx - beta * d[m - 2]
            d[m - 1] = C - beta * du[m - 2]
            rhs[m - 1] = rhs_c - beta * rhs[m - 2]
        else:
            dl[m - 1] = 0.0
            du[m - 1] = 0.0
            d[m - 1] = 1.0
            rhs[m - 1] = 0.0
        x, status = thomas(dl, d, du, rhs)
        if status != OK:
            return status, n + 1
        for i in range(m):
            if not np.isfinite(x[i]):
                return NONFINITE, n + 1
            u[n + 1, i] = x[i]
    return OK, 0
