"""Pure-numpy time-stepping kernels (reference path and fallback backend).

Each full-solve driver advances a field whose first two time levels are
already populated.  Status codes returned by the drivers:

    0  success
    1  non-finite value detected (bad_step = offending time level)
    2  singular/tiny pivot in a tridiagonal solve
    3  degenerate Robin closure coefficient

Boundary kinds: 0 = homogeneous Dirichlet, 1 = Robin transmission with
trace data ``gl``/``gr`` indexed by time level.  The Robin closure at the
right boundary node j enforces

    (3 u_j - 4 u_{j-1} + u_{j-2}) / (2 dx)
        + p (3 u_j^{n+1} - 4 u_j^n + u_j^{n-1}) / (2 dt) + q u_j = g^{n+1}

(one-sided second-order stencils pointing into the subdomain, backward in
time), and the mirrored form with the minus sign at the left boundary.
"""

from __future__ import annotations

import numpy as np

OK = 0
NONFINITE = 1
SINGULAR = 2
DEGENERATE_CLOSURE = 3

PIVOT_RTOL = 1e-14


def thomas(dl, d, du, rhs):
    """Solve a tridiagonal system; returns (x, status).

    ``dl[i]`` multiplies x[i-1] in row i (dl[0] unused), ``du[i]``
    multiplies x[i+1] (du[-1] unused).  Arrays are not modified.
    """
    n = d.size
    c = np.empty(n)
    dd = np.empty(n)
    x = np.empty(n)
    scale0 = abs(d[0]) + abs(du[0] if n > 1 else 0.0)
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


def explicit_interior(u_n, u_nm1, f_n, c, gamma, dx, dt):
    """New time level with interior nodes updated; boundary entries are 0."""
    lam = (c * dt / dx) ** 2
    a_new = 1.0 + 0.5 * gamma * dt
    a_old = 1.0 - 0.5 * gamma * dt
    out = np.zeros_like(u_n)
    d2 = u_n[2:] - 2.0 * u_n[1:-1] + u_n[:-2]
    out[1:-1] = (2.0 * u_n[1:-1] - a_old * u_nm1[1:-1] + lam * d2) / a_new
    if f_n is not None:
        out[1:-1] += (dt * dt) * f_n[1:-1] / a_new
    return out


def robin_coefficient(p, q, dx, dt):
    """Coefficient of the boundary unknown in the scalar Robin closure."""
    return 1.5 / dx + 1.5 * p / dt + q


def robin_value_right(u_new, u_n, u_nm1, p, q, dx, dt, g):
    """Boundary value closing the explicit update at the right end."""
    A = robin_coefficient(p, q, dx, dt)
    B = (-4.0 * u_new[-2] + u_new[-3]) / (2.0 * dx) \
        + p * (-4.0 * u_n[-1] + u_nm1[-1]) / (2.0 * dt)
    return (g - B) / A, A


def robin_value_left(u_new, u_n, u_nm1, p, q, dx, dt, g):
    """Boundary value closing the explicit update at the left end."""
    A = -robin_coefficient(p, q, dx, dt)
    K = (4.0 * u_new[1] - u_new[2]) / (2.0 * dx) \
        + p * (4.0 * u_n[0] - u_nm1[0]) / (2.0 * dt)
    return (g - K) / A, A


def implicit_rows(u_n, u_nm1, f_n, c, gamma, nu, dx, dt):
    """Tridiagonal rows of the implicit scheme at every node.

    Rows 0 and m-1 are placeholders (identity) to be overwritten by the
    boundary closures.
    """
    m = u_n.size
    nur = nu / (2.0 * dt * dx * dx)
    dl = np.full(m, -nur)
    du = np.full(m, -nur)
    d = np.full(m, 1.0 / (dt * dt) + 0.5 * gamma / dt + 2.0 * nur)
    rhs = np.zeros(m)
    d2n = u_n[2:] - 2.0 * u_n[1:-1] + u_n[:-2]
    d2m = u_nm1[2:] - 2.0 * u_nm1[1:-1] + u_nm1[:-2]
    rhs[1:-1] = ((2.0 * u_n[1:-1] - u_nm1[1:-1]) / (dt * dt)
                 + 0.5 * gamma / dt * u_nm1[1:-1]
                 + (c * c) / (dx * dx) * d2n
                 - nur * d2m)
    if f_n is not None:
        rhs[1:-1] += f_n[1:-1]
    dl[0] = du[0] = 0.0
    dl[m - 1] = du[m - 1] = 0.0
    d[0] = d[m - 1] = 1.0
    return dl, d, du, rhs


def close_dirichlet(dl, d, du, rhs, side):
    i = 0 if side == 0 else d.size - 1
    dl[i] = du[i] = 0.0
    d[i] = 1.0
    rhs[i] = 0.0


def close_robin_right(dl, d, du, rhs, u_n, u_nm1, p, q, dx, dt, g):
    """Eliminate the u_{m-3} term of the one-sided stencil through the
    interior row at m-2, preserving tridiagonal bandwidth."""
    m = d.size
    C = robin_coefficient(p, q, dx, dt)
    rhs_c = g - p * (-4.0 * u_n[m - 1] + u_nm1[m - 1]) / (2.0 * dt)
    beta = 1.0 / (2.0 * dx * dl[m - 2])
    dl[m - 1] = -2.0 / dx - beta * d[m - 2]
    d[m - 1] = C - beta * du[m - 2]
    rhs[m - 1] = rhs_c - beta * rhs[m - 2]


def close_robin_left(dl, d, du, rhs, u_n, u_nm1, p, q, dx, dt, g):
    A0 = -robin_coefficient(p, q, dx, dt)
    rhs_c = g - p * (4.0 * u_n[0] - u_nm1[0]) / (2.0 * dt)
    beta = 1.0 / (2.0 * dx * du[1])
    d[0] = A0 + beta * dl[1]
    du[0] = 2.0 / dx + beta * d[1]
    rhs[0] = rhs_c + beta * rhs[1]


def solve_explicit(u, f, has_f, c, gamma, dx, dt, left_kind, right_kind, p, q, gl, gr):
    """Advance levels 2..nt of an explicit (nu = 0) solve in place."""
    nt = u.shape[0] - 1
    closure_scale = 1.5 / dx
    for n in range(1, nt):
        f_n = f[n] if has_f else None
        new = explicit_interior(u[n], u[n - 1], f_n, c, gamma, dx, dt)
        if left_kind == 1:
            val, A = robin_value_left(new, u[n], u[n - 1], p, q, dx, dt, gl[n + 1])
            if abs(A) < 1e-14 * closure_scale:
                return DEGENERATE_CLOSURE, n + 1
            new[0] = val
        if right_kind == 1:
            val, A = robin_value_right(new, u[n], u[n - 1], p, q, dx, dt, gr[n + 1])
            if abs(A) < 1e-14 * closure_scale:
                return DEGENERATE_CLOSURE, n + 1
            new[-1] = val
        if not np.all(np.isfinite(new)):
            return NONFINITE, n + 1
        u[n + 1] = new
    return OK, 0


def solve_implicit(u, f, has_f, c, gamma, nu, dx, dt, left_kind, right_kind, p, q, gl, gr):
    """Advance levels 2..nt of an implicit (nu > 0) solve in place."""
    nt = u.shape[0] - 1
    for n in range(1, nt):
        f_n = f[n] if has_f else None
        dl, d, du, rhs = implicit_rows(u[n], u[n - 1], f_n, c, gamma, nu, dx, dt)
        if left_kind == 1:
            close_robin_left(dl, d, du, rhs, u[n], u[n - 1], p, q, dx, dt, gl[n + 1])
        else:
            close_dirichlet(dl, d, du, rhs, 0)
        if right_kind == 1:
            close_robin_right(dl, d, du, rhs, u[n], u[n - 1], p, q, dx, dt, gr[n + 1])
        else:
            close_dirichlet(dl, d, du, rhs, 1)
        x, status = thomas(dl, d, du, rhs)
        if status != OK:
            return status, n + 1
        if not np.all(np.isfinite(x)):
            return NONFINITE, n + 1
        u[n + 1] = x
    return OK, 0
