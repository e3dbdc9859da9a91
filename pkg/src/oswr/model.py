"""Validated domain types and the single-mode reference problem.

The test problem used throughout is the separable standing wave
``u(x, t) = sin(k x) T(t)`` with ``k = m pi / L``, whose amplitude solves

    T'' + (gamma + nu k^2) T' + c^2 k^2 T = 0.

It admits a closed form for every damping combination (underdamped,
critically damped, overdamped), which makes it usable as ground truth for
the time-domain solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError

#: relative tolerance for "lands exactly on the grid" checks
GRID_ALIGN_RTOL = 1e-9


@dataclass(frozen=True)
class PhysicalParams:
    """Wave speed, the two damping coefficients and the domain length."""

    c: float
    gamma: float
    nu: float
    L: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValidationError(f"wave speed must be positive, got c={self.c}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValidationError(f"domain length must be positive, got L={self.L}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValidationError(f"zeroth-order damping must be >= 0, got gamma={self.gamma}")
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise ValidationError(f"viscoelastic damping must be >= 0, got nu={self.nu}")


@dataclass(frozen=True)
class GridSpec:
    """Space-time grid; build through :func:`make_grid` so invariants hold."""

    dx: float
    dt: float
    T: float
    nx: int
    nt: int


def make_grid(phys: PhysicalParams, dx: float, dt: float, T: float) -> GridSpec:
    """Validate and build a grid for ``phys``.

    ``L/dx`` and ``T/dt`` must be integral to 1e-9 relative so that the
    domain and the time window are tiled exactly.  For ``nu = 0`` the
    scheme is explicit and ``c dt/dx <= 1`` is required.
    """
    if not (dx > 0 and dt > 0 and T > 0):
        raise ValidationError(f"dx, dt, T must be positive, got {dx}, {dt}, {T}")
    nxf = phys.L / dx
    ntf = T / dt
    nx1 = round(nxf)
    nt = round(ntf)
    if nx1 < 2 or abs(nxf - nx1) > GRID_ALIGN_RTOL * max(1.0, nxf):
        raise ValidationError(f"L/dx = {nxf} is not an integer >= 2; the grid must tile the domain")
    if nt < 2 or abs(ntf - nt) > GRID_ALIGN_RTOL * max(1.0, ntf):
        raise ValidationError(f"T/dt = {ntf} is not an integer >= 2; the grid must tile the time window")
    if phys.nu == 0.0:
        cfl = phys.c * dt / dx
        if cfl > 1.0 + 1e-12:
            raise ValidationError(f"CFL violation for the explicit scheme: c*dt/dx = {cfl} > 1")
    return GridSpec(dx=dx, dt=dt, T=T, nx=nx1 + 1, nt=nt)


def grid_points(phys: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """Spatial node coordinates (endpoints exactly 0 and L)."""
    return np.linspace(0.0, phys.L, grid.nx)


@dataclass(frozen=True)
class Decomposition:
    """Two overlapping subdomains (0, b) and (a, L); build via :func:`make_decomposition`."""

    a: float
    b: float

    @property
    def delta(self) -> float:
        return self.b - self.a


def make_decomposition(phys: PhysicalParams, grid: GridSpec, a: float, b: float) -> Decomposition:
    """Validate interface positions: 0 < a < b < L, both on grid nodes."""
    if not (0.0 < a < b < phys.L):
        raise ValidationError(f"interfaces must satisfy 0 < a < b < L, got a={a}, b={b}, L={phys.L}")
    for name, pos in (("a", a), ("b", b)):
        j = pos / grid.dx
        if abs(j - round(j)) > GRID_ALIGN_RTOL * max(1.0, j):
            raise ValidationError(f"interface {name}={pos} does not coincide with a grid node (dx={grid.dx})")
    return Decomposition(a=a, b=b)


def interface_indices(grid: GridSpec, dec: Decomposition) -> tuple[int, int]:
    """Global node indices (ja, jb) of the interfaces."""
    return round(dec.a / grid.dx), round(dec.b / grid.dx)


@dataclass(frozen=True)
class TransmissionParams:
    """The pair (p, q) defining the transmission operator p*d/dt + q."""

    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValidationError(f"transmission parameters must be finite, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem data: physics, grid, initial fields and optional source.

    ``u0`` and ``v0`` are sampled at the ``nx`` grid nodes; ``f``, when
    present, is sampled on the full space-time grid with shape
    ``(nt + 1, nx)``.
    """

    phys: PhysicalParams
    grid: GridSpec
    u0: np.ndarray
    v0: np.ndarray
    f: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "v0", v0)
        if u0.shape != (self.grid.nx,) or v0.shape != (self.grid.nx,):
            raise ValidationError(
                f"initial data must have shape ({self.grid.nx},), got {u0.shape} and {v0.shape}"
            )
        if u0[0] != 0.0 or u0[-1] != 0.0:
            raise ValidationError("u0 must vanish at both boundaries (homogeneous Dirichlet)")
        if self.f is not None:
            f = np.asarray(self.f, dtype=float)
            object.__setattr__(self, "f", f)
            if f.shape != (self.grid.nt + 1, self.grid.nx):
                raise ValidationError(
                    f"source must have shape ({self.grid.nt + 1}, {self.grid.nx}), got {f.shape}"
                )


def characteristic_roots(phys: PhysicalParams, mode: int) -> tuple[complex, complex]:
    """Roots of T'' + (gamma + nu k^2) T' + c^2 k^2 T = 0, k = mode*pi/L.

    Returns ``(r_plus, r_minus)`` where ``r_plus`` has the largest real
    part, ties broken by the larger imaginary part.
    """
    k = mode * math.pi / phys.L
    d = phys.gamma + phys.nu * k * k
    w2 = (phys.c * k) ** 2
    disc = d * d - 4.0 * w2
    tol = 1e-12 * max(1.0, d * d, 4.0 * w2)
    if disc > tol:
        # stable form avoids cancellation when 4 w2 << d^2
        sq = math.sqrt(disc)
        r1 = -2.0 * w2 / (d + sq)
        r2 = -(d + sq) / 2.0
        return complex(r1), complex(r2)
    if disc < -tol:
        beta = math.sqrt(-disc) / 2.0
        return complex(-d / 2.0, beta), complex(-d / 2.0, -beta)
    r = -d / 2.0
    return complex(r), complex(r)


def make_problem(phys: PhysicalParams, grid: GridSpec, mode: int = 1) -> ProblemSpec:
    """Single-Fourier-mode problem with a closed-form reference solution.

    ``u0 = sin(k x)``, ``v0 = Re(r_plus) u0`` and ``f = 0``, so that the
    exact solution is ``sin(k x) T(t)`` with ``T`` given by
    :func:`analytic_solution`.
    """
    if not isinstance(mode, int) or mode < 1:
        raise ValidationError(f"mode must be a positive integer, got {mode}")
    x = grid_points(phys, grid)
    k = mode * math.pi / phys.L
    u0 = np.sin(k * x)
    u0[0] = 0.0
    u0[-1] = 0.0
    r_plus, _ = characteristic_roots(phys, mode)
    v0 = r_plus.real * u0
    return ProblemSpec(phys=phys, grid=grid, u0=u0, v0=v0, f=None)


def _amplitude(phys: PhysicalParams, mode: int, t: float) -> float:
    """T(t) with T(0) = 1 and T'(0) = Re(r_plus)."""
    r_plus, r_minus = characteristic_roots(phys, mode)
    tp0 = r_plus.real
    if r_plus.imag != 0.0:
        alpha = r_plus.real
        beta = r_plus.imag
        A = 1.0
        B = (tp0 - alpha) / beta
        return math.exp(alpha * t) * (A * math.cos(beta * t) + B * math.sin(beta * t))
    r1 = r_plus.real
    r2 = r_minus.real
    if r1 != r2:
        A = (tp0 - r2) / (r1 - r2)
        B = 1.0 - A
        return A * math.exp(r1 * t) + B * math.exp(r2 * t)
    return (1.0 + (tp0 - r1) * t) * math.exp(r1 * t)


def analytic_solution(problem: ProblemSpec, mode: int, x: float, t: float) -> float:
    """Closed-form solution of the mode problem at a point (x, t)."""
    k = mode * math.pi / problem.phys.L
    return math.sin(k * x) * _amplitude(problem.phys, mode, t)


def analytic_snapshot(problem: ProblemSpec, mode: int, t: float) -> np.ndarray:
    """Closed-form solution sampled on the grid at time t."""
    x = grid_points(problem.phys, problem.grid)
    out = np.sin(mode * math.pi / problem.phys.L * x) * _amplitude(problem.phys, mode, t)
    out[0] = 0.0
    out[-1] = 0.0
    return out
