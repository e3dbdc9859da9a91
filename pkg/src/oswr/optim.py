"""Nelder-Mead simplex minimization of the global convergence factors.

The simplex method follows the classic fminsearch conventions: initial
simplex built by perturbing each coordinate of the start point by 5%
(0.00025 absolute for zero coordinates), reflection/expansion/contraction/
shrink coefficients (1, 2, 0.5, 0.5), and termination when BOTH the
simplex diameter and the objective spread fall below their tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ResonanceError, ValidationError
from .freq import RESONANCE_PENALTY, FrequencyBand, rho_inf, rho_l2
from .model import Decomposition, PhysicalParams, TransmissionParams

STRATEGY_LINF = "linf"
STRATEGY_L2 = "l2"
STRATEGIES = (STRATEGY_LINF, STRATEGY_L2)


@dataclass(frozen=True)
class NelderMeadConfig:
    tol_x: float = 1e-4
    tol_f: float = 1e-4
    max_evaluations: int = 2000
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5

    def __post_init__(self):
        if not (self.tol_x > 0 and self.tol_f > 0):
            raise ValidationError("tolerances must be positive")
        if self.max_evaluations < 4:
            raise ValidationError("max_evaluations must allow at least the initial simplex")
        if not (self.reflection > 0 and self.expansion > 1 and
                0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise ValidationError("simplex coefficients out of range")


@dataclass(frozen=True)
class OptimizationResult:
    p_opt: float
    q_opt: float
    objective_value: float
    strategy: Optional[str]
    n_evaluations: int
    converged: bool


def _initial_simplex(x0: np.ndarray) -> np.ndarray:
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        if x0[i] != 0.0:
            simplex[i + 1, i] *= 1.05
        else:
            simplex[i + 1, i] = 0.00025
    return simplex


def nelder_mead(objective: Callable[[np.ndarray], float], x0: tuple[float, float] | np.ndarray,
                cfg: NelderMeadConfig = NelderMeadConfig(),
                strategy: Optional[str] = None) -> OptimizationResult:
    """Minimize ``objective`` from ``x0``; deterministic, derivative-free.

    Non-finite objective values after the start are treated as +inf so the
    simplex retreats from them; a non-finite value at the start point or
    the initial simplex is an error.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = _initial_simplex(x0)
    nfev = 0

    def fwrap(x: np.ndarray, initial: bool = False) -> float:
        nonlocal nfev
        nfev += 1
        v = float(objective(x))
        if not math.isfinite(v):
            if initial:
                raise ValidationError(f"objective is not finite at start point {x.tolist()}")
            return math.inf
        return v

    fvals = np.array([fwrap(simplex[i], initial=True) for i in range(n + 1)])

    converged = False
    while nfev < cfg.max_evaluations:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]

        if (np.max(np.abs(simplex[1:] - simplex[0])) <= cfg.tol_x
                and np.max(np.abs(fvals[1:] - fvals[0])) <= cfg.tol_f):
            converged = True
            break

        centroid = np.mean(simplex[:-1], axis=0)
        xr = centroid + cfg.reflection * (centroid - simplex[-1])
        fr = fwrap(xr)
        if fr < fvals[0]:
            xe = centroid + cfg.reflection * cfg.expansion * (centroid - simplex[-1])
            fe = fwrap(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + cfg.contraction * cfg.reflection * (centroid - simplex[-1])
                fc = fwrap(xc)
                accept = fc <= fr
            else:
                xc = centroid - cfg.contraction * (centroid - simplex[-1])
                fc = fwrap(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0])
                    fvals[i] = fwrap(simplex[i])

    best = int(np.argmin(fvals))
    return OptimizationResult(
        p_opt=float(simplex[best, 0]),
        q_opt=float(simplex[best, 1]) if n > 1 else 0.0,
        objective_value=float(fvals[best]),
        strategy=strategy,
        n_evaluations=nfev,
        converged=converged,
    )


def make_objective(strategy: str, phys: PhysicalParams, dec: Decomposition,
                   band: FrequencyBand) -> Callable[[np.ndarray], float]:
    """Global-factor objective over (p, q) with the finite resonance penalty."""
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    aggregate = rho_inf if strategy == STRATEGY_LINF else rho_l2

    def objective(x: np.ndarray) -> float:
        tp = TransmissionParams(p=float(x[0]), q=float(x[1]))
        try:
            return aggregate(tp, phys, dec, band)
        except ResonanceError:
            return RESONANCE_PENALTY

    return objective


def optimize_transmission(strategy: str, phys: PhysicalParams, dec: Decomposition,
                          band: FrequencyBand,
                          cfg: NelderMeadConfig = NelderMeadConfig()) -> OptimizationResult:
    """Minimize the chosen global factor from the start point (1/c, 0)."""
    objective = make_objective(strategy, phys, dec, band)
    return nelder_mead(objective, (1.0 / phys.c, 0.0), cfg, strategy=strategy)
