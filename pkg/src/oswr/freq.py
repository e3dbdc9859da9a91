"""Laplace-domain convergence analysis of the two-subdomain iteration.

Everything here is a pure function of its arguments.  The per-frequency
factor ``rho`` is the closed-form interface ratio

    rho(i w; p, q) = | kappa cos(kappa a) - lam sin(kappa a) |
                     / | kappa cos(kappa b) + lam sin(kappa b) |,

with ``lam(s) = p s + q`` and ``kappa`` the dispersion symbol of the damped
wave operator.  ``g_squared_unsimplified`` builds the raw two-iteration
amplification from the four exponential interface factors (including the
outer-boundary reflection terms ``e^{2 i kappa L}``) and serves as an
independent oracle for ``rho``: the two agree exactly when the interfaces
are placed symmetrically in the domain (a + b = L) and differ by the
boundary-reflection contribution otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ResonanceError, ValidationError
from .model import Decomposition, PhysicalParams, TransmissionParams

#: denominator magnitudes below this raise :class:`ResonanceError`
RESONANCE_FLOOR = 1e-300

#: finite objective value substituted for resonant frequencies during optimization
RESONANCE_PENALTY = 1e6

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class FrequencyBand:
    """Uniform grid of angular frequencies [omega_min, omega_max]."""

    omega_min: float
    omega_max: float
    n_nodes: int = 1000

    def __post_init__(self):
        if not (0.0 < self.omega_min < self.omega_max):
            raise ValidationError(
                f"band must satisfy 0 < omega_min < omega_max, got [{self.omega_min}, {self.omega_max}]"
            )
        if self.n_nodes < 2:
            raise ValidationError(f"band needs at least 2 nodes, got {self.n_nodes}")

    def nodes(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_nodes)


def frequency_band(T: float, dt: float, n_nodes: int = 1000) -> FrequencyBand:
    """Resolvable band of a time window: omega_min = pi/T, omega_max = pi/dt."""
    if not (T > 0 and dt > 0):
        raise ValidationError(f"T and dt must be positive, got T={T}, dt={dt}")
    if dt >= T:
        raise ValidationError(f"degenerate band: dt={dt} >= T={T}")
    return FrequencyBand(omega_min=math.pi / T, omega_max=math.pi / dt, n_nodes=n_nodes)


def kappa(s: complex, phys: PhysicalParams) -> complex:
    """Dispersion symbol kappa(s) = -i s/c sqrt((1 + gamma/s)/(1 + nu s/c^2)).

    Principal branch of the complex square root.  For s = i w with w > 0
    the real part is nonnegative and kappa(conj(s)) = conj(kappa(s)).
    """
    s = complex(s)
    if s == 0:
        raise ResonanceError("kappa is singular at s = 0")
    c2 = phys.c * phys.c
    den = 1.0 + phys.nu * s / c2
    if den == 0:
        raise ResonanceError(f"kappa has a pole at s = {s} (1 + nu s / c^2 = 0)")
    return -1j * s / phys.c * np.sqrt(np.complex128((1.0 + phys.gamma / s) / den))


def _kappa_lambda_arrays(omegas: np.ndarray, p: float, q: float, phys: PhysicalParams):
    """Vectorized (kappa, lambda) on s = i*omega, kappa flipped to Im >= 0.

    Both rho and G^2 are invariant under kappa -> -kappa; flipping keeps
    the growing exponential bounded by e^{|Im kappa| L} in every factor.
    """
    s = 1j * omegas
    c2 = phys.c * phys.c
    kap = -1j * s / phys.c * np.sqrt((1.0 + phys.gamma / s) / (1.0 + phys.nu * s / c2))
    kap = np.where(kap.imag < 0.0, -kap, kap)
    lam = p * s + q
    return kap, lam


def _rho_values(omegas: np.ndarray, tp: TransmissionParams, phys: PhysicalParams,
                dec: Decomposition) -> np.ndarray:
    kap, lam = _kappa_lambda_arrays(np.asarray(omegas, dtype=float), tp.p, tp.q, phys)
    num = kap * np.cos(kap * dec.a) - lam * np.sin(kap * dec.a)
    den = kap * np.cos(kap * dec.b) + lam * np.sin(kap * dec.b)
    mag = np.abs(den)
    if np.any(mag < RESONANCE_FLOOR):
        w = float(np.asarray(omegas, dtype=float)[np.argmin(mag)])
        raise ResonanceError(
            f"transmission-operator resonance at omega = {w} for (p, q) = ({tp.p}, {tp.q})"
        )
    return np.abs(num) / mag


def convergence_factor(omega: float, tp: TransmissionParams, phys: PhysicalParams,
                       dec: Decomposition) -> float:
    """Per-frequency contraction factor rho(i omega; p, q)."""
    if not omega > 0:
        raise ValidationError(f"omega must be positive, got {omega}")
    return float(_rho_values(np.array([omega]), tp, phys, dec)[0])


def g_squared_unsimplified(s: complex, tp: TransmissionParams, phys: PhysicalParams,
                           dec: Decomposition, L: float) -> complex:
    """Raw two-iteration amplification G^2(s) = (N_w N_v) / (D_v D_w).

    Keeps the outer-boundary terms e^{2 i kappa L}; ``L`` is the position
    of the right Dirichlet boundary.  Oracle counterpart of
    :func:`convergence_factor` (see module docstring for when the two
    coincide exactly).
    """
    s = complex(s)
    if s == 0:
        raise ResonanceError("G^2 is singular at s = 0")
    kap = kappa(s, phys)
    if kap.imag < 0.0:
        kap = -kap  # G^2 is invariant; keeps exponentials bounded
    lam = tp.p * s + tp.q
    a, b = dec.a, dec.b

    def E(z: float) -> complex:
        return np.exp(1j * kap * z)

    e2L = np.exp(2j * kap * L)
    ik = 1j * kap
    D_v = ik * (E(b) + E(-b)) + lam * (E(b) - E(-b))
    N_w = ik * (E(b) + e2L * E(-b)) + lam * (E(b) - e2L * E(-b))
    D_w = ik * (E(a) + e2L * E(-a)) - lam * (E(a) - e2L * E(-a))
    N_v = ik * (E(a) + E(-a)) - lam * (E(a) - E(-a))
    den = D_v * D_w
    if abs(den) < RESONANCE_FLOOR:
        raise ResonanceError(f"resonance: D_v * D_w underflowed at s = {s}")
    return complex((N_w * N_v) / den)


RhoFunction = Callable[[np.ndarray], np.ndarray]


def _band_rho(tp: TransmissionParams, phys: PhysicalParams, dec: Decomposition,
              band: FrequencyBand, rho_fn: Optional[RhoFunction]) -> np.ndarray:
    nodes = band.nodes()
    if rho_fn is not None:
        return np.asarray(rho_fn(nodes), dtype=float)
    return _rho_values(nodes, tp, phys, dec)


def rho_inf(tp: TransmissionParams, phys: PhysicalParams, dec: Decomposition,
            band: FrequencyBand, rho_fn: Optional[RhoFunction] = None) -> float:
    """Worst-case factor: discrete max of rho over the band grid.

    ``rho_fn`` substitutes an arbitrary omega -> rho map (quadrature tests
    only).
    """
    return float(np.max(_band_rho(tp, phys, dec, band, rho_fn)))


def rho_l2(tp: TransmissionParams, phys: PhysicalParams, dec: Decomposition,
           band: FrequencyBand, rho_fn: Optional[RhoFunction] = None) -> float:
    """RMS factor: sqrt of the band-averaged rho^2, composite trapezoid."""
    values = _band_rho(tp, phys, dec, band, rho_fn)
    nodes = band.nodes()
    integral = float(_trapezoid(values * values, nodes))
    return math.sqrt(integral / (band.omega_max - band.omega_min))
