"""Optimized Schwarz waveform relaxation for the 1D damped wave equation.

Frequency-domain convergence-factor analysis, transmission-parameter
optimization, and a two-subdomain FDTD relaxation solver for

    u_tt + gamma u_t = c^2 u_xx + nu u_txx + f

on (0, L) with homogeneous Dirichlet boundaries.
"""

from .errors import (ClosureError, NumericalError, OswrError, ResonanceError,
                     SingularSystemError, StabilityError, ValidationError)
from .model import (Decomposition, GridSpec, PhysicalParams, ProblemSpec,
                    TransmissionParams, analytic_snapshot, analytic_solution,
                    characteristic_roots, grid_points, interface_indices,
                    make_decomposition, make_grid, make_problem)
from .freq import (FrequencyBand, RESONANCE_PENALTY, convergence_factor,
                   frequency_band, g_squared_unsimplified, kappa, rho_inf,
                   rho_l2)
from .optim import (NelderMeadConfig, OptimizationResult, nelder_mead,
                    optimize_transmission)
from .fdtd import (BoundaryCondition, DIRICHLET, InterfaceTrace,
                   TridiagonalSystem, WaveField, apply_robin_closure,
                   discrete_energy, first_time_step, robin_trace,
                   solve_monodomain, solve_subdomain, step, thomas_solve)
from .swr import SwrReport, assemble_global, relative_error, swr_solve
from .experiments import (CsvTable, ExperimentConfig, config_from_text,
                          config_to_text, load_config, run_error_curves,
                          run_error_map, run_param_isolines, run_rho_contours,
                          run_solve)

__version__ = "0.1.0"
