"""Experiment harness: parameter sweeps, CSV output, gnuplot scripts.

Single source of truth for experiment configuration.  Every run is
deterministic: sweep cells are dispatched to a thread pool (size capped by
``OSWR_THREADS``) and assembled in grid order, and CSV floats are written
with round-trip formatting, so identical configs produce byte-identical
files.

CSV schemas
-----------
error_map.csv        p,q,log10_error,flag      flag: 0 cell, 1 Linf optimum,
                                               2 L2 optimum, 3 grid minimum,
                                               -1 failed cell (NaN error)
error_curves.csv     gamma,nu,strategy,k,error strategy: 0 Linf, 1 L2;
                                               one (strategy=-1, k=-1) row per
                                               case carries the solver-vs-
                                               closed-form discrepancy
rho_pq_<strat>.csv   p,q,rho,flag              flag: 1 = resonance penalty
rho_damping.csv      gamma,nu,rho_inf,rho_l2   each factor at its own optimum
param_isolines.csv   sweep_id,gamma,nu,strategy,p_opt,q_opt,objective,converged

Sweep families in param_isolines.csv are numbered: ids 0..len(nu_fixed)-1
sweep gamma at fixed nu (in listed order), the following ids sweep nu at
fixed gamma.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import backends
from .errors import NumericalError, ValidationError
from .freq import FrequencyBand, frequency_band
from .model import (Decomposition, GridSpec, PhysicalParams,
                    TransmissionParams, analytic_snapshot, grid_points,
                    make_decomposition, make_grid, make_problem)
from .optim import (NelderMeadConfig, OptimizationResult, STRATEGIES,
                    STRATEGY_L2, STRATEGY_LINF, make_objective, nelder_mead,
                    optimize_transmission)
from .fdtd import solve_monodomain
from .swr import relative_error, swr_solve

STRATEGY_CODE = {STRATEGY_LINF: 0, STRATEGY_L2: 1}


@dataclass(frozen=True)
class ExperimentConfig:
    """Defaults reproduce the reference setup: c=1, a=0.3, b=0.4,
    dx=dt=0.002, T=5, L=1, 1000-node band."""

    c: float = 1.0
    gamma: float = 0.0
    nu: float = 0.0
    L: float = 1.0
    dx: float = 0.002
    dt: float = 0.002
    T: float = 5.0
    a: float = 0.3
    b: float = 0.4
    band_nodes: int = 1000
    mode: int = 1
    # (p, q) map sweeps (error map and rho contours)
    p_min: float = 0.0
    p_max: float = 2.0
    q_min: float = -2.0
    q_max: float = 10.0
    map_n: int = 25
    map_k: int = 10
    # log-spaced damping grid (rho contours)
    damping_gamma_min: float = 0.1
    damping_gamma_max: float = 12.0
    damping_nu_min: float = 1e-4
    damping_nu_max: float = 0.05
    damping_n: int = 8
    # isoline sweeps
    sweep_gamma_min: float = 0.0
    sweep_gamma_max: float = 12.0
    sweep_gamma_n: int = 10
    sweep_nu_min: float = 1e-3
    sweep_nu_max: float = 1.0
    sweep_nu_n: int = 10
    nu_fixed: tuple[float, ...] = (0.0, 0.001, 0.05)
    gamma_fixed: tuple[float, ...] = (0.0, 4.0, 10.0)
    # error-curve case lists (gammas at nu=0; nus at gamma=0)
    curve_gammas: tuple[float, ...] = (4.0, 8.0, 10.0, 12.0)
    curve_nus: tuple[float, ...] = (0.001, 0.005, 0.01, 0.05)
    strategy: str = "both"
    kmax: int = 80
    floor: float = 1e-13
    grid_scale: float = 1.0
    output_dir: str = "."

    def __post_init__(self):
        if self.strategy not in ("both",) + STRATEGIES:
            raise ValidationError(f"strategy must be linf, l2 or both, got {self.strategy!r}")
        if self.grid_scale <= 0:
            raise ValidationError(f"grid_scale must be positive, got {self.grid_scale}")
        if self.kmax < 1 or self.map_k < 1:
            raise ValidationError("iteration counts must be >= 1")

    def strategies(self) -> tuple[str, ...]:
        return STRATEGIES if self.strategy == "both" else (self.strategy,)

    def phys(self, gamma: Optional[float] = None, nu: Optional[float] = None) -> PhysicalParams:
        return PhysicalParams(c=self.c,
                              gamma=self.gamma if gamma is None else gamma,
                              nu=self.nu if nu is None else nu,
                              L=self.L)

    def grid(self, phys: PhysicalParams) -> GridSpec:
        return make_grid(phys, self.dx, self.dt, self.T)

    def dec(self, phys: PhysicalParams, grid: GridSpec) -> Decomposition:
        return make_decomposition(phys, grid, self.a, self.b)

    def band(self) -> FrequencyBand:
        return frequency_band(self.T, self.dt, self.band_nodes)

    def scaled(self, n: int) -> int:
        if n <= 1:
            return n
        return max(2, round((n - 1) * self.grid_scale) + 1)


# --- flat key = value config files -----------------------------------------

_CONFIG_KEYS: dict[str, tuple[str, Callable]] = {
    "phys.c": ("c", float), "phys.gamma": ("gamma", float),
    "phys.nu": ("nu", float), "phys.L": ("L", float),
    "grid.dx": ("dx", float), "grid.dt": ("dt", float), "grid.T": ("T", float),
    "dec.a": ("a", float), "dec.b": ("b", float),
    "band.n_nodes": ("band_nodes", int),
    "problem.mode": ("mode", int),
    "map.p_min": ("p_min", float), "map.p_max": ("p_max", float),
    "map.q_min": ("q_min", float), "map.q_max": ("q_max", float),
    "map.n": ("map_n", int), "map.k": ("map_k", int),
    "damping.gamma_min": ("damping_gamma_min", float),
    "damping.gamma_max": ("damping_gamma_max", float),
    "damping.nu_min": ("damping_nu_min", float),
    "damping.nu_max": ("damping_nu_max", float),
    "damping.n": ("damping_n", int),
    "sweep.gamma_min": ("sweep_gamma_min", float),
    "sweep.gamma_max": ("sweep_gamma_max", float),
    "sweep.gamma_n": ("sweep_gamma_n", int),
    "sweep.nu_min": ("sweep_nu_min", float),
    "sweep.nu_max": ("sweep_nu_max", float),
    "sweep.nu_n": ("sweep_nu_n", int),
    "sweep.nu_fixed": ("nu_fixed", "floats"),
    "sweep.gamma_fixed": ("gamma_fixed", "floats"),
    "curves.gammas": ("curve_gammas", "floats"),
    "curves.nus": ("curve_nus", "floats"),
    "strategy": ("strategy", str),
    "kmax": ("kmax", int),
    "floor": ("floor", float),
    "grid_scale": ("grid_scale", float),
    "output_dir": ("output_dir", str),
}


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = ["# experiment configuration (key = value)"]
    for key, (attr, _) in _CONFIG_KEYS.items():
        lines.append(f"{key} = {_fmt(getattr(cfg, attr))}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        attr, typ = _CONFIG_KEYS[key]
        try:
            if typ == "floats":
                updates[attr] = tuple(float(tok) for tok in value.split(",") if tok.strip())
            else:
                updates[attr] = typ(value)
        except ValueError as exc:
            raise ValidationError(f"config line {lineno}: cannot parse {value!r} for {key}") from exc
    return replace(cfg, **updates)


def load_config(path: str | Path, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    return config_from_text(path.read_text(), base)


# --- CSV tables -------------------------------------------------------------

@dataclass
class CsvTable:
    header: tuple[str, ...]
    rows: list[tuple]

    def __post_init__(self):
        n = len(self.header)
        for row in self.rows:
            if len(row) != n:
                raise ValidationError(f"row {row} does not match header {self.header}")

    def to_text(self) -> str:
        out = [",".join(self.header)]
        for row in self.rows:
            out.append(",".join(_cell(v) for v in row))
        return "\n".join(out) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text())
        return path


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return f"{f:.17g}"


def _pool() -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=backends.thread_count())


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def _log_axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), n) if n > 1 else np.array([lo])


def optimize_with_warm_start(strategy: str, phys: PhysicalParams, dec: Decomposition,
                             band: FrequencyBand, warm: Optional[tuple[float, float]],
                             cfg: NelderMeadConfig = NelderMeadConfig()) -> OptimizationResult:
    """Fresh run from (1/c, 0) plus, when given, a continuation run from the
    neighboring sweep point's optimum; the better result wins.  The max
    objective (discrete max of a smooth family) has shallow local basins
    that a single start occasionally lands in; continuation along a sweep
    removes those artifacts deterministically."""
    best = optimize_transmission(strategy, phys, dec, band, cfg)
    if warm is not None:
        second = nelder_mead(make_objective(strategy, phys, dec, band), warm, cfg,
                             strategy=strategy)
        if second.objective_value < best.objective_value:
            best = second
    return best


# --- error map (performance surface) ----------------------------------------

def run_error_map(cfg: ExperimentConfig) -> CsvTable:
    """SWR error after map_k iterations over a (p, q) grid, plus marked
    points: both optimizer results and the grid minimum."""
    phys = cfg.phys()
    grid = cfg.grid(phys)
    dec = cfg.dec(phys, grid)
    problem = make_problem(phys, grid, cfg.mode)
    reference = solve_monodomain(problem)
    ps = _axis(cfg.p_min, cfg.p_max, cfg.scaled(cfg.map_n))
    qs = _axis(cfg.q_min, cfg.q_max, cfg.scaled(cfg.map_n))

    def cell(pq: tuple[float, float]) -> float:
        try:
            rep = swr_solve(problem, dec, TransmissionParams(*pq), cfg.map_k, reference,
                            floor=cfg.floor)
            return float(rep.errors[cfg.map_k])
        except NumericalError:
            return math.nan

    coords = [(float(p), float(q)) for p in ps for q in qs]
    with _pool() as pool:
        values = list(pool.map(cell, coords))

    rows: list[tuple] = []
    best_cell: tuple[float, tuple[float, float]] = (math.inf, coords[0])
    for (p, q), err in zip(coords, values):
        if math.isnan(err):
            rows.append((p, q, math.nan, -1))
            continue
        log_err = math.log10(err) if err > 0 else -math.inf
        rows.append((p, q, log_err, 0))
        if err < best_cell[0]:
            best_cell = (err, (p, q))

    def log10_or_nan(err: float) -> float:
        return math.log10(err) if err > 0 and math.isfinite(err) else math.nan

    band = cfg.band()
    for strategy, flag in ((STRATEGY_LINF, 1), (STRATEGY_L2, 2)):
        r = optimize_transmission(strategy, phys, dec, band)
        rows.append((r.p_opt, r.q_opt, log10_or_nan(cell((r.p_opt, r.q_opt))), flag))
    (p_min, q_min) = best_cell[1]
    rows.append((p_min, q_min, log10_or_nan(best_cell[0]), 3))
    return CsvTable(header=("p", "q", "log10_error", "flag"), rows=rows)


# --- error curves -----------------------------------------------------------

def curve_cases(cfg: ExperimentConfig) -> list[tuple[float, float]]:
    return [(g, 0.0) for g in cfg.curve_gammas] + [(0.0, nu) for nu in cfg.curve_nus]


def run_error_curves(cfg: ExperimentConfig,
                     cases: Optional[Sequence[tuple[float, float]]] = None) -> CsvTable:
    """Per case and strategy: optimize (p, q), then the full SWR error
    history to kmax; one extra row per case carries the monodomain
    solver-vs-closed-form discrepancy (the dashed reference line)."""
    band = cfg.band()
    rows: list[tuple] = []
    for gamma, nu in (cases if cases is not None else curve_cases(cfg)):
        phys = cfg.phys(gamma=gamma, nu=nu)
        grid = cfg.grid(phys)
        dec = cfg.dec(phys, grid)
        problem = make_problem(phys, grid, cfg.mode)
        reference = solve_monodomain(problem)
        exact = analytic_snapshot(problem, cfg.mode, cfg.T)
        discrepancy = relative_error(reference.values[grid.nt], exact)
        rows.append((gamma, nu, -1, -1, discrepancy))
        for strategy in cfg.strategies():
            r = optimize_transmission(strategy, phys, dec, band)
            try:
                rep = swr_solve(problem, dec, TransmissionParams(r.p_opt, r.q_opt),
                                cfg.kmax, reference, floor=cfg.floor)
                for k, err in enumerate(rep.errors):
                    rows.append((gamma, nu, STRATEGY_CODE[strategy], k, float(err)))
            except NumericalError:
                rows.append((gamma, nu, STRATEGY_CODE[strategy], -2, math.nan))
    return CsvTable(header=("gamma", "nu", "strategy", "k", "error"), rows=rows)


# --- predicted convergence-factor contours ----------------------------------

def run_rho_contours(cfg: ExperimentConfig) -> tuple[dict[str, CsvTable], CsvTable]:
    """(p, q)-plane contour tables of each global factor at the config's
    damping, and the damping-plane table of both factors at their own
    optimized parameters."""
    phys = cfg.phys()
    grid = cfg.grid(phys)
    dec = cfg.dec(phys, grid)
    band = cfg.band()
    ps = _axis(cfg.p_min, cfg.p_max, cfg.scaled(cfg.map_n))
    qs = _axis(cfg.q_min, cfg.q_max, cfg.scaled(cfg.map_n))

    pq_tables: dict[str, CsvTable] = {}
    for strategy in cfg.strategies():
        objective = make_objective(strategy, phys, dec, band)

        def cell(pq: tuple[float, float]) -> float:
            return objective(np.array(pq))

        coords = [(float(p), float(q)) for p in ps for q in qs]
        with _pool() as pool:
            values = list(pool.map(cell, coords))
        rows = [(p, q, v, 1 if v >= 1e6 else 0) for (p, q), v in zip(coords, values)]
        pq_tables[strategy] = CsvTable(header=("p", "q", "rho", "flag"), rows=rows)

    gammas = _log_axis(cfg.damping_gamma_min, cfg.damping_gamma_max, cfg.scaled(cfg.damping_n))
    nus = _log_axis(cfg.damping_nu_min, cfg.damping_nu_max, cfg.scaled(cfg.damping_n))

    def damping_row(g: float) -> list[tuple]:
        out = []
        warm: dict[str, Optional[tuple[float, float]]] = {STRATEGY_LINF: None, STRATEGY_L2: None}
        for nu in nus:
            ph = cfg.phys(gamma=float(g), nu=float(nu))
            d = cfg.dec(ph, grid)
            vals = {}
            for strategy in STRATEGIES:
                r = optimize_with_warm_start(strategy, ph, d, band, warm[strategy])
                warm[strategy] = (r.p_opt, r.q_opt)
                vals[strategy] = r.objective_value
            out.append((float(g), float(nu), vals[STRATEGY_LINF], vals[STRATEGY_L2]))
        return out

    with _pool() as pool:
        row_blocks = list(pool.map(damping_row, [float(g) for g in gammas]))
    damping_rows = [row for block in row_blocks for row in block]
    damping = CsvTable(header=("gamma", "nu", "rho_inf", "rho_l2"), rows=damping_rows)
    return pq_tables, damping


# --- optimal-parameter isolines ----------------------------------------------

def run_param_isolines(cfg: ExperimentConfig) -> CsvTable:
    """Optimized (p, q) along damping sweeps.

    Family ids: 0..len(nu_fixed)-1 sweep gamma at that fixed nu;
    subsequent ids sweep nu at each fixed gamma.
    """
    phys0 = cfg.phys()
    grid = cfg.grid(phys0)
    band = cfg.band()
    gamma_axis = _axis(cfg.sweep_gamma_min, cfg.sweep_gamma_max, cfg.scaled(cfg.sweep_gamma_n))
    nu_axis = _log_axis(cfg.sweep_nu_min, cfg.sweep_nu_max, cfg.scaled(cfg.sweep_nu_n))

    families: list[tuple[int, list[tuple[float, float]]]] = []
    sweep_id = 0
    for nu in cfg.nu_fixed:
        families.append((sweep_id, [(float(g), float(nu)) for g in gamma_axis]))
        sweep_id += 1
    for gamma in cfg.gamma_fixed:
        families.append((sweep_id, [(float(gamma), float(nu)) for nu in nu_axis]))
        sweep_id += 1

    def run_family(entry: tuple[int, list[tuple[float, float]]]) -> list[tuple]:
        fid, points = entry
        out = []
        warm: dict[str, Optional[tuple[float, float]]] = {s: None for s in STRATEGIES}
        for gamma, nu in points:
            ph = cfg.phys(gamma=gamma, nu=nu)
            d = cfg.dec(ph, grid)
            for strategy in cfg.strategies():
                r = optimize_with_warm_start(strategy, ph, d, band, warm[strategy])
                warm[strategy] = (r.p_opt, r.q_opt)
                out.append((fid, gamma, nu, STRATEGY_CODE[strategy],
                            r.p_opt, r.q_opt, r.objective_value, int(r.converged)))
        return out

    with _pool() as pool:
        blocks = list(pool.map(run_family, families))
    rows = [row for block in blocks for row in block]
    return CsvTable(header=("sweep_id", "gamma", "nu", "strategy", "p_opt", "q_opt",
                            "objective", "converged"), rows=rows)


# --- monodomain snapshot ------------------------------------------------------

def run_solve(cfg: ExperimentConfig) -> CsvTable:
    phys = cfg.phys()
    grid = cfg.grid(phys)
    problem = make_problem(phys, grid, cfg.mode)
    field = solve_monodomain(problem)
    x = grid_points(phys, grid)
    rows = [(float(xi), float(ui)) for xi, ui in zip(x, field.values[grid.nt])]
    return CsvTable(header=("x", "u"), rows=rows)


# --- gnuplot emission ----------------------------------------------------------

_GP = {
    "error_map": """\
# gnuplot script: SWR error surface after k iterations (log10 scale)
# flag column: 0 sweep cell, 1 Linf optimum, 2 L2 optimum, 3 grid minimum
set datafile separator ","
set view map
set xlabel "q"
set ylabel "p"
splot "error_map.csv" every ::1 using 2:1:3 with points palette pt 5 title "log10 error"
""",
    "error_curves": """\
# gnuplot script: SWR error vs iteration (strategy: 0=Linf, 1=L2; k=-1 rows
# carry the solver-vs-closed-form discrepancy level)
set datafile separator ","
set logscale y
set xlabel "iteration k"
set ylabel "relative error at final time"
plot "error_curves.csv" every ::1 using 4:($3==0 ? $5 : 1/0) with lines title "Linf", \\
     "error_curves.csv" every ::1 using 4:($3==1 ? $5 : 1/0) with lines title "L2"
""",
    "rho_contours": """\
# gnuplot script: global convergence-factor contours
set datafile separator ","
set view map
set xlabel "q"
set ylabel "p"
splot "rho_pq_linf.csv" every ::1 using 2:1:3 with points palette pt 5 title "rho_inf"
# second panel: damping plane (log axes), each factor at its own optimum
# splot "rho_damping.csv" every ::1 using (log10($1)):(log10($2)):3
""",
    "param_isolines": """\
# gnuplot script: optimized transmission parameters along damping sweeps
# sweep_id families: gamma sweeps at fixed nu first, then nu sweeps at fixed
# gamma (see README); strategy: 0=Linf, 1=L2
set datafile separator ","
set xlabel "p_opt"
set ylabel "q_opt"
plot "param_isolines.csv" every ::1 using 5:($4==0 ? $6 : 1/0) with linespoints title "Linf", \\
     "param_isolines.csv" every ::1 using 5:($4==1 ? $6 : 1/0) with linespoints title "L2"
""",
}


def write_gnuplot(name: str, out_dir: str | Path) -> Path:
    path = Path(out_dir) / f"{name}.gp"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_GP[name])
    return path
