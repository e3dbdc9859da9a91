import math

import numpy as np
import pytest

from oswr.errors import ResonanceError, ValidationError
from oswr.freq import RESONANCE_PENALTY, frequency_band, rho_l2
from oswr.model import PhysicalParams, TransmissionParams, make_decomposition, make_grid
from oswr.optim import (NelderMeadConfig, make_objective, nelder_mead,
                        optimize_transmission)


def quadratic(x):
    return (x[0] - 2.0) ** 2 + (x[1] + 1.0) ** 2


def rosenbrock(x):
    return 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2


class TestNelderMead:
    def test_convex_quadratic(self):
        r = nelder_mead(quadratic, (0.0, 0.0))
        assert r.converged
        assert r.p_opt == pytest.approx(2.0, abs=1e-3)
        assert r.q_opt == pytest.approx(-1.0, abs=1e-3)

    def test_constant_objective_converges_at_start_point(self):
        # zero spread satisfies tol_f at once; the simplex then shrinks to
        # tol_x around x0 (both-tolerance termination)
        r = nelder_mead(lambda x: 7.0, (3.0, 4.0))
        assert r.converged
        assert r.objective_value == 7.0
        assert (r.p_opt, r.q_opt) == (3.0, 4.0)
        assert r.n_evaluations < 100

    def test_rosenbrock_benchmark(self):
        r = nelder_mead(rosenbrock, (-1.2, 1.0))
        assert r.converged
        assert r.p_opt == pytest.approx(1.0, abs=1e-2)
        assert r.q_opt == pytest.approx(1.0, abs=1e-2)

    def test_initial_simplex_follows_fminsearch_convention(self):
        seen = []

        def record(x):
            seen.append(tuple(x))
            return quadratic(x)

        nelder_mead(record, (2.0, 0.0), NelderMeadConfig(max_evaluations=4))
        assert seen[0] == (2.0, 0.0)
        assert seen[1] == (2.0 * 1.05, 0.0)       # 5% perturbation
        assert seen[2] == (2.0, 0.00025)          # absolute step at zero

    def test_nonfinite_start_rejected(self):
        with pytest.raises(ValidationError):
            nelder_mead(lambda x: math.nan, (0.0, 0.0))

    def test_nonfinite_later_values_are_retreated_from(self):
        def holey(x):
            if x[0] > 2.5:
                return math.inf
            return (x[0] - 2.0) ** 2 + x[1] ** 2

        r = nelder_mead(holey, (1.0, 1.0))
        assert r.converged
        assert r.p_opt == pytest.approx(2.0, abs=1e-3)

    def test_budget_exhaustion_reported(self):
        r = nelder_mead(rosenbrock, (-1.2, 1.0), NelderMeadConfig(max_evaluations=20))
        assert not r.converged
        assert r.n_evaluations <= 21

    def test_determinism(self):
        a = nelder_mead(rosenbrock, (-1.2, 1.0))
        b = nelder_mead(rosenbrock, (-1.2, 1.0))
        assert (a.p_opt, a.q_opt, a.objective_value, a.n_evaluations) == \
            (b.p_opt, b.q_opt, b.objective_value, b.n_evaluations)

    def test_result_is_best_evaluation(self):
        values = []

        def record(x):
            v = rosenbrock(x)
            values.append(v)
            return v

        r = nelder_mead(record, (-1.2, 1.0))
        assert r.objective_value == min(values)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            NelderMeadConfig(tol_x=0.0)
        with pytest.raises(ValidationError):
            NelderMeadConfig(expansion=0.5)


def setup(gamma, nu):
    phys = PhysicalParams(c=1.0, gamma=gamma, nu=nu, L=1.0)
    grid = make_grid(phys, 0.002, 0.002, 5.0)
    dec = make_decomposition(phys, grid, 0.3, 0.4)
    return phys, dec, frequency_band(5.0, 0.002, 1000)


class TestOptimizeTransmission:
    def test_improvement_over_initialization(self):
        for gamma, nu in ((4.0, 0.0), (0.0, 0.001), (0.0, 0.05), (10.0, 0.0)):
            phys, dec, band = setup(gamma, nu)
            for strategy in ("linf", "l2"):
                obj = make_objective(strategy, phys, dec, band)
                r = optimize_transmission(strategy, phys, dec, band)
                assert r.objective_value <= obj(np.array([1.0, 0.0])) + 1e-15

    def test_result_consistency(self):
        phys, dec, band = setup(0.0, 0.05)
        r = optimize_transmission("l2", phys, dec, band)
        again = rho_l2(TransmissionParams(r.p_opt, r.q_opt), phys, dec, band)
        assert again == r.objective_value

    def test_undamped_l2_never_exceeds_unity(self):
        # at (1/c, 0) every factor equals 1; the best vertex can only improve
        phys, dec, band = setup(0.0, 0.0)
        r = optimize_transmission("l2", phys, dec, band)
        assert r.objective_value <= 1.0 + 1e-12
        assert r.strategy == "l2"

    def test_strategy_validation(self):
        phys, dec, band = setup(0.0, 0.05)
        with pytest.raises(ValidationError):
            optimize_transmission("max", phys, dec, band)

    def test_determinism(self):
        phys, dec, band = setup(4.0, 0.0)
        a = optimize_transmission("linf", phys, dec, band)
        b = optimize_transmission("linf", phys, dec, band)
        assert (a.p_opt, a.q_opt, a.objective_value, a.n_evaluations,
                a.converged) == (b.p_opt, b.q_opt, b.objective_value,
                                 b.n_evaluations, b.converged)

    def test_resonance_maps_to_finite_penalty(self, monkeypatch):
        phys, dec, band = setup(0.0, 0.05)

        def blow_up(*args, **kwargs):
            raise ResonanceError("synthetic resonance")

        monkeypatch.setattr("oswr.optim.rho_l2", blow_up)
        obj = make_objective("l2", phys, dec, band)
        assert obj(np.array([1.0, 0.0])) == RESONANCE_PENALTY
