import numpy as np
import pytest

from oswr import backends
from oswr.fdtd import solve_monodomain
from oswr.freq import frequency_band
from oswr.model import (PhysicalParams, make_decomposition, make_grid,
                        make_problem)

PAPER = dict(c=1.0, L=1.0, dx=0.002, dt=0.002, T=5.0, a=0.3, b=0.4)


def paper_setup(gamma, nu, T=5.0):
    """Problem, decomposition and band at the reference parameter set."""
    phys = PhysicalParams(c=PAPER["c"], gamma=gamma, nu=nu, L=PAPER["L"])
    grid = make_grid(phys, PAPER["dx"], PAPER["dt"], T)
    dec = make_decomposition(phys, grid, PAPER["a"], PAPER["b"])
    problem = make_problem(phys, grid, 1)
    band = frequency_band(T, PAPER["dt"], 1000)
    return problem, dec, band


@pytest.fixture(scope="session")
def telegrapher_case():
    """gamma=4, nu=0 problem with its monodomain reference (full T=5)."""
    problem, dec, band = paper_setup(4.0, 0.0)
    return problem, dec, band, solve_monodomain(problem)


@pytest.fixture(scope="session")
def viscoelastic_case():
    """gamma=0, nu=0.05 problem with its monodomain reference (full T=5)."""
    problem, dec, band = paper_setup(0.0, 0.05)
    return problem, dec, band, solve_monodomain(problem)


@pytest.fixture(params=["numba", "numpy"] if backends.HAS_NUMBA else ["numpy"])
def each_backend(request):
    backends.select(request.param)
    yield request.param
    backends.select(None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
