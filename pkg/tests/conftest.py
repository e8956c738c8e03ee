import numpy as np
import pytest

from cprandtl.grid import GridSpec
from cprandtl.trace import make_trace


@pytest.fixture
def grid_small():
    return GridSpec(Nt=9, Nx=16, Neta=33, T=0.5, eta_max=4.0)


@pytest.fixture
def grid_norm():
    # roomy enough for third-order tangential stencils
    return GridSpec(Nt=13, Nx=16, Neta=41, T=1.0, eta_max=4.0)


@pytest.fixture
def trace_constant(grid_small):
    return make_trace("constant", grid_small, u_inf=1.0, rho0=1.0)


@pytest.fixture
def trace_traveling(grid_small):
    return make_trace(
        "traveling", grid_small, u_inf=1.0, amplitude=0.1, rho_amplitude=0.1
    )


def rng(seed=0):
    return np.random.default_rng(seed)


def smooth_random_field(grid, seed=0, amplitude=1.0, decay=1.0, kmax=3):
    """Band-limited random space-time field, smooth and eta-decaying."""
    r = np.random.default_rng(seed)
    Tm, X, E = np.meshgrid(grid.t, grid.x, grid.eta, indexing="ij")
    out = np.zeros_like(Tm)
    for _ in range(4):
        kt = r.integers(0, kmax + 1)
        kx = r.integers(1, kmax + 1)
        ph1, ph2 = r.uniform(0, 2 * np.pi, 2)
        amp = amplitude * r.uniform(0.2, 1.0)
        out += (
            amp
            * np.cos(2 * np.pi * kt * Tm / grid.T + ph1)
            * np.cos(2 * np.pi * kx * X + ph2)
            * np.exp(-decay * E)
        )
    return out
