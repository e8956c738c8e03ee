"""Field-core: derivative stencils, conormal operators, eta integrals."""

import numpy as np
import pytest

from cprandtl.calculus import (
    Z1,
    Z2,
    d_eta,
    d_eta2,
    d_x,
    exact_int_eta_from0,
    int_eta_from0,
    int_eta_tail,
)
from cprandtl.errors import DecayFloorWarning, ValidationError
from cprandtl.fields import SliceField, SpaceTimeField
from cprandtl.grid import GridSpec

from conftest import smooth_random_field


def slope(errs):
    """Richardson slope from consecutive refinement errors."""
    errs = np.asarray(errs, dtype=float)
    return np.log2(errs[:-1] / errs[1:])


class TestGridAndFields:
    def test_grid_invariants(self):
        g = GridSpec(Nt=5, Nx=16, Neta=17, T=1.0, eta_max=4.0)
        assert g.x[0] == 0.0 and np.isclose(g.x[1], 1.0 / 16)
        assert g.eta[0] == 0.0 and g.eta[-1] == 4.0
        assert np.all(np.diff(g.eta) > 0)

    def test_grid_rejections(self):
        with pytest.raises(ValidationError):
            GridSpec(Nt=5, Nx=4, Neta=17, T=1.0, eta_max=4.0)
        with pytest.raises(ValidationError):
            GridSpec(Nt=5, Nx=16, Neta=17, T=1.0, eta_max=0.5)
        with pytest.raises(ValidationError):
            GridSpec(Nt=5, Nx=16, Neta=8, T=1.0, eta_max=4.0)

    def test_nonfinite_is_hard_error(self, grid_small):
        vals = np.zeros((grid_small.Nx, grid_small.Neta))
        vals[3, 5] = np.nan
        with pytest.raises(ValidationError):
            SliceField(grid_small, vals)

    def test_exponential_grading(self):
        g = GridSpec(
            Nt=5, Nx=16, Neta=33, T=1.0, eta_max=8.0, eta_grading="exponential"
        )
        d = g.deta
        assert d[0] < d[-1]
        assert g.eta[0] == 0.0 and g.eta[-1] == 8.0


class TestDx:
    def test_sin_mode(self, grid_small):
        f = SliceField.from_function(grid_small, lambda x, e: np.sin(2 * np.pi * x))
        df = d_x(f)
        exact = 2 * np.pi * np.cos(2 * np.pi * grid_small.x)
        err = np.abs(df.values - exact[:, None]).max()
        assert err < 0.06 * 2 * np.pi  # O(dx^2) at Nx=16

    def test_constant(self, grid_small):
        f = SliceField(grid_small, np.ones((grid_small.Nx, grid_small.Neta)))
        assert d_x(f).max_abs() < 1e-14

    def test_convergence_order(self):
        errs = []
        for nx in (32, 64):
            g = GridSpec(Nt=3, Nx=nx, Neta=17, T=1.0, eta_max=2.0)
            f = SliceField.from_function(
                g, lambda x, e: np.sin(4 * np.pi * x) * np.exp(-e)
            )
            exact = SliceField.from_function(
                g, lambda x, e: 4 * np.pi * np.cos(4 * np.pi * x) * np.exp(-e)
            )
            errs.append(np.abs(d_x(f).values - exact.values).max())
        assert slope(errs)[0] >= 1.9

    def test_zero_mean_per_row(self, grid_small):
        f = SliceField(
            grid_small,
            smooth_random_field(
                GridSpec(Nt=2, Nx=16, Neta=33, T=0.5, eta_max=4.0), seed=3
            )[0],
        )
        means = d_x(f).values.mean(axis=0)
        assert np.abs(means).max() < 1e-13


class TestDeta:
    def test_quadratic_exact(self, grid_small):
        f = SliceField.from_function(grid_small, lambda x, e: e**2)
        d1 = d_eta(f)
        d2 = d_eta2(f)
        exact1 = 2 * grid_small.eta
        assert np.abs(d1.values - exact1[None, :]).max() < 1e-11
        assert np.abs(d2.values - 2.0).max() < 1e-10

    def test_constant(self, grid_small):
        f = SliceField(grid_small, np.full((grid_small.Nx, grid_small.Neta), 3.7))
        assert d_eta(f).max_abs() < 1e-12
        assert d_eta2(f).max_abs() < 1e-11

    def test_exp_convergence(self):
        errs1, errs2 = [], []
        for ne in (33, 65, 129):
            g = GridSpec(Nt=3, Nx=8, Neta=ne, T=1.0, eta_max=4.0)
            f = SliceField.from_function(g, lambda x, e: np.exp(-e))
            errs1.append(
                np.abs(d_eta(f).values + np.exp(-g.eta)[None, :]).max()
            )
            errs2.append(
                np.abs(d_eta2(f).values - np.exp(-g.eta)[None, :]).max()
            )
        assert slope(errs1).min() >= 1.9
        assert slope(errs2).min() >= 1.9


class TestZOperators:
    def test_z1_identity(self, grid_small):
        f = SpaceTimeField.from_function(
            grid_small, lambda t, x, e: np.sin(2 * np.pi * x) * np.exp(-e)
        )
        g = Z1(f, 0, 0)
        assert np.array_equal(g.values, f.values)
        assert g is not f

    def test_z1_mixed_exact(self, grid_small):
        f = SpaceTimeField.from_function(
            grid_small, lambda t, x, e: t * np.sin(2 * np.pi * x)
        )
        g = Z1(f, 1, 1)
        exact = 2 * np.pi * np.cos(2 * np.pi * grid_small.x)
        err = np.abs(g.values - exact[None, :, None]).max()
        assert err < 0.1 * 2 * np.pi

    def test_z1_commutes(self, grid_small):
        f = SpaceTimeField(grid_small, smooth_random_field(grid_small, seed=1))
        a = Z1(Z1(f, 1, 0), 0, 1)
        b = Z1(f, 1, 1)
        scale = max(b.max_abs(), 1.0)
        assert np.abs(a.values - b.values).max() < 1e-10 * scale

    def test_z1_order_too_high(self):
        g = GridSpec(Nt=3, Nx=8, Neta=17, T=1.0, eta_max=2.0)
        f = SpaceTimeField.zeros(g)
        with pytest.raises(ValidationError):
            Z1(f, 4, 0)

    def test_z2_basic(self, grid_small):
        f = SliceField.from_function(grid_small, lambda x, e: e * np.exp(-e))
        g = Z2(f)
        eta = grid_small.eta
        exact = eta * (np.exp(-eta) - eta * np.exp(-eta))
        assert np.abs(g.values - exact[None, :]).max() < 0.02
        # wall row vanishes identically
        assert np.abs(g.values[:, 0]).max() == 0.0

    def test_z2_constant(self, grid_small):
        f = SliceField(grid_small, np.full((grid_small.Nx, grid_small.Neta), 2.0))
        assert Z2(f).max_abs() < 1e-12

    def test_z2_commutator(self):
        # [eta d_eta, d_eta] = -d_eta at the discrete level up to O(h^2)
        errs = []
        for ne in (65, 129, 257):
            g = GridSpec(Nt=3, Nx=8, Neta=ne, T=1.0, eta_max=4.0)
            f = SliceField.from_function(g, lambda x, e: np.exp(-e) * (1 + e))
            lhs = Z2(d_eta(f)).values - d_eta(Z2(f)).values + d_eta(f).values
            errs.append(np.abs(lhs).max())
        assert slope(errs)[-1] >= 1.9


class TestEtaIntegrals:
    def test_cumulative_of_one(self, grid_small):
        f = SliceField(grid_small, np.ones((grid_small.Nx, grid_small.Neta)))
        F = int_eta_from0(f)
        assert np.abs(F.values - grid_small.eta[None, :]).max() < 1e-13
        assert np.abs(F.values[:, 0]).max() == 0.0

    def test_cumulative_linear(self, grid_small):
        f = SliceField.from_function(grid_small, lambda x, e: 2 * e)
        F = int_eta_from0(f)
        assert np.abs(F.values - grid_small.eta[None, :] ** 2).max() < 1e-12

    def test_roundtrip_second_order(self):
        errs = []
        for ne in (33, 65):
            g = GridSpec(Nt=3, Nx=8, Neta=ne, T=1.0, eta_max=3.0)
            f = SliceField.from_function(g, lambda x, e: np.cos(e))
            r = d_eta(int_eta_from0(f)).values - f.values
            errs.append(np.abs(r).max())
        assert slope(errs)[0] >= 1.9

    def test_tail_zero(self, grid_small):
        f = SliceField.zeros(grid_small)
        assert int_eta_tail(f).max_abs() == 0.0

    def test_tail_exponential(self):
        g = GridSpec(Nt=3, Nx=8, Neta=257, T=1.0, eta_max=20.0)
        f = SliceField.from_function(g, lambda x, e: np.exp(-e))
        F = int_eta_tail(f)
        exact = np.exp(-g.eta) - np.exp(-g.eta_max)
        assert np.abs(F.values - exact[None, :]).max() < 2e-3

    def test_tail_warns_without_decay(self, grid_small):
        f = SliceField(grid_small, np.ones((grid_small.Nx, grid_small.Neta)))
        with pytest.warns(DecayFloorWarning):
            F = int_eta_tail(f)
        assert "tail_floor_violation" in F.meta

    def test_partition_identity(self, grid_small):
        f = SliceField(
            grid_small,
            smooth_random_field(
                GridSpec(Nt=2, Nx=16, Neta=33, T=0.5, eta_max=4.0), seed=7
            )[0],
        )
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DecayFloorWarning)
            total = int_eta_from0(f).values + int_eta_tail(f).values
        # constant along eta and equal to the full integral
        spread = total.max(axis=1) - total.min(axis=1)
        assert np.abs(spread).max() < 1e-13

    def test_exact_antideriv_inverse(self, grid_small):
        rng = np.random.default_rng(5)
        f = SliceField(grid_small, rng.standard_normal((grid_small.Nx, grid_small.Neta)))
        G = exact_int_eta_from0(f)
        back = d_eta(G)
        # derivative stencil reproduces the integrand away from the wall row
        assert np.abs(back.values[:, 1:] - f.values[:, 1:]).max() < 1e-11
        assert np.abs(G.values[:, 0]).max() == 0.0


class TestPolynomialExactness:
    def test_degree_two(self, grid_small):
        f = SliceField.from_function(grid_small, lambda x, e: 1 + 2 * e + 3 * e**2)
        assert np.abs(d_eta(f).values - (2 + 6 * grid_small.eta)[None, :]).max() < 1e-10
        assert np.abs(d_eta2(f).values - 6.0).max() < 1e-9
