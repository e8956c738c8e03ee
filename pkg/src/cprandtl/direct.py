"""Independent direct solver for the nonlinear boundary-layer system.

This is the ground-truth oracle: a plain IMEX march of

    u_t + u u_x + v u_eta - (1/rho) u_etaeta + Px = 0

with the normal velocity reconstructed from the integrated continuity
relation before every step (v is never solved for).  Advection is explicit,
diffusion implicit; the splitting is first order in time, which is
acceptable for an oracle and can be sharpened with the Crank-Nicolson flag.
"""

from dataclasses import dataclass, field

import numpy as np

from .calculus import d_eta, d_eta2, d_t, d_x, divergence_residual
from .errors import CflError, MonotonicityError, ValidationError
from .fields import SpaceTimeField
from .stencils import apply_deriv, apply_deriv_periodic, cumtrapz
from .tridiag import solve_tridiagonal

__all__ = ["DirectSolution", "solve_nonlinear", "apply_prandtl_operator", "recover_v_full"]


def recover_v_full(u_values, trace, grid):
    """Normal velocity of a full state from the integrated continuity
    relation: v = V eta + (1/rho) int_0^eta d_x(rho (U - u))."""
    rho = trace.rho[:, :, None] if u_values.ndim == 3 else trace.rho[..., None]
    U = trace.U[:, :, None] if u_values.ndim == 3 else trace.U[..., None]
    V = trace.V[:, :, None] if u_values.ndim == 3 else trace.V[..., None]
    flux = apply_deriv_periodic(rho * (U - u_values), grid.dx, 1, axis=-2)
    return V * grid.eta + cumtrapz(flux, grid.eta, axis=-1) / rho


@dataclass
class DirectSolution:
    u: SpaceTimeField
    v: SpaceTimeField
    diagnostics: dict = field(default_factory=dict)


def solve_nonlinear(
    idata,
    trace,
    scheme="backward_euler",
    cfl_max=0.95,
    check_monotonicity=True,
):
    """March the nonlinear system from idata.u0.

    Per step: rebuild v from the current u, advance u with explicit
    advection and pressure and implicit diffusion, then apply the wall and
    far-field Dirichlet rows.  Fails loudly on CFL violations and (when
    enabled) on loss of shear monotonicity, the grid-level signature of
    separation onset.
    """
    grid = idata.grid
    if not grid.is_uniform_eta():
        raise ValidationError("solve_nonlinear requires a uniform eta grid")
    theta = {"backward_euler": 1.0, "crank_nicolson": 0.5}.get(scheme)
    if theta is None:
        raise ValidationError(f"unknown scheme {scheme!r}")
    h = float(grid.deta[0])
    dt = grid.dt
    Nx, Ne = grid.Nx, grid.Neta
    u = np.empty(grid.shape)
    v = np.empty(grid.shape)
    u[0] = idata.u0.values
    cfl_hist = np.zeros(grid.Nt - 1)
    min_shear = np.zeros(grid.Nt)
    min_shear[0] = apply_deriv(u[0], grid.eta, 1, axis=1).min()
    r = 1.0 / trace.rho
    for n in range(grid.Nt - 1):
        rho_n = trace.rho[n][:, None]
        flux = apply_deriv_periodic(
            rho_n * (trace.U[n][:, None] - u[n]), grid.dx, 1, axis=0
        )
        v[n] = trace.V[n][:, None] * grid.eta + cumtrapz(flux, grid.eta, axis=1) / rho_n
        speed = np.abs(u[n]).max() / grid.dx + np.abs(v[n]).max() / h
        cfl_hist[n] = dt * speed
        if dt * speed > cfl_max:
            raise CflError(dt, cfl_max / speed)
        adv = (
            u[n] * apply_deriv_periodic(u[n], grid.dx, 1, axis=0)
            + v[n] * apply_deriv(u[n], grid.eta, 1, axis=1)
            + trace.Px[n][:, None]
        )
        rhs = u[n] - dt * adv
        if theta < 1.0:
            lap = np.zeros_like(u[n])
            lap[:, 1:-1] = u[n][:, 2:] - 2 * u[n][:, 1:-1] + u[n][:, :-2]
            rhs += (1 - theta) * dt * r[n][:, None] / h**2 * lap
        mu = theta * dt * r[n + 1][:, None] / h**2
        lower = np.broadcast_to(-mu, (Nx, Ne)).copy()
        diag = np.broadcast_to(1 + 2 * mu, (Nx, Ne)).copy()
        upper = np.broadcast_to(-mu, (Nx, Ne)).copy()
        # wall and far-field Dirichlet rows
        diag[:, 0] = 1.0
        upper[:, 0] = 0.0
        rhs[:, 0] = 0.0
        lower[:, -1] = 0.0
        diag[:, -1] = 1.0
        rhs[:, -1] = trace.U[n + 1]
        u[n + 1] = solve_tridiagonal(lower, diag, upper, rhs)
        min_shear[n + 1] = apply_deriv(u[n + 1], grid.eta, 1, axis=1).min()
        if check_monotonicity and min_shear[n + 1] <= 0:
            raise MonotonicityError(
                f"separation onset: min d_eta u = {min_shear[n + 1]:.3e} at "
                f"time level {n + 1} (t = {grid.t[n + 1]:.4f})"
            )
    rho_last = trace.rho[-1][:, None]
    flux = apply_deriv_periodic(
        rho_last * (trace.U[-1][:, None] - u[-1]), grid.dx, 1, axis=0
    )
    v[-1] = (
        trace.V[-1][:, None] * grid.eta + cumtrapz(flux, grid.eta, axis=1) / rho_last
    )
    uf = SpaceTimeField(grid, u)
    vf = SpaceTimeField(grid, v)
    div = float(np.abs(divergence_residual(uf, vf, trace)).max())
    return DirectSolution(
        u=uf,
        v=vf,
        diagnostics={
            "cfl": cfl_hist,
            "min_shear": min_shear,
            "divergence_max": div,
        },
    )


def apply_prandtl_operator(u, v, trace):
    """Pointwise residual of the nonlinear operator
    u_t + u u_x + v u_eta - (1/rho) u_etaeta + Px, with the shared stencils.

    This is the one evaluator used for every cross-module residual check.
    """
    grid = u.grid
    rho = trace.rho[:, :, None]
    res = (
        d_t(u).values
        + u.values * d_x(u).values
        + v.values * d_eta(u).values
        - d_eta2(u).values / rho
        + trace.Px[:, :, None]
    )
    return SpaceTimeField(grid, res)
