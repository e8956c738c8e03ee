"""Admissible initial data for the tangential velocity.

The structural hypothesis is the monotonicity floor

    d_eta u0 >= sigma0 / (1+eta)^(gamma+2)  at every node,

which is what makes the Crocco-type transform usable and rules out
boundary-layer separation.  Polynomial-decay profiles satisfy it; pure
exponential profiles do not (they dip under any polynomial floor far out),
so the bundled presets use algebraic tails.
"""

from dataclasses import dataclass, field

import numpy as np

from .calculus import d_eta, deta_n, dx_n
from .errors import ValidationError
from .fields import SliceField
from .grid import GridSpec

__all__ = ["InitialData", "make_initial_data", "validate_initial_data"]


@dataclass
class InitialData:
    """Initial tangential velocity u0(x, eta) plus its admissibility data."""

    u0: SliceField
    gamma: int
    sigma0: float
    compat_order: int = 2
    preset: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.u0.grid


def make_initial_data(
    preset, grid, trace, gamma=2, sigma0=0.5, compat_order=2, **params
):
    """Initial-data presets tied to the trace's value at t = 0.

    poly : U(0,x) times the algebraic shear profile whose slope is
           proportional to (1 + (a eta)^2)^-(gamma+2)/2, normalized to reach
           U at eta_max, plus a localized wall correction that enforces the
           first-order compatibility d^2_eta u0(x,0) = rho(0,x) Px(0,x) of
           the momentum equation on the wall.  The profile's own wall
           curvature vanishes, so the correction stays of the size of the
           pressure trace.  `a` in (0, 1] sets the layer thickness.
    tanh : u0 = U(0,x) * tanh(eta/s) / tanh(eta_max/s); gentle profile for
           heat-equation reductions (it does NOT satisfy the polynomial
           monotonicity floor far out and is meant for x-independent runs
           with a constant trace, where Px = 0 keeps it wall-compatible).
    custom : params["u0"] is an (Nx, Neta) array.
    """
    U0 = trace.U[0]
    eta = grid.eta
    if preset == "poly":
        a = float(params.pop("a", 0.5))
        beta = float(params.pop("beta", 3.0))
        if not 0 < a <= 1:
            raise ValidationError("poly profile parameter a must be in (0, 1]")
        if gamma != 2:
            # the closed-form antiderivative below is tied to the
            # (1+u^2)^-2 slope of the gamma = 2 decay class
            raise ValidationError(
                "the poly preset implements the gamma = 2 decay class"
            )
        u = a * eta
        # antiderivative of (1+u^2)^-2 is u/(2(1+u^2)) + arctan(u)/2
        M = (4.0 / np.pi) * (u / (2.0 * (1.0 + u**2)) + 0.5 * np.arctan(u))
        M = M / M[-1]
        comp = trace.rho[0] * trace.Px[0]  # wall curvature demanded at t=0
        gcorr = 0.5 * eta**2 * np.exp(-beta * eta)
        vals = U0[:, None] * M[None, :] + comp[:, None] * gcorr[None, :]
        params.update(a=a, beta=beta)
    elif preset == "tanh":
        s = float(params.pop("s", 2.0))
        M = np.tanh(eta / s) / np.tanh(grid.eta_max / s)
        vals = U0[:, None] * M[None, :]
        params["s"] = s
    elif preset == "custom":
        vals = np.asarray(params.pop("u0"), dtype=float)
        if vals.shape != (grid.Nx, grid.Neta):
            raise ValidationError(
                f"custom u0 must have shape {(grid.Nx, grid.Neta)}"
            )
    else:
        raise ValidationError(f"unknown initial-data preset {preset!r}")
    return InitialData(
        u0=SliceField(grid, vals),
        gamma=int(gamma),
        sigma0=float(sigma0),
        compat_order=int(compat_order),
        preset=preset,
        params=params,
    )


def validate_initial_data(idata, trace, farfield_tol=0.05, max_order=2):
    """Check the admissibility hypotheses at the grid level.

    The monotonicity floor and the wall condition are hard errors.  The
    far-field match to U(0, x) is a hard error beyond `farfield_tol`
    (relative to max |U|).  The weighted derivative bounds are reported,
    not enforced: their stated constants are mutually restrictive enough
    that realistic presets exceed them, so the report carries the measured
    suprema for inspection.
    """
    grid = idata.grid
    u0 = idata.u0
    eta = grid.eta
    floor = idata.sigma0 / (1.0 + eta) ** (idata.gamma + 2)
    shear = d_eta(u0).values
    deficit = shear - floor[None, :]
    if deficit.min() < 0:
        i, j = np.unravel_index(np.argmin(deficit), deficit.shape)
        raise ValidationError(
            "monotonicity floor violated: d_eta u0 = "
            f"{shear[i, j]:.4e} < {floor[j]:.4e} at (x index {i}, eta = "
            f"{eta[j]:.3f})"
        )
    wall = np.abs(u0.values[:, 0]).max()
    if wall > 1e-12:
        raise ValidationError(f"u0 must vanish on the wall; max |u0(x,0)| = {wall:.3e}")
    U0 = trace.U[0]
    scale = max(np.abs(U0).max(), 1e-30)
    far = np.abs(u0.values[:, -1] - U0).max()
    if far > farfield_tol * scale:
        raise ValidationError(
            f"far-field mismatch: max |u0(x,eta_max) - U(0,x)| = {far:.3e} "
            f"exceeds {farfield_tol:.2g} * max|U| = {farfield_tol * scale:.3e}"
        )
    report = {
        "min_weighted_shear": float(
            ((1.0 + eta) ** (idata.gamma + 2) * shear).min()
        ),
        "farfield_mismatch": float(far),
    }
    # weighted bounds of the decay hypotheses, reported per derivative order
    from .stencils import trapz_weights

    we = trapz_weights(eta)
    defect = SliceField(grid, u0.values - U0[:, None])
    for a1 in range(max_order + 1):
        for a2 in range(max_order + 1 - a1):
            g = deta_n(dx_n(defect, a1), a2).values
            wL2 = (1.0 + eta) ** (idata.gamma + a2)
            report[f"H3_l2[{a1},{a2}]"] = float(
                np.sqrt(np.einsum("xe,e->", (g * wL2[None, :]) ** 2, we) * grid.dx)
            )
            gs = deta_n(dx_n(u0, a1), a2 + 1).values
            wS = (1.0 + eta) ** (idata.gamma + 2 + a2)
            report[f"H4_sup[{a1},{a2}]"] = float(np.abs(gs * wS[None, :]).max())
    report["H4_bound"] = 1.0 / idata.sigma0
    report["H4_ok"] = bool(
        max(v for k, v in report.items() if k.startswith("H4_sup"))
        <= 1.0 / idata.sigma0
    )
    return report
