"""Zero-th order approximate solution built in three stages.

Stage 1 assembles time-Taylor compatibility data at t = 0 and sums it into
a polynomial-in-time profile.  Stage 2 solves a linear degenerate parabolic
problem for the shear proxy phi and rebuilds the profile from its tail
integral, which repairs the eta-decay of the residual.  Stage 3 subtracts a
boundary cutoff correction so the wall condition holds exactly, at the
price of the residual term assembled in `boundary_fix`.  The final profile
(u_a3, v_a3) carries its residual f_a, the starting source of the
Nash-Moser loop.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import d_eta, d_t, d_x, deta_n, dx_n, int_eta_from0, int_eta_tail
from .errors import CflError, NumericalError, ValidationError
from .fields import SliceField, SpaceTimeField
from .stencils import apply_deriv, apply_deriv_periodic, cumtrapz, trapz_weights
from .tridiag import solve_tridiagonal

__all__ = [
    "ApproxSolution",
    "PhiReport",
    "taylor_data",
    "build_ua1",
    "solve_phi",
    "phi_bounds_report",
    "build_ua2",
    "boundary_fix",
    "build_approx_solution",
    "cutoff_profile",
]

_GROWTH_CAP = 1e8


# ---------------------------------------------------------------------------
# stage 1: compatibility data and the polynomial-in-time profile


def _time_derivs_at0(arr, grid, orders):
    """One-sided t-derivatives of a (Nt, Nx) trace array at t = 0."""
    out = {0: arr[0]}
    for j in range(1, orders + 1):
        out[j] = apply_deriv(arr, grid.t, j, axis=0)[0]
    return out


def _recip_coeffs(rho_c, K):
    """Taylor (derivative) coefficients of 1/rho from those of rho."""
    r = {0: 1.0 / rho_c[0]}
    for j in range(1, K + 1):
        acc = np.zeros_like(rho_c[0])
        for i in range(1, j + 1):
            acc += math.comb(j, i) * rho_c[i] * r[j - i]
        r[j] = -acc / rho_c[0]
    return r


def taylor_data(idata, trace, K=None):
    """Compatibility pairs (ubar^j, vbar^j), j = 0..K, from the initial data
    and the trace, by repeated time differentiation of the defect equation
    at t = 0.

    ubar^0 is u0 - U(0,x); each next order comes from solving the equation
    for the time derivative and applying the Leibniz rule to the products,
    with the normal component recovered from the divergence relation at
    every order.
    """
    grid = idata.grid
    if K is None:
        K = idata.compat_order
    if K < 0:
        raise ValidationError("Taylor order K must be nonnegative")
    eta = grid.eta
    U = _time_derivs_at0(trace.U, grid, K)
    V = _time_derivs_at0(trace.V, grid, K)
    rho = _time_derivs_at0(trace.rho, grid, K)
    Ux = {j: apply_deriv_periodic(U[j], grid.dx, 1, axis=0) for j in U}
    r = _recip_coeffs(rho, K)

    def dx1(a):
        return apply_deriv_periodic(a, grid.dx, 1, axis=0)

    def de(a, m=1):
        return apply_deriv(a, eta, m, axis=1)

    def vbar_of(ubars, j):
        acc = np.zeros_like(ubars[0])
        for i in range(j + 1):
            flux = np.zeros_like(ubars[0])
            for k in range(j - i + 1):
                flux += math.comb(j - i, k) * rho[k][:, None] * ubars[j - i - k]
            acc += math.comb(j, i) * r[i][:, None] * cumtrapz(dx1(flux), eta, axis=1)
        return -acc

    ubars = [idata.u0.values - U[0][:, None]]
    vbars = [vbar_of(ubars, 0)]
    for j in range(K):
        rhs = np.zeros_like(ubars[0])
        for i in range(j + 1):
            c = math.comb(j, i)
            uji = ubars[j - i]
            rhs -= c * Ux[i][:, None] * uji
            rhs -= c * U[i][:, None] * dx1(uji)
            rhs -= c * ubars[i] * dx1(uji)
            rhs -= c * vbars[i] * de(uji)
            rhs -= c * (V[i][:, None] * eta[None, :]) * de(uji)
            rhs += c * r[i][:, None] * de(uji, 2)
        if not np.isfinite(rhs).all() or np.abs(rhs).max() > _GROWTH_CAP:
            raise NumericalError(
                f"Taylor recursion blew past the growth cap at order {j + 1}"
            )
        ubars.append(rhs)
        vbars.append(vbar_of(ubars, j + 1))
    return [
        (SliceField(grid, u), SliceField(grid, v)) for u, v in zip(ubars, vbars)
    ]


def build_ua1(taylor, trace, grid, gamma=2):
    """Polynomial-in-time profile u^a = sum t^j/j! ubar^j lifted to the full
    state (U + u^a, V eta + v^a); the normal part is rebuilt per time level
    from the divergence relation so the constraint holds to round-off in
    flux form.  Returns (u_a1, v_a1, weighted-bound report)."""
    if not taylor:
        raise ValidationError("taylor data must be nonempty")
    t = grid.t
    ua = np.zeros(grid.shape)
    for j, (ub, _) in enumerate(taylor):
        ua += (t**j / math.factorial(j))[:, None, None] * ub.values[None, :, :]
    rho = trace.rho[:, :, None]
    va = -cumtrapz(
        apply_deriv_periodic(rho * ua, grid.dx, 1, axis=1), grid.eta, axis=2
    ) / rho
    u_a1 = SpaceTimeField(grid, trace.U[:, :, None] + ua)
    v_a1 = SpaceTimeField(
        grid, trace.V[:, :, None] * grid.eta[None, None, :] + va
    )
    report = _weighted_bound_report(SpaceTimeField(grid, ua), gamma)
    return u_a1, v_a1, report


def _weighted_bound_report(f, gamma, max_order=2):
    """max_t of the (1+eta)^(gamma+a2)-weighted L2(x, eta) norms of D^a f."""
    grid = f.grid
    we = trapz_weights(grid.eta)
    report = {}
    for a1t in range(max_order + 1):
        for a1x in range(max_order + 1 - a1t):
            for a2 in range(max_order + 1 - a1t - a1x):
                g = f.values
                if a2:
                    g = apply_deriv(g, grid.eta, a2, axis=2)
                if a1x:
                    g = apply_deriv_periodic(g, grid.dx, a1x, axis=1)
                if a1t:
                    g = apply_deriv(g, grid.t, a1t, axis=0)
                wgt = (1.0 + grid.eta) ** (gamma + a2)
                per_t = np.einsum("txe,e->t", (g * wgt) ** 2, we) * grid.dx
                report[f"wL2[{a1t},{a1x},{a2}]"] = float(np.sqrt(per_t.max()))
    return report


# ---------------------------------------------------------------------------
# stage 2: decay correction through the degenerate parabolic problem


def _require_uniform_eta(grid, who):
    if not grid.is_uniform_eta():
        raise ValidationError(f"{who} requires a uniform eta grid")


def _cfl_check(dt, umax, vmax, grid, cfl_max=0.95):
    speed = umax / grid.dx + vmax / grid.deta.min()
    if speed > 0:
        dt_max = cfl_max / speed
        if dt > dt_max:
            raise CflError(dt, dt_max)


def solve_phi(idata, trace, u_a1, v_a1, scheme="backward_euler", cfl_max=0.95):
    """March the linear degenerate parabolic problem for the shear proxy:

        phi_t + (u_a1 phi)_x + (v_a1 phi)_eta - (1/rho) phi_etaeta = 0,
        d_eta phi|_{eta=0} = rho Px,   phi|_{eta=eta_max} = 0 (truncation),
        phi|_{t=0} = d_eta u0.

    Transport is explicit, diffusion implicit (tridiagonal per x column);
    `scheme` picks backward Euler or Crank-Nicolson for the diffusion.
    """
    grid = idata.grid
    _require_uniform_eta(grid, "solve_phi")
    theta = {"backward_euler": 1.0, "crank_nicolson": 0.5}.get(scheme)
    if theta is None:
        raise ValidationError(f"unknown scheme {scheme!r}")
    h = float(grid.deta[0])
    dt = grid.dt
    Nx, Ne = grid.Nx, grid.Neta
    phi = np.empty(grid.shape)
    phi[0] = d_eta(idata.u0).values
    bdata = trace.rho * trace.Px  # Neumann data per (t, x)
    r = 1.0 / trace.rho  # (Nt, Nx)
    uv = u_a1.values
    vv = v_a1.values
    for n in range(grid.Nt - 1):
        _cfl_check(dt, np.abs(uv[n]).max(), np.abs(vv[n]).max(), grid, cfl_max)
        adv = apply_deriv_periodic(uv[n] * phi[n], grid.dx, 1, axis=0)
        adv += apply_deriv(vv[n] * phi[n], grid.eta, 1, axis=1)
        mu_new = theta * dt * r[n + 1][:, None] / h**2  # (Nx, 1)
        rhs = phi[n] - dt * adv
        if theta < 1.0:
            lap = np.empty_like(phi[n])
            lap[:, 1:-1] = phi[n][:, 2:] - 2 * phi[n][:, 1:-1] + phi[n][:, :-2]
            lap[:, 0] = 2 * phi[n][:, 1] - 2 * phi[n][:, 0] - 2 * h * bdata[n]
            lap[:, -1] = 0.0
            rhs += (1 - theta) * dt * r[n][:, None] / h**2 * lap
        lower = np.broadcast_to(-mu_new, (Nx, Ne)).copy()
        diag = np.broadcast_to(1 + 2 * mu_new, (Nx, Ne)).copy()
        upper = np.broadcast_to(-mu_new, (Nx, Ne)).copy()
        # wall row: mirror ghost carrying the Neumann flux
        upper[:, 0] = -2 * mu_new[:, 0]
        rhs[:, 0] -= 2 * h * mu_new[:, 0] * bdata[n + 1]
        # truncation row: homogeneous Dirichlet
        lower[:, -1] = 0.0
        diag[:, -1] = 1.0
        rhs[:, -1] = 0.0
        phi[n + 1] = solve_tridiagonal(lower, diag, upper, rhs)
    return SpaceTimeField(grid, phi)


@dataclass
class PhiReport:
    t0: float
    t0_index: int
    min_weighted: np.ndarray  # per time level, min over grid of (1+eta)^(g+2) phi
    weighted_l2_max: float
    sup_bounds: dict
    sigma0: float

    def positive_on_horizon(self):
        return bool(self.min_weighted[: self.t0_index + 1].min() > 0)


def phi_bounds_report(phi, idata, declared_t0_index=None, max_order=2):
    """Report the decay-class bounds of phi and the empirical horizon t0.

    t0 is the last time level at which (1+eta)^(gamma+2) phi still clears
    sigma0/2 everywhere; the proof's 'sigma0 - C t' argument makes this the
    natural grid analog.  A nonpositive minimum inside a caller-declared
    horizon is an error telling the caller to shrink T.
    """
    grid = phi.grid
    g = idata.gamma
    w = (1.0 + grid.eta) ** (g + 2)
    y = phi.values * w[None, None, :]
    min_w = y.reshape(grid.Nt, -1).min(axis=1)
    thresh = idata.sigma0 / 2.0
    ok = min_w >= thresh
    t0_index = 0
    while t0_index + 1 < grid.Nt and ok[: t0_index + 2].all():
        t0_index += 1
    if not ok[0]:
        raise NumericalError(
            "phi fails the monotonicity floor already at t = 0; the initial "
            "data does not satisfy the decay hypothesis on this grid"
        )
    if declared_t0_index is not None:
        seg = y[: declared_t0_index + 1]
        if seg.min() <= 0:
            raise NumericalError(
                "phi loses positivity inside the declared horizon; shrink T "
                f"(min weighted phi = {seg.min():.3e})"
            )
    sup_bounds = {}
    for a1t in range(max_order + 1):
        for a1x in range(max_order + 1 - a1t):
            for a2 in range(max_order + 1 - a1t - a1x):
                gg = phi.values
                if a2:
                    gg = apply_deriv(gg, grid.eta, a2, axis=2)
                if a1x:
                    gg = apply_deriv_periodic(gg, grid.dx, a1x, axis=1)
                if a1t:
                    gg = apply_deriv(gg, grid.t, a1t, axis=0)
                wgt = (1.0 + grid.eta) ** (g + 2 + a2)
                sup_bounds[f"sup[{a1t},{a1x},{a2}]"] = float(
                    np.abs(gg * wgt[None, None, :]).max()
                )
    wrep = _weighted_bound_report(phi, g, max_order=max_order)
    return PhiReport(
        t0=float(grid.t[t0_index]),
        t0_index=t0_index,
        min_weighted=min_w,
        weighted_l2_max=max(wrep.values()),
        sup_bounds=sup_bounds,
        sigma0=idata.sigma0,
    )


def build_ua2(phi, trace, u_a1, v_a1, decay_floor=1e-8):
    """Profile rebuilt from the tail integral of phi:

        u_a2 = U - tail(phi),
        v_a2 = V eta + (1/rho) int_0^eta (rho tail(phi))_x,

    plus the residual field f0 of this stage, assembled from its defining
    algebra (the stage-2 equation residual)."""
    grid = phi.grid
    W = int_eta_tail(phi, decay_floor=decay_floor)
    rho = trace.rho[:, :, None]
    u_a2 = SpaceTimeField(grid, trace.U[:, :, None] - W.values)
    v_a2 = SpaceTimeField(
        grid,
        trace.V[:, :, None] * grid.eta[None, None, :]
        + cumtrapz(
            apply_deriv_periodic(rho * W.values, grid.dx, 1, axis=1),
            grid.eta,
            axis=2,
        )
        / rho,
    )
    # residual of the stage-2 profile: tail integral of the x-flux of the
    # transported defect plus the normal-velocity mismatch against stage 1
    integrand = (trace.U[:, :, None] - u_a1.values - W.values) * phi.values
    tail_term = int_eta_tail(
        SpaceTimeField(grid, apply_deriv_periodic(integrand, grid.dx, 1, axis=1)),
        decay_floor=np.inf,
    )
    f0 = SpaceTimeField(
        grid,
        -tail_term.values + (v_a2.values - v_a1.values) * phi.values,
    )
    f0.meta.update(W.meta)
    return u_a2, v_a2, f0


# ---------------------------------------------------------------------------
# stage 3: boundary cutoff fix


def cutoff_profile(eta):
    """Smooth decreasing bump with support [0, 1], value 1 at the wall.

    psi = exp(1 - 1/(1-eta^2)) inside [0,1); returns (psi, psi', psi'')
    sampled on the given nodes, derivatives in closed form.
    """
    eta = np.asarray(eta, dtype=float)
    inside = eta < 1.0
    s = np.where(inside, eta, 0.0)
    q = 1.0 - s**2
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        psi = np.where(inside, np.exp(1.0 - 1.0 / q), 0.0)
        dpsi = np.where(inside, psi * (-2.0 * s) / q**2, 0.0)
        d2psi = np.where(
            inside,
            psi * ((4.0 * s**2) / q**4 - 2.0 / q**2 - 8.0 * s**2 / q**3),
            0.0,
        )
    return psi, dpsi, d2psi


@dataclass
class ApproxSolution:
    """Zero-th order profile, its residual, and the stage data."""

    u_a3: SpaceTimeField
    v_a3: SpaceTimeField
    f_a: SpaceTimeField
    phi: SpaceTimeField
    zeta: np.ndarray  # (Nt, Nx) boundary defect of stage 2
    psi: np.ndarray  # (Neta,) cutoff profile
    t0: float
    t0_index: int
    sigma0: float
    gamma: int
    reports: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.u_a3.grid


def boundary_fix(u_a2, v_a2, phi, f0, trace, idata, phi_report):
    """Subtract the cutoff correction zeta(t,x) psi(eta) so the wall
    condition holds exactly, assemble the residual f_a = f0 - fbar0, and
    certify the shear floor d_eta u_a3 >= phi/2 on the reported horizon."""
    grid = u_a2.grid
    eta = grid.eta
    psi, dpsi, d2psi = cutoff_profile(eta)
    Psi = cumtrapz(psi, eta, axis=0)  # running integral of the cutoff
    zeta = u_a2.values[:, :, 0].copy()  # (Nt, Nx)
    rho = trace.rho[:, :, None]
    u_a3 = SpaceTimeField(grid, u_a2.values - zeta[:, :, None] * psi[None, None, :])
    v_a3 = SpaceTimeField(
        grid,
        v_a2.values
        + cumtrapz(
            apply_deriv_periodic(
                rho * zeta[:, :, None] * psi[None, None, :], grid.dx, 1, axis=1
            ),
            eta,
            axis=2,
        )
        / rho,
    )
    # residual of the cutoff correction, assembled termwise
    zeta_t = apply_deriv(zeta, grid.t, 1, axis=0)[:, :, None]
    zeta_x = apply_deriv_periodic(zeta, grid.dx, 1, axis=1)[:, :, None]
    rz_x = apply_deriv_periodic(trace.rho * zeta, grid.dx, 1, axis=1)[:, :, None]
    z3 = zeta[:, :, None]
    psi3 = psi[None, None, :]
    ua2x = d_x(u_a2).values
    ua2e = d_eta(u_a2).values
    fbar0 = (
        zeta_t * psi3
        + z3 * psi3 * ua2x
        + u_a2.values * zeta_x * psi3
        - z3 * zeta_x * psi3**2
        + v_a2.values * z3 * dpsi[None, None, :]
        - ua2e * rz_x / rho * Psi[None, None, :]
        + z3 * dpsi[None, None, :] * rz_x / rho * Psi[None, None, :]
        - d2psi[None, None, :] * z3 / rho
    )
    f_a = SpaceTimeField(grid, f0.values - fbar0)
    # monotonicity persistence on the phi horizon
    shear = d_eta(u_a3).values
    margin = shear - 0.5 * phi.values
    ok = margin.reshape(grid.Nt, -1).min(axis=1) >= 0
    t0_index = phi_report.t0_index
    while t0_index > 0 and not ok[: t0_index + 1].all():
        t0_index -= 1
    if not ok[0]:
        raise NumericalError(
            "shear floor d_eta u_a3 >= phi/2 fails even at t = 0; "
            "shrink the horizon or soften the boundary defect"
        )
    reports = {
        "zeta_max": float(np.abs(zeta).max()),
        "zeta_t0_max": float(np.abs(zeta[0]).max()),
        "app20_min_margin": float(margin[: t0_index + 1].min()),
        "phi": phi_report,
    }
    return ApproxSolution(
        u_a3=u_a3,
        v_a3=v_a3,
        f_a=f_a,
        phi=phi,
        zeta=zeta,
        psi=psi,
        t0=float(grid.t[t0_index]),
        t0_index=t0_index,
        sigma0=idata.sigma0,
        gamma=idata.gamma,
        reports=reports,
    )


def build_approx_solution(
    idata, trace, K=None, scheme="backward_euler", decay_floor=1e-8
):
    """Run the three construction stages end to end."""
    grid = idata.grid
    taylor = taylor_data(idata, trace, K=K)
    u_a1, v_a1, ua1_report = build_ua1(taylor, trace, grid, gamma=idata.gamma)
    phi = solve_phi(idata, trace, u_a1, v_a1, scheme=scheme)
    phi_report = phi_bounds_report(phi, idata)
    u_a2, v_a2, f0 = build_ua2(phi, trace, u_a1, v_a1, decay_floor=decay_floor)
    approx = boundary_fix(u_a2, v_a2, phi, f0, trace, idata, phi_report)
    approx.reports["ua1_weighted_bounds"] = ua1_report
    approx.reports["stage1_orders"] = len(taylor) - 1
    return approx
