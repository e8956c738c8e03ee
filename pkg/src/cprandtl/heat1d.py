"""Analytic sine-series reference for the one-dimensional heat reduction.

With x-independent data, a constant trace (V = 0, Px = 0) and constant
density rho0, the tangential velocity solves the plain heat equation on
[0, eta_max] with u(0) = 0 and u(eta_max) = U.  The exact solution on the
truncated interval is the linear steady profile plus a sine series, which
serves as an independent oracle for the direct solver.
"""

import numpy as np

__all__ = ["heat_reference"]


def heat_reference(u0_fn, U, eta_max, rho0, times, eta, n_modes=2000, quad_pts=20001):
    """Evaluate the exact truncated-domain solution at the given times/nodes.

    Parameters
    ----------
    u0_fn : callable eta -> u0(eta); must satisfy u0(0)=0, u0(eta_max)=U for
        a boundary-compatible series (discontinuities give Gibbs artifacts).
    U : far-field Dirichlet value (constant).
    rho0 : constant density (diffusivity is 1/rho0).
    times, eta : 1-D arrays of evaluation points.

    Returns an array of shape (len(times), len(eta)).
    """
    times = np.asarray(times, dtype=float)
    eta = np.asarray(eta, dtype=float)
    s_fine = np.linspace(0.0, eta_max, quad_pts)
    g = u0_fn(s_fine) - U * s_fine / eta_max
    k = np.arange(1, n_modes + 1)
    sin_fine = np.sin(np.pi * np.outer(k, s_fine) / eta_max)
    w = np.full(quad_pts, s_fine[1] - s_fine[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    b = (2.0 / eta_max) * sin_fine @ (g * w)
    lam = (np.pi * k / eta_max) ** 2 / rho0
    sin_eval = np.sin(np.pi * np.outer(k, eta) / eta_max)
    decay = np.exp(-np.outer(times, lam))
    return U * eta[None, :] / eta_max + (decay * b[None, :]) @ sin_eval
