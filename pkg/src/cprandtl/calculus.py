"""Discrete calculus on fields: tangential/normal derivatives, conormal
operators, and eta integrals.

All operations are pure; inputs are never mutated.  Axis conventions are
fixed by the field containers: SliceField is (x, eta), SpaceTimeField is
(t, x, eta).  x derivatives are periodic, t and eta derivatives use
centered stencils inside and one-sided second-order stencils at interval
ends.
"""

import warnings

import numpy as np

from .errors import DecayFloorWarning, ValidationError
from .fields import SliceField, SpaceTimeField
from .stencils import (
    apply_deriv,
    apply_deriv_periodic,
    cumtrapz,
    exact_antideriv_from_wall,
)

__all__ = [
    "d_t",
    "d_x",
    "d_eta",
    "d_eta2",
    "dt_n",
    "dx_n",
    "deta_n",
    "Z1",
    "Z2",
    "conormal",
    "int_eta_from0",
    "int_eta_tail",
    "exact_int_eta_from0",
    "divergence_residual",
]


def _axes(field):
    if isinstance(field, SliceField):
        return None, 0, 1
    if isinstance(field, SpaceTimeField):
        return 0, 1, 2
    raise ValidationError(f"not a field: {type(field).__name__}")


def dt_n(f, m=1):
    """m-th time derivative (SpaceTimeField only)."""
    ta, _, _ = _axes(f)
    if ta is None:
        raise ValidationError("time derivative needs a SpaceTimeField")
    if m == 0:
        return f.copy()
    return type(f)(f.grid, apply_deriv(f.values, f.grid.t, m, axis=ta))


def dx_n(f, m=1):
    """m-th periodic x derivative."""
    _, xa, _ = _axes(f)
    if m == 0:
        return f.copy()
    return type(f)(f.grid, apply_deriv_periodic(f.values, f.grid.dx, m, axis=xa))


def deta_n(f, m=1):
    """m-th eta derivative."""
    _, _, ea = _axes(f)
    if m == 0:
        return f.copy()
    return type(f)(f.grid, apply_deriv(f.values, f.grid.eta, m, axis=ea))


def d_t(f):
    return dt_n(f, 1)


def d_x(f):
    return dx_n(f, 1)


def d_eta(f):
    return deta_n(f, 1)


def d_eta2(f):
    return deta_n(f, 2)


def Z1(f, m1, m2):
    """Mixed tangential derivative d_t^m1 d_x^m2 of a SpaceTimeField."""
    out = dx_n(f, m2) if m2 else f
    return dt_n(out, m1) if m1 else (out.copy() if out is f else out)


def Z2(f, power=1):
    """The boundary-adapted operator (eta * d_eta) applied `power` times.

    Vanishes identically on the wall row because of the eta factor.
    """
    _, _, ea = _axes(f)
    eta = f.grid.eta
    out = f
    for _ in range(power):
        out = type(f)(f.grid, eta * apply_deriv(out.values, eta, 1, axis=ea))
    return out.copy() if out is f else out


def conormal(f, a, b, c):
    """Conormal derivative d_t^a d_x^b (eta d_eta)^c."""
    out = Z2(f, c) if c else f
    out2 = dx_n(out, b) if b else out
    out3 = dt_n(out2, a) if a else out2
    return out3.copy() if out3 is f else out3


def int_eta_from0(f):
    """Cumulative trapezoid integral from the wall; zero on the wall row."""
    _, _, ea = _axes(f)
    return type(f)(f.grid, cumtrapz(f.values, f.grid.eta, axis=ea))


def exact_int_eta_from0(f):
    """Antiderivative from the wall that is the exact discrete inverse of
    the d_eta stencil (see stencils.exact_antideriv_from_wall)."""
    _, _, ea = _axes(f)
    return type(f)(
        f.grid, exact_antideriv_from_wall(f.values, f.grid.eta, axis=ea)
    )


def int_eta_tail(f, decay_floor=1e-8):
    """Tail integral from eta to eta_max, treating the tail beyond the
    truncation height as zero.

    Warns (and records in result.meta) when the data has not decayed at
    eta_max relative to its own magnitude.
    """
    _, _, ea = _axes(f)
    cum = cumtrapz(f.values, f.grid.eta, axis=ea)
    total = np.take(cum, [-1], axis=ea)
    out = type(f)(f.grid, total - cum)
    top = np.abs(np.take(f.values, [-1], axis=ea)).max()
    scale = np.abs(f.values).max()
    if scale > 0 and top > decay_floor * scale:
        out.meta["tail_floor_violation"] = float(top / scale)
        warnings.warn(
            f"tail integral of data with |f(eta_max)| = {top:.2e} "
            f"({top / scale:.2e} of max |f|); truncation error is not "
            "negligible",
            DecayFloorWarning,
            stacklevel=2,
        )
    return out


def divergence_residual(u, v, trace, form="flux"):
    """Residual of the compressible continuity relation
    d_x(rho u) + d_eta(rho v) + rho_t = 0.

    form="flux" integrates the relation over each eta cell with the same
    trapezoid rule the normal-velocity reconstructions use, then divides by
    the cell width; for any v built by cumulative trapezoid integration this
    is zero to round-off.  form="stencil" evaluates the pointwise relation
    with the standard derivative stencils and carries the usual O(h^2)
    consistency error; it is reported for diagnostics only.

    Returns the residual as a plain array shaped like u with one fewer eta
    node in the flux form.
    """
    if u.values.ndim != 3:
        raise ValidationError("divergence residual expects SpaceTimeFields")
    grid = u.grid
    rho = trace.rho[:, :, None]
    rho_t = trace.rho_t[:, :, None]
    g = apply_deriv_periodic(rho * u.values, grid.dx, 1, axis=1) + rho_t
    rv = rho * v.values
    if form == "flux":
        d = grid.deta[None, None, :]
        cell = np.diff(rv, axis=2) + 0.5 * d * (g[:, :, 1:] + g[:, :, :-1])
        return cell / d
    if form == "stencil":
        return apply_deriv(rv, grid.eta, 1, axis=2) + g
    raise ValidationError(f"unknown divergence residual form {form!r}")
