"""Finite-difference stencils and quadrature primitives.

Everything here is second-order accurate: centered differences in the
interior, one-sided stencils of matching order at interval ends, and
trapezoid quadrature.  Weights come from Fornberg's algorithm so the same
code path serves uniform and graded grids and any derivative order the
grid can support.
"""

import numpy as np

from .errors import ValidationError

__all__ = [
    "fornberg_weights",
    "deriv_table",
    "apply_deriv",
    "apply_deriv_periodic",
    "cumtrapz",
    "trapz_weights",
    "exact_antideriv_from_wall",
]

_TABLE_CACHE = {}
_MATRIX_CACHE = {}


def fornberg_weights(z, nodes, m):
    """Weights of the m-th derivative at z from samples at the given nodes.

    Classic recursion of Fornberg (Math. Comp. 51, 1988).  Exact for
    polynomials of degree < len(nodes).
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    if m >= n:
        raise ValidationError(
            f"derivative order {m} needs more than {n} stencil nodes"
        )
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - z
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - z
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def deriv_table(coords, m):
    """Per-node (start index, weights) table for the m-th derivative.

    Interior rows use the symmetric centered stencil (3 points for m <= 2,
    5 for m <= 4); rows that would reach outside the domain switch to
    one-sided windows of m+2 nodes, which keeps second-order accuracy at
    the ends.  Rows are zero-padded to a common width.
    """
    coords = np.asarray(coords, dtype=float)
    key = (coords.tobytes(), coords.size, m)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    n = coords.size
    wc = 2 * ((m + 1) // 2) + 1  # centered interior width
    we = m + 2  # one-sided width with order-2 accuracy
    wmax = max(wc, we)
    if wmax > n:
        raise ValidationError(
            f"derivative order {m} does not fit on an axis with {n} nodes"
        )
    half = wc // 2
    starts = np.empty(n, dtype=int)
    weights = np.zeros((n, wmax))
    for i in range(n):
        if i - half < 0:
            s, w = 0, we
        elif i + half > n - 1:
            s, w = n - we, we
        else:
            s, w = i - half, wc
        g = min(s, n - wmax)  # gather start keeping the padded window in range
        weights[i, s - g : s - g + w] = fornberg_weights(
            coords[i], coords[s : s + w], m
        )
        starts[i] = g
    _TABLE_CACHE[key] = (starts, weights)
    return starts, weights


def apply_deriv(values, coords, m, axis):
    """m-th derivative of `values` along `axis` on the (nonperiodic) grid
    `coords`."""
    starts, weights = deriv_table(coords, m)
    w = weights.shape[1]
    arr = np.moveaxis(np.asarray(values), axis, -1)
    idx = starts[:, None] + np.arange(w)[None, :]
    windows = arr[..., idx]  # (..., n, w)
    out = np.einsum("...nw,nw->...n", windows, weights)
    return np.moveaxis(out, -1, axis)


def apply_deriv_periodic(values, dx, m, axis):
    """m-th derivative along a uniform periodic axis with spacing dx."""
    arr = np.asarray(values)
    n = arr.shape[axis]
    half = (m + 1) // 2
    w = 2 * half + 1
    if w > n:
        raise ValidationError(
            f"derivative order {m} does not fit on a periodic axis with {n} nodes"
        )
    offsets = np.arange(-half, half + 1)
    weights = fornberg_weights(0.0, offsets * dx, m)
    out = np.zeros_like(arr, dtype=float)
    for off, c in zip(offsets, weights):
        if c != 0.0:
            out += c * np.roll(arr, -off, axis=axis)
    return out


def trapz_weights(coords):
    """Trapezoid quadrature weights for the (possibly graded) node set."""
    coords = np.asarray(coords, dtype=float)
    d = np.diff(coords)
    w = np.zeros_like(coords)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def cumtrapz(values, coords, axis):
    """Cumulative trapezoid integral from the first node, zero there."""
    arr = np.moveaxis(np.asarray(values), axis, -1)
    d = np.diff(np.asarray(coords, dtype=float))
    inc = 0.5 * d * (arr[..., 1:] + arr[..., :-1])
    out = np.zeros_like(arr, dtype=float)
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    return np.moveaxis(out, -1, axis)


def _antideriv_matrix(coords):
    """Matrix of the exact right inverse of the first-derivative table.

    Row 0 pins the antiderivative to zero at the wall; rows 1..n-1 are the
    derivative stencil rows themselves, so solving reproduces any field
    that vanishes at the wall exactly (up to round-off) and the derivative
    of the result reproduces the integrand exactly away from the wall row.
    """
    coords = np.asarray(coords, dtype=float)
    key = (coords.tobytes(), coords.size)
    hit = _MATRIX_CACHE.get(key)
    if hit is not None:
        return hit
    n = coords.size
    starts, weights = deriv_table(coords, 1)
    M = np.zeros((n, n))
    M[0, 0] = 1.0
    for i in range(1, n):
        s = starts[i]
        M[i, s : s + weights.shape[1]] = weights[i]
    if abs(np.linalg.det(M)) < 1e-300:
        raise ValidationError("antiderivative system is singular on this grid")
    _MATRIX_CACHE[key] = M
    return M


def exact_antideriv_from_wall(values, coords, axis):
    """Antiderivative G with G(wall)=0 such that the standard first-derivative
    stencil applied to G returns `values` exactly at every node but the wall.

    This is the discrete inverse used by the transform round trip; the plain
    `cumtrapz` is only a second-order inverse of the derivative stencil.
    """
    M = _antideriv_matrix(coords)
    arr = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    shape = arr.shape
    rhs = arr.reshape(-1, shape[-1]).T.copy()
    rhs[0, :] = 0.0
    sol = np.linalg.solve(M, rhs)
    sol[0, :] = 0.0  # pin the wall row exactly, not just to round-off
    out = sol.T.reshape(shape)
    return np.moveaxis(out, -1, axis)
