"""Weighted conormal norm families and the inequality property checks.

Conventions
-----------
Z denotes the conormal operators d_t, d_x and eta*d_eta; a conormal
multi-index mu = (a, b, c) applies them with total order |mu| = a+b+c.
Plain normal derivatives d_eta^n are counted anisotropically: the index
set of the A/C/D families is

    |mu| + floor((n+1)/2) <= m,

i.e. two normal derivatives cost one unit.  All families combine their
seminorms in the l^2 sense (root of the sum of squares); the weight is
<eta>^l = (1+eta)^l.  Sup-type norms take discrete maxima over grid rows.
"""

from dataclasses import dataclass, field

import numpy as np

from .calculus import conormal, deta_n
from .errors import ValidationError
from .fields import SpaceTimeField
from .stencils import trapz_weights

__all__ = [
    "WeightSpec",
    "NormReport",
    "a_index_set",
    "tangential_multi_indices",
    "conormal_multi_indices",
    "norm_Hco",
    "norm_Dco",
    "norm_Cco",
    "norm_B",
    "norm_A",
    "norm_C",
    "norm_D",
    "norm_report",
    "linf",
    "weighted_l2",
    "morse_check",
    "embedding_check",
    "lambda_functional",
    "lambda_k",
]


@dataclass(frozen=True)
class WeightSpec:
    """Weight exponent l > 1/2 and decay integer gamma >= 2."""

    l: float
    gamma: int = 2

    def __post_init__(self):
        if not self.l > 0.5:
            raise ValidationError(f"weight exponent l must exceed 1/2, got {self.l}")
        if int(self.gamma) != self.gamma or self.gamma < 2:
            raise ValidationError(
                f"decay exponent gamma must be an integer >= 2, got {self.gamma}"
            )

    @classmethod
    def from_gamma(cls, gamma):
        # default weight tied to the decay class of the data
        return cls(l=gamma / 2.0, gamma=gamma)


# ---------------------------------------------------------------------------
# quadrature helpers


def _quad(grid):
    wt = trapz_weights(grid.t)
    wx = np.full(grid.Nx, grid.dx)
    we = trapz_weights(grid.eta)
    return wt, wx, we


def _eta_weight(grid, l):
    return (1.0 + grid.eta) ** l


def weighted_l2(field_or_values, grid, l):
    """L^2([0,T] x T x R+) norm with weight <eta>^l."""
    v = getattr(field_or_values, "values", field_or_values)
    wt, wx, we = _quad(grid)
    g = (v * _eta_weight(grid, l)) ** 2
    return float(
        np.sqrt(np.einsum("txe,t,x,e->", g, wt, wx, we))
    )


def _sup_eta_l2_tx(values, grid, l):
    """L^inf_eta(L^2_{t,x}) with weight <eta>^l."""
    wt, wx, _ = _quad(grid)
    g = (values * _eta_weight(grid, l)) ** 2
    per_eta = np.einsum("txe,t,x->e", g, wt, wx)
    return float(np.sqrt(per_eta.max()))


def _sup_tx_l2_eta(values, grid, l):
    """L^inf_{t,x}(L^2_eta) with weight <eta>^l."""
    _, _, we = _quad(grid)
    g = (values * _eta_weight(grid, l)) ** 2
    per_tx = g @ we
    return float(np.sqrt(per_tx.max()))


def linf(field_or_values):
    v = getattr(field_or_values, "values", field_or_values)
    return float(np.abs(v).max())


# ---------------------------------------------------------------------------
# index sets


def tangential_multi_indices(k1):
    """All (a, b) with a+b <= k1 (d_t^a d_x^b)."""
    return [(a, b) for a in range(k1 + 1) for b in range(k1 + 1 - a)]


def conormal_multi_indices(k1, exact=False):
    """All (a, b, c) with a+b+c <= k1 (or == k1 when exact)."""
    out = []
    for a in range(k1 + 1):
        for b in range(k1 + 1 - a):
            for c in range(k1 + 1 - a - b):
                if not exact or a + b + c == k1:
                    out.append((a, b, c))
    return out


def a_index_set(m):
    """Pairs (mu, n) with |mu| + floor((n+1)/2) <= m, mu a conormal
    multi-index and n the plain normal-derivative order."""
    pairs = []
    for p in range(m + 1):
        n_max = 2 * (m - p)  # floor((n+1)/2) <= m-p  <=>  n <= 2(m-p)
        for mu in conormal_multi_indices(p, exact=True):
            for n in range(n_max + 1):
                pairs.append((mu, n))
    return pairs


# ---------------------------------------------------------------------------
# families


def _seminorm_terms(f, pairs, reducer, l):
    grid = f.grid
    total = 0.0
    by_n = {}
    for mu, n in pairs:
        if n not in by_n:
            by_n[n] = deta_n(f, n)
        g = conormal(by_n[n], *mu)
        total += reducer(g.values, grid, l) ** 2
    return float(np.sqrt(total))


def norm_B(f, k1, k2, w):
    """Root of the sum over |mu| <= k1, n <= k2 of squared weighted L^2
    norms of Z^mu d_eta^n f."""
    pairs = [(mu, n) for mu in conormal_multi_indices(k1) for n in range(k2 + 1)]
    return _seminorm_terms(f, pairs, _weighted_l2_reducer, w.l)


def _weighted_l2_reducer(values, grid, l):
    wt, wx, we = _quad(grid)
    g = (values * _eta_weight(grid, l)) ** 2
    return float(np.sqrt(np.einsum("txe,t,x,e->", g, wt, wx, we)))


def norm_Hco(f, k1, k2, w):
    """Tangential multi-indices up to k1 combined with Z2 powers up to k2."""
    pairs = [
        ((a, b, c), 0)
        for (a, b) in tangential_multi_indices(k1)
        for c in range(k2 + 1)
    ]
    return _seminorm_terms(f, pairs, _weighted_l2_reducer, w.l)


def norm_Dco(f, k1, k2, w):
    pairs = [
        ((a, b, c), 0)
        for (a, b) in tangential_multi_indices(k1)
        for c in range(k2 + 1)
    ]
    return _seminorm_terms(f, pairs, _sup_eta_l2_tx, w.l)


def norm_Cco(f, k1, k2, w):
    pairs = [
        ((a, b, c), 0)
        for (a, b) in tangential_multi_indices(k1)
        for c in range(k2 + 1)
    ]
    return _seminorm_terms(f, pairs, _sup_tx_l2_eta, w.l)


def norm_A(f, m, w, homogeneous=False):
    """Anisotropic space-time family; the workhorse of the iteration
    estimates."""
    pairs = a_index_set(m)
    if homogeneous:
        pairs = [(mu, n) for mu, n in pairs if sum(mu) + (n + 1) // 2 >= 1]
    return _seminorm_terms(f, pairs, _weighted_l2_reducer, w.l)


def norm_D(f, m, w, homogeneous=False):
    pairs = a_index_set(m)
    if homogeneous:
        pairs = [(mu, n) for mu, n in pairs if sum(mu) + (n + 1) // 2 >= 1]
    return _seminorm_terms(f, pairs, _sup_eta_l2_tx, w.l)


def norm_C(f, m, w, homogeneous=False):
    pairs = a_index_set(m)
    if homogeneous:
        pairs = [(mu, n) for mu, n in pairs if sum(mu) + (n + 1) // 2 >= 1]
    return _seminorm_terms(f, pairs, _sup_tx_l2_eta, w.l)


@dataclass
class NormReport:
    """Tagged norm values for one field; all finite and nonnegative."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def items(self):
        return self.values.items()


def norm_report(f, w, k1=1, k2=1, m=1):
    r = NormReport()
    r.values[f"Hco({k1},{k2},{w.l:g})"] = norm_Hco(f, k1, k2, w)
    r.values[f"Dco({k1},{k2},{w.l:g})"] = norm_Dco(f, k1, k2, w)
    r.values[f"Cco({k1},{k2},{w.l:g})"] = norm_Cco(f, k1, k2, w)
    r.values[f"B({k1},{k2},{w.l:g})"] = norm_B(f, k1, k2, w)
    r.values[f"A({m},{w.l:g})"] = norm_A(f, m, w)
    r.values[f"Adot({m},{w.l:g})"] = norm_A(f, m, w, homogeneous=True)
    r.values[f"C({m},{w.l:g})"] = norm_C(f, m, w)
    r.values[f"D({m},{w.l:g})"] = norm_D(f, m, w)
    for k, v in r.values.items():
        if not np.isfinite(v) or v < 0:
            raise ValidationError(f"norm {k} is not finite and nonnegative: {v}")
    return r


# ---------------------------------------------------------------------------
# inequality property checks


def morse_check(f, g, m, w):
    """Ratio of the product inequality
    ||fg||_A <= C ( ||f||_A ||g||_inf + ||f||_inf ||g||_Adot ).

    Returns the measured ratio; 0/0 is defined as 0, a nonzero numerator
    over a zero denominator is an error.
    """
    fg = SpaceTimeField(f.grid, f.values * g.values)
    num = norm_A(fg, m, w)
    den = norm_A(f, m, w) * linf(g) + linf(f) * norm_A(g, m, w, homogeneous=True)
    if den == 0.0:
        if num == 0.0:
            return 0.0
        raise ValidationError("Morse ratio denominator vanished with nonzero product")
    return num / den


def embedding_check(f, m, w):
    """Measured constant of ||f||_{C^m_l} <= K ||f||_{A^{m+2}_l}."""
    num = norm_C(f, m, w)
    den = norm_A(f, m + 2, w)
    if den == 0.0:
        return 0.0
    return num / den


def _dco_exact(values, grid, k1, k2):
    """l^2 combination over conormal multi-indices of total order exactly k1
    of the unweighted sup_eta L^2_{t,x} seminorm of Z^mu d_eta^k2 field."""
    f = SpaceTimeField(grid, values)
    base = deta_n(f, k2) if k2 else f
    total = 0.0
    for mu in conormal_multi_indices(k1, exact=True):
        g = conormal(base, *mu)
        total += _sup_eta_l2_tx(g.values, grid, 0.0) ** 2
    return float(np.sqrt(total))


def lambda_functional(coeffs, k1, k2, w):
    """Size functional of a linearization background at orders (k1, k2):
    weighted B-norm of the shear defect, sup-type seminorms of the bounded
    normal velocity and of the curvature ratio, and the B-norm of the
    first commutator coefficient."""
    grid = coeffs.grid
    U3 = coeffs.trace.U[:, :, None]
    shear_defect = SpaceTimeField(grid, coeffs.u_tilde.values - U3)
    term1 = norm_B(shear_defect, k1, k2, w)
    term2 = _dco_exact(coeffs.v_bar.values, grid, k1, k2)
    term3 = _dco_exact(coeffs.chi.values, grid, k1, k2)
    term4 = norm_B(coeffs.xi1, k1, k2, w)
    return term1 + term2 + term3 + term4


def lambda_k(coeffs, k, w):
    """Sum of lambda_{k1,k2} over the anisotropic index set
    k1 + floor((k2+1)/2) <= k."""
    total = 0.0
    for k1 in range(k + 1):
        for k2 in range(2 * (k - k1) + 1):
            total += lambda_functional(coeffs, k1, k2, w)
    return total
