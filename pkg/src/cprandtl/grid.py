"""Space-time grids for the boundary-layer strip [0,T] x T x [0, eta_max].

The tangential coordinate x lives on the unit periodic interval with nodes
x_j = j/Nx.  The normal coordinate eta is a truncation of the half line;
either uniform or exponentially graded node placement is supported, but the
verification suites run on uniform grids so that quadrature/differentiation
exactness statements stay clean.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["GridSpec"]


@dataclass(frozen=True)
class GridSpec:
    """Grid sizes and extents; node arrays are derived once at construction.

    Attributes
    ----------
    Nt, Nx, Neta : int
        Number of time levels, periodic x nodes and eta nodes.
    T : float
        Final time.
    eta_max : float
        Truncation height of the half line; must exceed 1 so the boundary
        cutoff profile (supported in [0,1]) fits inside the domain.
    eta_grading : str
        "uniform" or "exponential".
    grading_strength : float
        Stretching parameter s for the exponential grading.
    """

    Nt: int
    Nx: int
    Neta: int
    T: float
    eta_max: float
    eta_grading: str = "uniform"
    grading_strength: float = 2.0
    t: np.ndarray = field(init=False, repr=False, compare=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)
    eta: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.Nx < 8:
            raise ValidationError(f"grid.Nx must be >= 8, got {self.Nx}")
        if self.Neta < 16:
            raise ValidationError(f"grid.Neta must be >= 16, got {self.Neta}")
        if self.Nt < 2:
            raise ValidationError(f"grid.Nt must be >= 2, got {self.Nt}")
        if not self.T > 0:
            raise ValidationError(f"grid.T must be positive, got {self.T}")
        if not self.eta_max > 1:
            raise ValidationError(
                f"grid.eta_max must exceed 1 (cutoff support), got {self.eta_max}"
            )
        t = np.linspace(0.0, self.T, self.Nt)
        x = np.arange(self.Nx) / self.Nx
        if self.eta_grading == "uniform":
            eta = np.linspace(0.0, self.eta_max, self.Neta)
        elif self.eta_grading == "exponential":
            s = self.grading_strength
            if not s > 0:
                raise ValidationError("grid.grading_strength must be positive")
            r = np.arange(self.Neta) / (self.Neta - 1)
            eta = self.eta_max * np.expm1(s * r) / np.expm1(s)
            eta[0] = 0.0
            eta[-1] = self.eta_max
        else:
            raise ValidationError(
                f"grid.eta_grading must be 'uniform' or 'exponential', "
                f"got {self.eta_grading!r}"
            )
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "eta", eta)

    @property
    def dt(self):
        return self.T / (self.Nt - 1)

    @property
    def dx(self):
        return 1.0 / self.Nx

    @property
    def deta(self):
        """Node spacings along eta, length Neta-1."""
        return np.diff(self.eta)

    @property
    def shape(self):
        return (self.Nt, self.Nx, self.Neta)

    def is_uniform_eta(self):
        d = self.deta
        return bool(np.allclose(d, d[0], rtol=1e-12, atol=0.0))

    def refine(self, rt=1, rx=1, reta=1):
        """New grid with each axis refined by the given integer factor.

        Refinement keeps the extents; node counts scale so that spacings
        shrink by the factor (Nt-1 and Neta-1 are what halve for uniform
        axes, Nx scales directly because x is periodic).
        """
        return GridSpec(
            Nt=(self.Nt - 1) * rt + 1,
            Nx=self.Nx * rx,
            Neta=(self.Neta - 1) * reta + 1,
            T=self.T,
            eta_max=self.eta_max,
            eta_grading=self.eta_grading,
            grading_strength=self.grading_strength,
        )
