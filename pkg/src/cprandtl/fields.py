"""Field containers: scalar samples on the space-time grid.

SpaceTimeField is the universal carrier (tangential velocity, normal
velocity, transformed unknown, residuals, ...).  SliceField holds one time
level.  Both refuse non-finite entries outright; a NaN anywhere is a bug,
not data.
"""

import numpy as np

from .errors import ValidationError
from .grid import GridSpec

__all__ = ["SpaceTimeField", "SliceField"]


def _check_finite(values, name):
    if not np.isfinite(values).all():
        bad = np.argwhere(~np.isfinite(values))[0]
        raise ValidationError(
            f"{name} contains a non-finite entry at index {tuple(bad)}"
        )


class _FieldBase:
    __slots__ = ("grid", "values", "meta")

    def __init__(self, grid, values, meta=None):
        if not isinstance(grid, GridSpec):
            raise ValidationError("field needs a GridSpec")
        values = np.asarray(values, dtype=float)
        if values.shape != self._expected_shape(grid):
            raise ValidationError(
                f"{type(self).__name__} shape {values.shape} does not match "
                f"grid {self._expected_shape(grid)}"
            )
        _check_finite(values, type(self).__name__)
        self.grid = grid
        self.values = values
        self.meta = dict(meta) if meta else {}

    # -- small arithmetic conveniences (fresh allocation, inputs untouched) --

    def _wrap(self, values):
        return type(self)(self.grid, values)

    def __add__(self, other):
        return self._wrap(self.values + self._coerce(other))

    def __sub__(self, other):
        return self._wrap(self.values - self._coerce(other))

    def __mul__(self, other):
        return self._wrap(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.values)

    def _coerce(self, other):
        if isinstance(other, _FieldBase):
            if other.grid is not self.grid and other.grid != self.grid:
                raise ValidationError("fields live on different grids")
            return other.values
        return other

    def copy(self):
        return type(self)(self.grid, self.values.copy(), self.meta)

    def max_abs(self):
        return float(np.abs(self.values).max())

    def __repr__(self):
        return (
            f"{type(self).__name__}(shape={self.values.shape}, "
            f"max|f|={self.max_abs():.3e})"
        )


class SliceField(_FieldBase):
    """Scalar field at one time level, indexed (x node, eta node)."""

    @staticmethod
    def _expected_shape(grid):
        return (grid.Nx, grid.Neta)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.Nx, grid.Neta)))

    @classmethod
    def from_function(cls, grid, fn):
        """Sample fn(x, eta) on the slice grid (broadcasting meshes)."""
        X, E = np.meshgrid(grid.x, grid.eta, indexing="ij")
        return cls(grid, np.asarray(fn(X, E), dtype=float))


class SpaceTimeField(_FieldBase):
    """Scalar field indexed (time level, x node, eta node)."""

    @staticmethod
    def _expected_shape(grid):
        return (grid.Nt, grid.Nx, grid.Neta)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.Nt, grid.Nx, grid.Neta)))

    @classmethod
    def from_function(cls, grid, fn):
        """Sample fn(t, x, eta) on the full grid."""
        Tm, X, E = np.meshgrid(grid.t, grid.x, grid.eta, indexing="ij")
        return cls(grid, np.asarray(fn(Tm, X, E), dtype=float))

    def slice(self, k):
        return SliceField(self.grid, self.values[k])

    @classmethod
    def stack(cls, grid, slices):
        return cls(grid, np.stack([s.values for s in slices], axis=0))
