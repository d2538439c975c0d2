"""Sampled fields on rectangular lattices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator


class BoxExitError(ValueError):
    """A resampling request left the sampled box of a non-compact field."""


def uniform_axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


@dataclass
class GridFunction:
    """Dense samples of a scalar field on a tensor lattice.

    ``compact[i]`` marks axes along which the field is zero outside the box,
    so interpolation may extend by zero instead of failing.
    """

    axes: tuple
    values: np.ndarray
    names: tuple = ("t", "x", "v")
    compact: tuple = field(default=None)

    def __post_init__(self):
        self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        self.values = np.asarray(self.values)
        if self.values.shape != tuple(len(a) for a in self.axes):
            raise ValueError(f"values shape {self.values.shape} does not match axes")
        if len(self.names) != len(self.axes):
            self.names = tuple(f"a{i}" for i in range(len(self.axes)))
        if self.compact is None:
            self.compact = (True,) * len(self.axes)
        for a in self.axes:
            if len(a) > 2:
                d = np.diff(a)
                if np.max(np.abs(d - d[0])) > 1e-9 * max(abs(d[0]), 1e-300):
                    raise ValueError("axes must be uniformly spaced")

    @classmethod
    def from_function(cls, func, axes, names=("t", "x", "v"), compact=None):
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(tuple(axes), func(*mesh), names, compact)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> tuple:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def box(self) -> tuple:
        return tuple((float(a[0]), float(a[-1]), len(a)) for a in self.axes)

    def mesh(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def integrate(self) -> float:
        return float(np.sum(self.values) * self.cell_volume)

    def lp_norm(self, p: float) -> float:
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max())
        return float((np.sum(a ** p) * self.cell_volume) ** (1.0 / p))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.axes, values, self.names, self.compact)

    def interp(self, points: np.ndarray) -> np.ndarray:
        """Multilinear interpolation at ``points`` of shape (..., ndim)."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.ndim)
        inside = np.ones(len(flat), dtype=bool)
        for i, a in enumerate(self.axes):
            tol = 1e-12 * max(1.0, abs(a[-1] - a[0]))
            ok = (flat[:, i] >= a[0] - tol) & (flat[:, i] <= a[-1] + tol)
            if not self.compact[i] and not ok.all():
                raise BoxExitError(f"resampling leaves the box along axis {self.names[i]}")
            inside &= ok
        f = RegularGridInterpolator(self.axes, self.values, method="linear",
                                    bounds_error=False, fill_value=0.0)
        out = np.zeros(len(flat), dtype=self.values.dtype)
        out[inside] = f(flat[inside])
        return out.reshape(pts.shape[:-1])

    def boundary_max(self, axis: int) -> float:
        """Largest magnitude on the two faces normal to ``axis``."""
        v = np.moveaxis(np.abs(self.values), axis, 0)
        return float(max(v[0].max(), v[-1].max()))
