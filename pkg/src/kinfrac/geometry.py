"""Kinetic translation group, anisotropic dilations and function scalings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction


@dataclass(frozen=True)
class PhasePoint:
    t: float
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if x.shape != v.shape or x.ndim != 1:
            raise ValueError(f"x and v must be vectors of equal length, got {x.shape} and {v.shape}")
        if not (np.isfinite(self.t) and np.isfinite(x).all() and np.isfinite(v).all()):
            raise ValueError("phase point coordinates must be finite")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def d(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, d: int = 1) -> "PhasePoint":
        return cls(0.0, np.zeros(d), np.zeros(d))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.t], self.x, self.v])

    @classmethod
    def from_array(cls, a) -> "PhasePoint":
        a = np.asarray(a, dtype=float)
        d = (len(a) - 1) // 2
        return cls(a[0], a[1:1 + d], a[1 + d:])

    def allclose(self, other: "PhasePoint", rtol=1e-12, atol=1e-12) -> bool:
        return np.allclose(self.as_array(), other.as_array(), rtol=rtol, atol=atol)


def compose(a: PhasePoint, b: PhasePoint) -> PhasePoint:
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    return PhasePoint(a.t + b.t, a.x + b.x + b.t * a.v, a.v + b.v)


def inverse(a: PhasePoint) -> PhasePoint:
    return PhasePoint(-a.t, -a.x + a.t * a.v, -a.v)


def relative(a: PhasePoint, b: PhasePoint) -> PhasePoint:
    """a^{-1} o b written out directly."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    ds = b.t - a.t
    return PhasePoint(ds, b.x - a.x - ds * a.v, b.v - a.v)


# Array forms: t has shape S, x and v have shape S + (d,).

def compose_arrays(t, x, v, s, y, w):
    t, s = np.asarray(t), np.asarray(s)
    return t + s, x + y + s[..., None] * v, v + w


def inverse_arrays(t, x, v):
    t = np.asarray(t)
    return -t, -x + t[..., None] * v, -v


def dilate(point: PhasePoint, r: float, alpha: float, beta: float) -> PhasePoint:
    if not (0 < alpha < beta) or r <= 0:
        raise ValueError("need 0 < alpha < beta and r > 0")
    return PhasePoint(r ** alpha * point.t, r ** beta * point.x, r ** (beta - alpha) * point.v)


def dilation_exponents(alpha, beta) -> tuple:
    """Per-coordinate powers of r in the dilation; composing two dilations adds exponents of log r."""
    return (alpha, beta, beta - alpha)


def _resample(f: GridFunction, scales) -> np.ndarray:
    mesh = f.mesh()
    pts = np.stack([c * m for c, m in zip(scales, mesh)], axis=-1)
    return f.interp(pts)


def scale_function(f: GridFunction, lam: float, sigma: float, p: float) -> GridFunction:
    """f_lambda(t,x,v) = f(lambda^{sigma p} t, lambda^{sigma p + 1} x, lambda v) on f's own grid (d=1 grids)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if lam == 1:
        return f.with_values(f.values.copy())
    sp = sigma * p
    return f.with_values(_resample(f, (lam ** sp, lam ** (sp + 1), lam)))


def scale_lq_power(lam: float, sigma: float, p: float, q: float, d: int = 1) -> float:
    """Exact factor ||f_lambda||_q / ||f||_q from the Jacobian of the scaling."""
    sp = sigma * p
    return lam ** (-(sp + d * (sp + 1) + d) / q)


def nu_rescale_pair(f: GridFunction, S: GridFunction, nu: float):
    """(f(nu t, nu x, v), nu S(nu t, nu x, v)) resampled on the original grids.

    S may carry an extra trailing axis (the increment variable), which is left alone.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    if nu == 1:
        return f.with_values(f.values.copy()), S.with_values(S.values.copy())
    scales_f = (nu, nu) + (1.0,) * (f.ndim - 2)
    scales_s = (nu, nu) + (1.0,) * (S.ndim - 2)
    return f.with_values(_resample(f, scales_f)), S.with_values(nu * _resample(S, scales_s))
