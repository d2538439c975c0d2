"""Fractional velocity operators: increment quotients, their adjoint divergence,
Fourier multipliers |xi|^{+-s}, and far-field decay estimation.

Grid work is one velocity dimension. Spectral operators act along one axis of
an array and zero-pad that axis before transforming.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy import integrate, special
from scipy.interpolate import make_interp_spline

from .grid import BoxExitError, GridFunction

ZERO_MODE_TOL = 1e-10
MIN_PAD = 0.25


class MeanZeroError(ValueError):
    def __init__(self, mean, tol):
        super().__init__(f"input mean {mean:.3e} exceeds zero-mode tolerance {tol:.3e}")
        self.mean = mean


class PaddingError(ValueError):
    pass


# ---------------------------------------------------------------- constants

def c_gag(d: int = 1, sigma: float = 0.5) -> float:
    """2 * int (1 - cos h_1) / |h|^{d+2 sigma} dh by adaptive quadrature (d=1)."""
    if d != 1:
        raise NotImplementedError("c_gag quadrature is implemented for d=1 grids only")
    s2 = 1 + 2 * sigma
    near, _ = integrate.quad(lambda h: (1 - np.cos(h)) * h ** (-s2), 0, 1, limit=200, epsabs=1e-14)
    far_plain = 1.0 / (2 * sigma)  # int_1^inf h^{-1-2 sigma} dh
    far_cos, _ = integrate.quad(lambda h: h ** (-s2), 1, np.inf, weight="cos", wvar=1.0)
    return 4.0 * (near + far_plain - far_cos)


def c_bes(sigma: float) -> float:
    """Constant of the singular-integral form of the |xi|^sigma multiplier, d=1."""
    return 2 ** sigma * special.gamma((1 + sigma) / 2) / (math.sqrt(math.pi) * abs(special.gamma(-sigma / 2)))


def c_rie(sigma: float) -> float:
    """Constant of the kernel c |w|^{sigma-1} with multiplier |xi|^{-sigma}, d=1."""
    return special.gamma((1 - sigma) / 2) / (2 ** sigma * math.sqrt(math.pi) * special.gamma(sigma / 2))


def odd_kernel_const(mu: float) -> float:
    """C with C*sign(w)|w|^{mu-1} having multiplier i sign(xi)|xi|^{-mu}, -1 < mu < 1."""
    # Gamma(mu) sin(pi mu / 2) = Gamma(1+mu) * (pi/2) * sinc(mu/2), continuous at mu = 0
    g = special.gamma(1 + mu) * (math.pi / 2) * np.sinc(mu / 2)
    return -1.0 / (2 * g)


# ---------------------------------------------------------------- spectral core

def _padded_length(n: int, pad: float) -> int:
    extra = int(math.ceil(2 * pad * n))
    return sfft.next_fast_len(n + extra)


def wavenumbers(n: int, dx: float) -> np.ndarray:
    return 2 * np.pi * sfft.fftfreq(n, d=dx)


def apply_multiplier(values, dx: float, symbol, axis: int = -1, pad: float = MIN_PAD,
                     periodic: bool = False, check_collar: float | None = None):
    """Apply a Fourier multiplier symbol(xi) along ``axis``.

    Compact inputs are zero-padded by ``pad`` of the width on each side
    (at least 25%). The zero frequency of negative-order symbols is left to
    ``symbol`` (it should return 0 there).
    """
    a = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    n = a.shape[-1]
    if periodic:
        N = n
    else:
        if pad < MIN_PAD:
            raise PaddingError(f"padding {pad} below the required {MIN_PAD}")
        if check_collar is not None:
            edge = max(np.abs(a[..., 0]).max(), np.abs(a[..., -1]).max())
            if edge > check_collar * max(np.abs(a).max(), 1e-300):
                raise PaddingError(f"boundary magnitude {edge:.3e} exceeds collar tolerance")
        N = _padded_length(n, pad)
    xi = wavenumbers(N, dx)
    sym = np.asarray(symbol(xi), dtype=complex)
    spec = sfft.fft(a, n=N, axis=-1)
    out = sfft.ifft(spec * sym, axis=-1)[..., :n].real
    return np.moveaxis(out, -1, axis)


def sym_power(s: float):
    """|xi|^s with the zero mode set to 0 for s <= 0."""
    def f(xi):
        out = np.zeros_like(xi)
        nz = xi != 0
        out[nz] = np.abs(xi[nz]) ** s
        if s > 0:
            out[~nz] = 0.0
        return out
    return f


def sym_odd(s: float):
    """i xi |xi|^{-s} (zero mode 0)."""
    def f(xi):
        out = np.zeros(xi.shape, dtype=complex)
        nz = xi != 0
        out[nz] = 1j * xi[nz] * np.abs(xi[nz]) ** (-s)
        return out
    return f


def _mean_guard(values, dx, axis, tol=ZERO_MODE_TOL):
    a = np.moveaxis(np.asarray(values, float), axis, -1)
    n = a.shape[-1]
    mean = np.abs(a.sum(axis=-1) * dx).max() if a.size else 0.0
    scale = max(np.abs(a).max(), 1e-300) * n * dx
    if mean > tol * scale:
        raise MeanZeroError(float(mean), tol * scale)


def dsigma(values, dx, sigma, axis=-1, pad=MIN_PAD, periodic=False):
    """Bessel-type derivative: multiplier |xi|^sigma."""
    return apply_multiplier(values, dx, sym_power(sigma), axis, pad, periodic)


def isigma(values, dx, sigma, axis=-1, pad=MIN_PAD, periodic=False, check_mean=True):
    """Riesz potential: multiplier |xi|^{-sigma}, mean-zero input."""
    if check_mean:
        _mean_guard(values, dx, axis)
    return apply_multiplier(values, dx, sym_power(-sigma), axis, pad, periodic)


def neg_lap_power(values, dx, s, axis=-1, pad=MIN_PAD, periodic=False, check_mean=None):
    """(-Delta)^s via |xi|^{2s}; for s < 0 the input must have zero mean."""
    if (check_mean is None and s < 0) or check_mean:
        _mean_guard(values, dx, axis)
    return apply_multiplier(values, dx, sym_power(2 * s), axis, pad, periodic)


def spectral_gradient(values, dx, axis=-1, pad=MIN_PAD, periodic=False):
    return apply_multiplier(values, dx, lambda xi: 1j * xi, axis, pad, periodic)


def _grid_v(g: GridFunction, axis):
    if isinstance(axis, str):
        axis = g.names.index(axis)
    return axis, g.spacing[axis]


def bessel_derivative(g: GridFunction, sigma, axis="v", periodic=False) -> GridFunction:
    ax, dx = _grid_v(g, axis)
    return g.with_values(dsigma(g.values, dx, sigma, ax, periodic=periodic))


def riesz_potential(g: GridFunction, sigma, axis="v", periodic=False) -> GridFunction:
    ax, dx = _grid_v(g, axis)
    return g.with_values(isigma(g.values, dx, sigma, ax, periodic=periodic))


def neg_lap_inverse_sigma(g: GridFunction, sigma, axis="v", periodic=False) -> GridFunction:
    ax, dx = _grid_v(g, axis)
    return g.with_values(neg_lap_power(g.values, dx, -sigma, ax, periodic=periodic))


def frac_laplacian(g: GridFunction, sigma, axis="v", periodic=False) -> GridFunction:
    ax, dx = _grid_v(g, axis)
    return g.with_values(neg_lap_power(g.values, dx, sigma, ax, periodic=periodic))


# ---------------------------------------------------------------- increment quadrature

@dataclass
class HNodes:
    """Signed log-spaced increment nodes with weights for d eta(h) = dh/|h| (d=1).

    Composite Simpson in u = log|h| on each sign; the regions |h| < h_min and
    |h| > h_max are closed by power-law models of the integrand.
    """

    h: np.ndarray
    weights: np.ndarray
    h_min: float
    h_max: float
    n_side: int

    @classmethod
    def build(cls, h_min: float, h_max: float, per_decade: int = 24) -> "HNodes":
        decades = math.log10(h_max / h_min)
        n = max(int(math.ceil(decades * per_decade)), 4)
        n += n % 2  # Simpson needs an even number of intervals
        u = np.linspace(math.log(h_min), math.log(h_max), n + 1)
        du = u[1] - u[0]
        w = np.ones(n + 1)
        w[1:-1:2] = 4
        w[2:-1:2] = 2
        w *= du / 3
        hp = np.exp(u)
        h = np.concatenate([-hp[::-1], hp])
        weights = np.concatenate([w[::-1], w])
        return cls(h, weights, h_min, h_max, n + 1)

    @classmethod
    def for_grid(cls, dx: float, width: float, per_decade: int = 24) -> "HNodes":
        return cls.build(dx / 4, 64 * width, per_decade)

    @property
    def edge_index(self):
        """Indices of (-h_max, -h_min, +h_min, +h_max)."""
        n = self.n_side
        return 0, n - 1, n, 2 * n - 1

    def integrate(self, g, inner_power: float, outer_power: float):
        """int g(h) d eta(h); g has h on its last axis.

        Near zero g ~ |h|^{inner_power}, at infinity g ~ |h|^{-outer_power}.
        """
        g = np.asarray(g)
        total = g @ self.weights
        i0, i1, i2, i3 = self.edge_index
        if inner_power > 0:
            total = total + (g[..., i1] + g[..., i2]) / inner_power
        if outer_power > 0:
            total = total + (g[..., i0] + g[..., i3]) / outer_power
        return total


@dataclass
class IncrementField:
    """Values of an h-dependent field F(z, h) on base grid x h-nodes."""

    base: GridFunction
    nodes: HNodes
    values: np.ndarray
    sigma: float
    axis: int = -1


def shift_sampler(g: GridFunction, axis):
    """Cubic spline along ``axis`` returning f(..., v + h, ...) with zero extension."""
    ax, _ = _grid_v(g, axis)
    vax = g.axes[ax]
    spl = make_interp_spline(vax, g.values, k=3, axis=ax)
    lo, hi = vax[0], vax[-1]
    compact = g.compact[ax]

    def sample(h):
        pts = vax + h
        inside = (pts >= lo) & (pts <= hi)
        if not compact and not inside.all():
            raise BoxExitError("increment leaves the v-box of a non-compact field")
        vals = np.zeros_like(g.values)
        if inside.any():
            sub = spl(pts[inside])
            idx = [slice(None)] * g.ndim
            idx[ax] = inside
            vals[tuple(idx)] = sub
        return vals

    return sample, ax


def gagliardo_increment(f: GridFunction, sigma, nodes: HNodes | None = None, axis="v") -> IncrementField:
    """(f(v+h) - f(v)) / |h|^sigma at every grid point and h-node."""
    ax, dx = _grid_v(f, axis)
    if nodes is None:
        width = f.axes[ax][-1] - f.axes[ax][0]
        nodes = HNodes.for_grid(dx, width)
    sample, ax = shift_sampler(f, ax)
    vals = np.empty(f.values.shape + (len(nodes.h),))
    for j, h in enumerate(nodes.h):
        vals[..., j] = (sample(h) - f.values) / abs(h) ** sigma
    return IncrementField(f, nodes, vals, sigma, ax)


def gagliardo_adjoint_div(F: IncrementField, sigma=None) -> GridFunction:
    """int (F(v,h) - F(v-h,h)) / |h|^{1+sigma} dh, d=1.

    Each node h is paired with -h before summation, so the odd part of the
    small-h expansion cancels at the node level.
    """
    if sigma is None:
        sigma = F.sigma
    base = F.base
    ax = F.axis
    nodes = F.nodes
    g = np.empty_like(F.values)
    for j, h in enumerate(nodes.h):
        Fj = base.with_values(F.values[..., j])
        sample, _ = shift_sampler(Fj, ax)
        g[..., j] = (F.values[..., j] - sample(-h)) / abs(h) ** sigma
    # pair +h with -h: symmetrise in the sign of h
    g = 0.5 * (g + g[..., ::-1])
    vals = nodes.integrate(g, inner_power=2 - 2 * sigma, outer_power=2 * sigma)
    return base.with_values(vals)


def eta_inner(F: IncrementField, G: IncrementField, inner_power=None, outer_power=None) -> float:
    """<F, G> in L^2(d eta dv) over the sampled base grid."""
    s = F.sigma
    if inner_power is None:
        inner_power = 2 - 2 * s
    if outer_power is None:
        outer_power = 2 * s
    prod = F.values * G.values
    per_point = F.nodes.integrate(prod, inner_power, outer_power)
    return float(np.sum(per_point) * F.base.cell_volume)


def _exterior_weight(g: GridFunction, k: float, axis="v"):
    """int over v outside the box of |v - u|^{-1-k} dv, for every grid point u (shaped to broadcast)."""
    ax, dx = _grid_v(g, axis)
    u = g.axes[ax]
    lo, hi = u[0] - dx / 2, u[-1] + dx / 2
    shape = [1] * g.ndim
    shape[ax] = len(u)
    return (((hi - u) ** (-k) + (u - lo) ** (-k)) / k).reshape(shape)


def exterior_seminorm(g: GridFunction, sigma, p=2.0, axis="v") -> float:
    """Part of int int |D^sigma g|^p d eta dv with v outside the sampled box (zero extension).

    There D^sigma g(v, h) = g(v + h) / |h|^sigma, and the v-integral over the
    two exterior half-lines is explicit."""
    w = _exterior_weight(g, sigma * p, axis)
    return float(np.sum(np.abs(g.values) ** p * w) * g.cell_volume)


def dsigma_l2_spectral(g: GridFunction, sigma, pad: int = 8, axis="v") -> float:
    """||D^sigma g||_{L^2(R)}^2 of the zero extension, from its transform on a padded grid."""
    ax, dx = _grid_v(g, axis)
    n = g.values.shape[ax] * pad
    ghat = sfft.fft(g.values, n=n, axis=ax) * dx
    xi = wavenumbers(n, dx)
    shape = [1] * g.ndim
    shape[ax] = n
    dxi = 2 * math.pi / (n * dx)
    other = g.cell_volume / dx
    return float(np.sum(np.abs(xi.reshape(shape)) ** (2 * sigma) * np.abs(ghat) ** 2) * dxi / (2 * math.pi) * other)


def frac_antidivergence(V: GridFunction, sigma, nodes: HNodes | None = None, axis="v",
                        cgag: float | None = None) -> IncrementField:
    """R V = (1/c_gag) increment quotient of (-Delta)^{-sigma} (div V)."""
    ax, dx = _grid_v(V, axis)
    vals = V.values
    edge = V.boundary_max(ax)
    if edge > 1e-8 * max(np.abs(vals).max(), 1e-300):
        raise ValueError("antidivergence needs V compactly supported in the velocity box")
    if cgag is None:
        cgag = c_gag(1, sigma)
    U = apply_multiplier(vals, dx, sym_odd(2 * sigma), ax)
    Ug = V.with_values(U / cgag)
    # the potential is not compactly supported: zero extension is only a
    # truncation, so callers pick boxes wide enough for the far tail
    Ug.compact = tuple(True for _ in V.compact)
    return gagliardo_increment(Ug, sigma, nodes, axis=ax)


def pv_fractional_p_laplacian(f: GridFunction, sigma, p, nodes: HNodes | None = None, axis="v",
                              grad_floor: float = 0.0) -> GridFunction:
    """PV int |f(v)-f(w)|^{p-2}(f(v)-f(w)) / |v-w|^{1+sigma p} dw, d=1."""
    ax, dx = _grid_v(f, axis)
    if p <= 2 / (2 - sigma) and grad_floor <= 0:
        raise ValueError("singular range p <= 2/(2-sigma) needs a gradient floor")
    if nodes is None:
        width = f.axes[ax][-1] - f.axes[ax][0]
        nodes = HNodes.for_grid(dx, width)
    sample, ax = shift_sampler(f, ax)
    g = np.empty(f.values.shape + (len(nodes.h),))
    for j, h in enumerate(nodes.h):
        diff = f.values - sample(h)
        g[..., j] = np.abs(diff) ** (p - 2) * diff / abs(h) ** (sigma * p)
    g = 0.5 * (g + g[..., ::-1])
    vals = nodes.integrate(g, inner_power=p * (1 - sigma), outer_power=sigma * p)
    if grad_floor > 0:
        grad = np.gradient(f.values, dx, axis=ax)
        vals = np.where(np.abs(grad) >= grad_floor, vals, np.nan)
    return f.with_values(vals)


def weak_p_laplacian_pairing(f: GridFunction, phi: GridFunction, sigma, p, nodes: HNodes | None = None,
                             axis="v") -> float:
    """(1/2) int int |Df|^{p-2} Df Dphi d eta dv."""
    Df = gagliardo_increment(f, sigma, nodes, axis)
    Dphi = gagliardo_increment(phi, sigma, Df.nodes, axis)
    a = np.abs(Df.values) ** (p - 2) * Df.values
    integrand = a * Dphi.values
    per_point = Df.nodes.integrate(integrand, inner_power=p * (1 - sigma), outer_power=sigma * p)
    # base points outside the box see only f(v + h) and phi(v + h)
    ext = np.abs(f.values) ** (p - 2) * f.values * phi.values * _exterior_weight(f, sigma * p, axis)
    return float(0.5 * (np.sum(per_point) + np.sum(ext)) * f.cell_volume)


def seminorm_N(F: IncrementField, s: float, sharp: bool = False) -> GridFunction:
    """N_s F(z) = (int |F(z,h)|^s d eta)^{1/s}; the sharp variant uses F(v-h, h)."""
    vals = np.abs(F.values) ** s
    if sharp:
        out = np.empty_like(vals)
        for j, h in enumerate(F.nodes.h):
            sample, _ = shift_sampler(F.base.with_values(vals[..., j]), F.axis)
            out[..., j] = sample(-h)
        vals = out
    s_ = F.sigma
    per = F.nodes.integrate(vals, inner_power=s * (1 - s_), outer_power=s * s_)
    return F.base.with_values(np.maximum(per, 0.0) ** (1.0 / s))


def increment_envelope_check(f: GridFunction, F: IncrementField, axis="v") -> float:
    """Largest violation ratio of the two-regime bound on |D^sigma f|; <= 1 means it holds."""
    ax, dx = _grid_v(f, axis)
    grad = np.abs(np.gradient(f.values, dx, axis=ax)).max()
    sup = np.abs(f.values).max()
    h = np.abs(F.nodes.h)
    bound = np.where(h <= 1, grad * h ** (1 - F.sigma) * 1.01 + 1e-14, 2 * sup * h ** (-F.sigma) + 1e-14)
    return float(np.max(np.abs(F.values) / bound))


# ---------------------------------------------------------------- exterior kernels

def exterior_dsigma(profile, grid, targets, sigma):
    """|xi|^sigma applied to a compact profile, evaluated outside its support.

    Uses the singular-integral kernel -c_bes |w-w'|^{-1-sigma}; exact there
    because the profile vanishes at the target.
    """
    dx = grid[1] - grid[0]
    diff = np.abs(np.asarray(targets)[:, None] - grid[None, :])
    return -c_bes(sigma) * (np.abs(diff) ** (-1 - sigma)) @ profile * dx


def exterior_odd(profile, grid, targets, mu):
    """Kernel C sign(w)|w|^{mu-1} (multiplier i sign(xi)|xi|^{-mu}) outside the support."""
    dx = grid[1] - grid[0]
    diff = np.asarray(targets)[:, None] - grid[None, :]
    k = odd_kernel_const(mu) * np.sign(diff) * np.abs(diff) ** (mu - 1)
    return k @ profile * dx


# ---------------------------------------------------------------- decay

def decay_slope(r, values, window=None):
    """Least-squares slope of log|g| against log r inside ``window``. Returns (slope, r2)."""
    r = np.asarray(r, float)
    g = np.abs(np.asarray(values, float))
    mask = r > 0
    if window is not None:
        mask &= (r >= window[0]) & (r <= window[1])
    if mask.sum() < 6:
        raise ValueError(f"need at least 6 samples in the window, got {int(mask.sum())}")
    if np.any(g[mask] <= 0):
        raise ValueError("samples must be strictly positive in the window")
    x, y = np.log(r[mask]), np.log(g[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(r2)


def smooth_bump(u):
    """exp(-1/(1-u^2)) on |u| < 1, zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = np.abs(u) < 1
    out[m] = np.exp(-1.0 / (1.0 - u[m] ** 2))
    return out


def decay_family(sigma: float, family: str, n: int = 2 ** 16, width: float = 4096.0,
                 window=(8.0, 128.0), n_samples: int = 25) -> dict:
    """Far-field decay of the test families on a wide padded grid.

    ``family``: "bessel" (|xi|^sigma of a bump), "riesz" (|xi|^{-sigma} of a
    mean-zero dipole), "potential-div" ((-Delta)^{-sigma} of the derivative of
    a bump field, with its gradient).
    """
    v = (np.arange(n) - n // 2) * (width / n)
    dv = v[1] - v[0]
    bump = smooth_bump(v)
    if family == "bessel":
        fields = {"D^sigma bump": (dsigma(bump, dv, sigma), -(1 + sigma))}
    elif family == "riesz":
        dip = smooth_bump(v - 1) - smooth_bump(v + 1)
        fields = {"I^sigma dipole": (isigma(dip, dv, sigma), -(2 - sigma))}
    elif family == "potential-div":
        U = apply_multiplier(bump, dv, sym_odd(2 * sigma))
        gU = spectral_gradient(U, dv)
        fields = {"U": (U, -(2 - 2 * sigma)), "grad U": (gU, -(3 - 2 * sigma))}
    else:
        raise ValueError(f"unknown family {family!r}")
    radii = np.geomspace(window[0], window[1], n_samples)
    out = {"family": family, "sigma": sigma, "radii": radii, "fields": {}}
    for name, (vals, expected) in fields.items():
        samp = np.interp(radii, v, vals)
        slope, r2 = decay_slope(radii, samp)
        out["fields"][name] = {"values": samp, "slope": slope, "r2": r2, "expected": expected}
    return out
