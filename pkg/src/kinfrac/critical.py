"""Synthetic kernel families and the weak-type bound for their scale integrals.

A family J_r = A r^{-1+mu} b_r with b_r the unit-mass profile supported on a
set of measure r^{mu+nu} has ||J_r||_1 = A r^{-1+mu} and, for the indicator
profile, ||J_r||_inf = A r^{-1-nu}. Integrating over r in (0, tau] lands in
weak L^theta with theta = (mu+nu)/nu, uniformly in tau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .grid import GridFunction


@dataclass(frozen=True)
class SyntheticFamily:
    mu: float
    nu: float
    A: float = 1.0
    profile: str = "indicator"  # or "bump": exp(-1/(1-u^2)) rescaled to unit mass

    def __post_init__(self):
        if self.mu <= 0 or self.nu <= 0 or self.A <= 0:
            raise ValueError("need mu, nu, A > 0")
        if self.profile not in ("indicator", "bump"):
            raise ValueError(f"unknown profile {self.profile!r}")

    @property
    def theta(self) -> float:
        return (self.mu + self.nu) / self.nu

    @property
    def lam(self) -> float:
        return self.mu / (self.mu + self.nu)

    def width(self, r):
        return np.asarray(r, float) ** (self.mu + self.nu)

    def _phi(self, u):
        """Unit-mass profile on |u| < 1/2."""
        u = np.asarray(u, float)
        if self.profile == "indicator":
            return (np.abs(u) < 0.5).astype(float)
        out = np.zeros_like(u)
        m = np.abs(u) < 0.5
        out[m] = np.exp(-1.0 / (1.0 - (2 * u[m]) ** 2))
        return out / _BUMP_MASS

    def __call__(self, r, x):
        """J_r(x), N = 1."""
        r = np.asarray(r, float)
        rho = self.width(r)
        return self.A * r ** (-1 + self.mu) * self._phi(np.asarray(x, float) / rho) / rho

    def l1(self, r):
        return self.A * np.asarray(r, float) ** (-1 + self.mu)

    def linf(self, r):
        peak = 1.0 if self.profile == "indicator" else math.exp(-1.0) / _BUMP_MASS
        return self.A * peak * np.asarray(r, float) ** (-1 - self.nu)


# mass of exp(-1/(1-(2u)^2)) over |u| < 1/2
_BUMP_MASS = 0.5 * 0.4439938161680794


def _r_lower(fam: SyntheticFamily, x):
    """Smallest r whose profile still reaches x: |x| < r^{mu+nu} / 2."""
    return (2 * np.abs(x)) ** (1.0 / (fam.mu + fam.nu))


def integrate_family(fam: SyntheticFamily, tau: float, grid, r_lo: float = 0.0, n_nodes: int = 64) -> GridFunction:
    """F(x) = int_{r_lo}^tau J_r(x) dr by Gauss-Legendre in log r.

    For each x the integrand vanishes below the radius where the support
    first reaches x, so the quadrature starts there and sees a smooth integrand.
    """
    x = np.asarray(grid, float)
    if tau <= 0:
        return GridFunction((x,), np.zeros_like(x), names=("x",))
    lo = np.maximum(_r_lower(fam, x), r_lo)
    hi = np.full_like(x, float(tau))
    live = lo < hi
    xg, wg = np.polynomial.legendre.leggauss(n_nodes)
    vals = np.zeros_like(x)
    with np.errstate(divide="ignore"):
        a = np.log(np.where(live, np.maximum(lo, 1e-300), 1.0))
    b = np.log(hi)
    half = 0.5 * (b - a)
    for xi, wi in zip(xg, wg):
        u = a + half * (xi + 1)
        r = np.exp(u)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            vals += np.where(live, wi * half * r * fam(r, x), 0.0)
    if r_lo == 0:
        vals = np.where(x == 0, np.inf, vals)  # the scale integral diverges at the centre
    return GridFunction((x,), vals, names=("x",))


def layer_integral(fam: SyntheticFamily, tau: float, x):
    """Closed form of F_tau for the indicator profile."""
    if fam.profile != "indicator":
        raise ValueError("closed form only for the indicator profile")
    r0 = _r_lower(fam, x)
    with np.errstate(divide="ignore"):
        val = fam.A * (r0 ** (-fam.nu) - tau ** (-fam.nu)) / fam.nu
    return np.where(r0 < tau, val, 0.0)


def family_grid(fam: SyntheticFamily, tau: float, n: int = 2 ** 16):
    """Uniform cell centres covering the support of F_tau (x = 0 is never a centre)."""
    R = 0.5 * tau ** (fam.mu + fam.nu)
    dx = 2 * R / n
    x = -R + dx * (np.arange(n) + 0.5)
    return x, np.full(n, dx)


def weak_norm_samples(values, cell, theta, min_levels: int = 10) -> float:
    """sup_lambda lambda |{|F| > lambda}|^{1/theta}, measure counted cellwise."""
    if theta <= 1:
        raise ValueError("weak norm needs theta > 1")
    a = np.abs(np.asarray(values, float)).ravel()
    w = np.broadcast_to(np.asarray(cell, float), np.shape(values)).ravel()
    order = np.argsort(a)[::-1]
    a, w = a[order], w[order]
    meas = np.cumsum(w)
    # levels just below each distinct value: the set {|F| > lambda} includes it
    keep = np.r_[a[1:] != a[:-1], True] & (a > 0)
    if keep.sum() < min_levels:
        raise ValueError(f"only {int(keep.sum())} exceedance levels resolvable, need {min_levels}")
    return float(np.max(a[keep] * meas[keep] ** (1.0 / theta)))


def weak_norm(F: GridFunction, theta: float) -> float:
    return weak_norm_samples(F.values, F.cell_volume, theta)


def k_functional_split(fam: SyntheticFamily, tau: float, s: float, n: int = 2 ** 14):
    """||F_1||_1 + s ||F_2||_inf with F_1 = int_0^delta, F_2 = int_delta^tau, delta = min(tau, s^{1/(mu+nu)}).

    J_r >= 0, so ||F_1||_1 = int_0^delta ||J_r||_1 dr exactly; summing F_1 on
    cells would miss the mass of its integrable spike at the centre."""
    delta = min(tau, s ** (1.0 / (fam.mu + fam.nu)))
    l1 = float(integrate.quad(lambda r: float(fam.l1(r)), 0.0, delta, limit=200)[0])
    if delta >= tau:
        return l1
    x2, _ = family_grid(fam, tau, n)
    # both profiles peak at the centre, which is not a cell centre
    F2 = integrate_family(fam, tau, x2, r_lo=delta)
    F2c = integrate_family(fam, tau, np.zeros(1), r_lo=delta)
    return l1 + s * float(max(np.max(np.abs(F2.values)), abs(F2c.values[0])))


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def verify_uniformity(fam: SyntheticFamily, tau_grid=None, theta=None, ratio_tol: float = 10.0,
                      slope_tol: float = 0.05, s_grid=None, k_tau: float = 8.0, k_tol: float = 0.05,
                      n: int = 2 ** 16) -> dict:
    """Weak norms of F_tau over dyadic tau and the K-functional slope.

    Uniform means max/min <= ratio_tol and a fitted log-tau slope within
    slope_tol of zero; the slope separates slow power growth that a bounded
    ratio over a few octaves cannot."""
    if tau_grid is None:
        tau_grid = 2.0 ** np.arange(-3, 4)
    tau_grid = np.asarray(tau_grid, float)
    if np.log2(tau_grid.max() / tau_grid.min()) < 6 - 1e-12:
        raise ValueError("tau grid must span at least 6 octaves")
    th = fam.theta if theta is None else float(theta)
    norms = []
    for tau in tau_grid:
        x, w = family_grid(fam, tau, n)
        F = integrate_family(fam, tau, x)
        norms.append(weak_norm_samples(F.values, w, th))
    norms = np.array(norms)
    ratio = float(norms.max() / norms.min())
    tslope = _slope(tau_grid, norms)
    uniform = bool(ratio <= ratio_tol and abs(tslope) <= slope_tol)
    if s_grid is None:
        # keep delta <= tau/4: the finite-tau remainder -s tau^{-nu}/nu bends the slope below lam
        s_grid = np.geomspace(1e-3, (k_tau / 4) ** (fam.mu + fam.nu), 16)
    K = np.array([k_functional_split(fam, k_tau, s) for s in s_grid])
    kslope = _slope(s_grid, K)
    bound = fam.A * s_grid ** fam.lam * (1 / fam.mu + 1 / fam.nu)
    return {"mu": fam.mu, "nu": fam.nu, "theta": th, "tau": tau_grid, "weak_norms": norms, "ratio": ratio,
            "tau_slope": tslope, "uniform": uniform, "s": np.asarray(s_grid), "K": K, "k_slope": kslope,
            "k_expected": fam.lam, "k_pass": bool(abs(kslope - fam.lam) <= k_tol),
            "k_bound_ok": bool(np.all(K <= bound * (1 + 1e-9)))}
