"""Fractional Kolmogorov equation at p = 2 solved along Fourier characteristics.

    d_t f + v d_x f = -c (-Delta_v)^sigma f,   d = 1.

With f_hat(t, k, xi) the transform in (x, v), the equation reads
d_t f_hat - k d_xi f_hat = -c |xi|^{2 sigma} f_hat, whose characteristics are
xi + k t = const. Hence

    f_hat(t, k, xi) = f0_hat(k, xi + k t) exp(-c int_0^t |xi + k (t - s)|^{2 sigma} ds).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .grid import GridFunction


class BandwidthError(ValueError):
    pass


def damping_exponent(t, k, xi, sigma, c=1.0):
    """c int_0^t |xi + k(t-s)|^{2 sigma} ds in closed form."""
    t, k, xi = np.broadcast_arrays(np.asarray(t, float), np.asarray(k, float), np.asarray(xi, float))
    e = 2 * sigma + 1

    def G(u):
        return np.sign(u) * np.abs(u) ** e / e

    small = np.abs(k * t) < 1e-12 * (1 + np.abs(xi))
    ks = np.where(small, 1.0, k)
    out = np.where(small, t * np.abs(xi) ** (2 * sigma), (G(xi + ks * t) - G(xi)) / ks)
    return c * out


def damping_exponent_quad(t, k, xi, sigma, c=1.0, n=200):
    """Same integral by Gauss-Legendre, split where the integrand has its kink."""
    xg, wg = np.polynomial.legendre.leggauss(n)
    total = 0.0
    cuts = [0.0, t]
    if k != 0:
        s0 = t + xi / k  # where xi + k(t-s) = 0
        if 0 < s0 < t:
            cuts = [0.0, s0, t]
    for a, b in zip(cuts[:-1], cuts[1:]):
        s = 0.5 * (b - a) * (xg + 1) + a
        total += 0.5 * (b - a) * np.sum(wg * np.abs(xi + k * (t - s)) ** (2 * sigma))
    return c * total


def gaussian_f0_hat(width_x=1.0, width_v=1.0, shift_v=0.0):
    """Transform of exp(-x^2/(2wx^2) - (v-v0)^2/(2wv^2)), convention int e^{-i(kx+xi v)} f."""
    def f0(k, xi):
        k, xi = np.asarray(k, float), np.asarray(xi, float)
        return (2 * np.pi * width_x * width_v * np.exp(-0.5 * (width_x * k) ** 2 - 0.5 * (width_v * xi) ** 2)
                * np.exp(-1j * xi * shift_v))
    return f0


@dataclass
class KolmogorovOracle:
    sigma: float
    f0_hat: object
    c: float = 1.0

    def f_hat(self, t, k, xi):
        t, k, xi = np.broadcast_arrays(np.asarray(t, float), np.asarray(k, float), np.asarray(xi, float))
        return self.f0_hat(k, xi + k * t) * np.exp(-damping_exponent(t, k, xi, self.sigma, self.c))

    def pde_residual(self, t, k, xi, h=1e-3):
        """max |d_t f_hat - k d_xi f_hat + c|xi|^{2 sigma} f_hat| / max |f_hat|, fourth-order differences.

        f_hat is only C^1 across xi = 0 and xi + k t = 0, so modes whose stencil
        straddles those lines are left out."""
        t, k, xi = np.broadcast_arrays(np.asarray(t, float), np.asarray(k, float), np.asarray(xi, float))

        def d(fun, e):
            return (8 * (fun(e) - fun(-e)) - (fun(2 * e) - fun(-2 * e))) / (12 * e)
        ft = d(lambda e: self.f_hat(t + e, k, xi), h)
        fx = d(lambda e: self.f_hat(t, k, xi + e), h)
        val = self.f_hat(t, k, xi)
        res = ft - k * fx + self.c * np.abs(xi) ** (2 * self.sigma) * val
        gap = 3 * h * (1 + np.abs(k))
        ok = (np.abs(xi) > gap) & (np.abs(xi + k * t) > gap)
        if not ok.any():
            raise ValueError("every sampled mode sits on a kink line")
        return float(np.max(np.abs(res[ok])) / max(np.max(np.abs(val)), 1e-300))

    def lattice(self, nx, nv, Lx, Lv):
        x = -Lx / 2 + Lx * np.arange(nx) / nx
        v = -Lv / 2 + Lv * np.arange(nv) / nv
        k = 2 * np.pi * sfft.fftfreq(nx, Lx / nx)
        xi = 2 * np.pi * sfft.fftfreq(nv, Lv / nv)
        return x, v, k, xi

    def spectrum(self, t, k, xi, guard=1e-8):
        K, X = np.meshgrid(k, xi, indexing="ij")
        F = self.f_hat(t, K, X)
        peak = np.abs(F).max()
        edge = max(np.abs(F[np.argmax(np.abs(k)), :]).max(), np.abs(F[:, np.argmax(np.abs(xi))]).max())
        if peak > 0 and edge > guard * peak:
            raise BandwidthError(f"spectrum at t={t:g} reaches the lattice edge ({edge / peak:.2e} of peak)")
        return F

    def physical(self, t, x, v, k, xi):
        """f(t, x, v) on the periodic lattice from the transform."""
        F = self.spectrum(t, k, xi)
        nx, nv = len(x), len(v)
        dx, dv = x[1] - x[0], v[1] - v[0]
        # f_hat ~ dx dv sum f e^{-i(kx+xi v)}; undo the offset of the first sample
        phase = np.exp(1j * (k[:, None] * x[0] + xi[None, :] * v[0]))
        vals = sfft.ifft2(F * phase) / (dx * dv)
        return vals.real

    def solve(self, t_grid, nx=256, nv=256, Lx=64.0, Lv=32.0) -> GridFunction:
        x, v, k, xi = self.lattice(nx, nv, Lx, Lv)
        vals = np.stack([self.physical(t, x, v, k, xi) for t in t_grid])
        return GridFunction((np.asarray(t_grid, float), x, v), vals)

    def energy(self, t_grid, nx=256, nv=256, Lx=64.0, Lv=32.0):
        """||f(t)||_{L^2(dx dv)} by Plancherel on the lattice."""
        _, _, k, xi = self.lattice(nx, nv, Lx, Lv)
        dk, dxi = 2 * np.pi / Lx, 2 * np.pi / Lv
        out = []
        for t in t_grid:
            F = self.spectrum(t, k, xi)
            out.append(np.sqrt(np.sum(np.abs(F) ** 2) * dk * dxi) / (2 * np.pi))
        return np.array(out)

    def dsigma_l2(self, t_grid, nx=256, nv=256, Lx=64.0, Lv=32.0):
        """||D^sigma_v f||_{L^2(dt dx dv)} over the sampled times (trapezoid in t)."""
        _, _, k, xi = self.lattice(nx, nv, Lx, Lv)
        dk, dxi = 2 * np.pi / Lx, 2 * np.pi / Lv
        per = []
        for t in t_grid:
            F = self.spectrum(t, k, xi)
            per.append(np.sum(np.abs(xi)[None, :] ** (2 * self.sigma) * np.abs(F) ** 2) * dk * dxi / (2 * np.pi) ** 2)
        return float(np.sqrt(np.trapezoid(per, t_grid)))


def kolmogorov_oracle(sigma, f0_hat, t_grid, c=1.0, **lattice) -> GridFunction:
    return KolmogorovOracle(sigma, f0_hat, c).solve(t_grid, **lattice)
