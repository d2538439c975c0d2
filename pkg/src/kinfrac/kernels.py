"""Mollifier profile, kinetic mollifier and the derived kernel families (d=1).

Every kernel at scale r is a power of r times a profile of the rescaled
variables (lam, ybar, eta) = (s / r^alpha, y / r^beta, w / r^(beta-alpha)).
The profiles depend on r only through theta = log r. Tailed kernels are built
slice by slice: for fixed (lam, ybar) the w-profile is transformed by FFT on a
wide padded grid and continued outside the support by the exact singular
integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import fft as sfft

from . import fracops
from .trajectories import A_inverse, frak_c, script_A_inverse, script_F


# ---------------------------------------------------------------- mollifier

def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = np.abs(u) < 1
    out[m] = np.exp(-1.0 / (1.0 - u[m] ** 2))
    return out


def _bump_d(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = np.abs(u) < 1
    um = u[m]
    out[m] = np.exp(-1.0 / (1.0 - um ** 2)) * (-2 * um / (1 - um ** 2) ** 2)
    return out


class Mollifier:
    """psi(m0, m1, m2) = tensor of exp(-1/(1-u^2)) bumps, unit integral.

    Time bump centred at ``t_center`` with radius ``t_radius`` (default the
    interval (-2,-1)); unit-interval bumps in m1 and m2.
    """

    def __init__(self, t_center: float = -1.5, t_radius: float = 0.5):
        self.t_center = t_center
        self.t_radius = t_radius
        z1, _ = integrate.quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), -1, 1, epsabs=1e-15, epsrel=1e-13)
        self.z1 = z1
        self.norm = 1.0 / (z1 * t_radius * z1 * z1)

    @property
    def t_support(self):
        return (self.t_center - self.t_radius, self.t_center + self.t_radius)

    def _ut(self, m0):
        return (np.asarray(m0, float) - self.t_center) / self.t_radius

    def __call__(self, m0, m1, m2):
        return self.norm * _bump(self._ut(m0)) * _bump(m1) * _bump(m2)

    def grad_m(self, m0, m1, m2):
        bt, b1, b2 = _bump(self._ut(m0)), _bump(m1), _bump(m2)
        g0 = self.norm * _bump_d(self._ut(m0)) / self.t_radius * b1 * b2
        g1 = self.norm * bt * _bump_d(m1) * b2
        g2 = self.norm * bt * b1 * _bump_d(m2)
        return g0, g1, g2

    def t_nodes(self, n: int):
        """Equispaced interior nodes and weights over the time support.

        The trapezoid rule converges faster than any power on these bumps."""
        lo, hi = self.t_support
        x = np.linspace(lo, hi, n + 2)[1:-1]
        return x, np.full(n, (hi - lo) / (n + 1))

    @staticmethod
    def m_nodes(n: int):
        x = np.linspace(-1, 1, n + 2)[1:-1]
        return x, np.full(n, 2.0 / (n + 1))

    def t_gauss_nodes(self, n: int):
        """Gauss nodes for the time bump; weights carry 1/bump so integrands keep psi."""
        u, w = bump_gauss(n)
        return self.t_center + self.t_radius * u, self.t_radius * w / _bump(u)

    @staticmethod
    def m_gauss_nodes(n: int):
        u, w = bump_gauss(n)
        return u, w / _bump(u)


DEFAULT_PSI = Mollifier()


_BUMP_GAUSS = {}


def bump_gauss(n: int, n_fine: int = 600):
    """Gauss rule for the weight exp(-1/(1-u^2)) on (-1, 1).

    Recurrence coefficients by the discretised Stieltjes procedure on a fine
    Gauss-Legendre measure, nodes and weights by Golub-Welsch."""
    if n in _BUMP_GAUSS:
        return _BUMP_GAUSS[n]
    from scipy.linalg import eigh_tridiagonal
    x, w = np.polynomial.legendre.leggauss(n_fine)
    w = w * _bump(x)
    a = np.zeros(n)
    b = np.zeros(n)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    norm_prev = 1.0
    for k in range(n):
        norm = np.sum(w * p * p)
        a[k] = np.sum(w * x * p * p) / norm
        b[k] = norm / norm_prev if k > 0 else norm
        p_next = (x - a[k]) * p - (b[k] if k > 0 else 0.0) * p_prev
        p_prev, p, norm_prev = p, p_next, norm
    nodes, vecs = eigh_tridiagonal(a, np.sqrt(b[1:]))
    weights = b[0] * vecs[0] ** 2
    _BUMP_GAUSS[n] = (nodes, weights)
    return nodes, weights


def homogeneous_dim(alpha, beta, d=1):
    return (2 * beta - alpha) * d + alpha


# ---------------------------------------------------------------- compact kernels, pointwise

def _pullback(r, s, y, w, alpha, beta):
    """(m0, m1, m2) with (s, y, w) the relative endpoint of gamma^m(r)."""
    s = np.asarray(s, float)
    m0 = s / r ** alpha
    safe = np.where(m0 == 0, 1.0, m0)
    inv = A_inverse(np.full(np.shape(s), float(r)), safe, alpha, beta)
    m1 = inv[..., 0, 0] * y + inv[..., 0, 1] * w
    m2 = inv[..., 1, 0] * y + inv[..., 1, 1] * w
    return np.where(m0 == 0, 10.0, m0), m1, m2


def eval_K(tau, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    Q = homogeneous_dim(alpha, beta)
    m0, m1, m2 = _pullback(tau, s, y, w, alpha, beta)
    return psi(m0, m1, m2) / (abs(frak_c(alpha, 1)) * tau ** Q)


def eval_H(r, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    return alpha * np.asarray(s, float) / r * eval_K(r, s, y, w, alpha, beta, psi)


def eval_B(r, s, y, w, alpha=1.0, beta=2.0):
    """B_r = F_{s/r^alpha}(r) A_{s/r^alpha}(r)^{-1}(y, w)."""
    from .trajectories import F_row
    m0, m1, m2 = _pullback(r, s, y, w, alpha, beta)
    f1, f2 = F_row(float(r), m0, alpha, beta)
    return f1 * m1 + f2 * m2


def eval_Theta(r, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    return eval_B(r, s, y, w, alpha, beta) * eval_K(r, s, y, w, alpha, beta, psi)


def eval_vecK(r, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    return -eval_Theta(r, s, y, w, alpha, beta, psi)


def eval_L(r, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    """L_r = -d/dw vecK_r = d/dw Theta_r, differentiated analytically."""
    from .trajectories import F_row
    Q = homogeneous_dim(alpha, beta)
    m0, m1, m2 = _pullback(r, s, y, w, alpha, beta)
    safe = np.where(np.abs(m0) > 0, m0, 1.0)
    inv = A_inverse(np.full(np.shape(m0), float(r)), safe, alpha, beta)
    dm1, dm2 = inv[..., 0, 1], inv[..., 1, 1]  # d m / d w
    f1, f2 = F_row(float(r), safe, alpha, beta)
    b = f1 * m1 + f2 * m2
    db = f1 * dm1 + f2 * dm2
    g0, g1, g2 = psi.grad_m(m0, m1, m2)
    dpsi = g1 * dm1 + g2 * dm2
    return (dpsi * b + psi(m0, m1, m2) * db) / (abs(frak_c(alpha, 1)) * r ** Q)


def support_box(r, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    """Bounding box of the support of K_r in (s, y, w)."""
    lo, hi = psi.t_support
    lam = np.linspace(lo, hi, 201)
    th = math.log(r)
    ymax = np.max(np.abs(np.sin(th)) + np.abs(lam * np.cos(th)))
    inv_rows = script_A_inverse(th, lam, alpha, beta)
    from .trajectories import script_A
    A = script_A(th, lam, alpha, beta)
    wmax = np.max(np.abs(A[:, 1, 0]) + np.abs(A[:, 1, 1]))
    del inv_rows
    return ((lo * r ** alpha, hi * r ** alpha), (-ymax * r ** beta, ymax * r ** beta),
            (-wmax * r ** (beta - alpha), wmax * r ** (beta - alpha)))


# frozen once from psi and the window 0 < alpha < beta: |ybar| <= |sin| + |lam cos| <= sqrt(1 + 4)
YBAR_RADIUS = math.sqrt(5.0) * 1.0001


def integrate_compact(func, r, n=(48, 96, 96), alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    """Tensor trapezoid quadrature of func(s,y,w) over the support box of K_r."""
    (s0, s1), (y0, y1), (w0, w1) = support_box(r, alpha, beta, psi)
    s = np.linspace(s0, s1, n[0] + 2)[1:-1]
    y = np.linspace(y0, y1, n[1] + 2)[1:-1]
    w = np.linspace(w0, w1, n[2] + 2)[1:-1]
    ds, dy, dw = (s1 - s0) / (n[0] + 1), (y1 - y0) / (n[1] + 1), (w1 - w0) / (n[2] + 1)
    S, Y, Wg = np.meshgrid(s, y, w, indexing="ij")
    return func(S, Y, Wg), (s, y, w), ds * dy * dw


def P_kernel(r, s, y, w, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    """r^{-Q} times the indicator of the (s, y) projection of the support, compact in w."""
    Q = homogeneous_dim(alpha, beta)
    lo, hi = psi.t_support
    lam = np.asarray(s, float) / r ** alpha
    ind = (lam > lo) & (lam < hi) & (np.abs(y) < YBAR_RADIUS * r ** beta)
    ind &= np.abs(w) < 2 * YBAR_RADIUS * r ** (beta - alpha) * (beta + 1) / alpha
    return np.where(ind, r ** (-Q), 0.0)


def Q_kernel(r, s, y, w, sigma, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI, d=1):
    """r^{-Q} 1_E(s, y) (1 + |w| / r^{beta-alpha})^{-d-1+sigma}."""
    Q = homogeneous_dim(alpha, beta)
    lo, hi = psi.t_support
    lam = np.asarray(s, float) / r ** alpha
    ind = (lam > lo) & (lam < hi) & (np.abs(y) < YBAR_RADIUS * r ** beta)
    tail = (1 + np.abs(w) / r ** (beta - alpha)) ** (-d - 1 + sigma)
    return np.where(ind, r ** (-Q) * tail, 0.0)


# ---------------------------------------------------------------- profile slices

KINDS_TAILED = ("G", "Gv", "U")
DECAY = {"G": lambda s: 1 + s, "Gv": lambda s: 2 - s, "U": lambda s: 2 - 2 * s}


def _interp_uniform(x0, dx, table, x):
    """Row-wise linear interpolation on uniform grids; table (n, m), x (n, k)."""
    pos = (x - x0[:, None]) / dx[:, None]
    m = table.shape[1]
    i = np.clip(np.floor(pos).astype(np.int64), 0, m - 2)
    f = np.clip(pos - i, 0.0, 1.0)
    a = np.take_along_axis(table, i, axis=1)
    b = np.take_along_axis(table, i + 1, axis=1)
    return a + f * (b - a)


@dataclass
class SliceBatch:
    """Rescaled w-profiles for a batch of (lam, ybar) at one scale r.

    Profiles (eta-units, no powers of r):
      phi   = psi(lam, scriptA^{-1}(ybar, eta))
      phib  = phi * b, b = scriptF . scriptA^{-1}(ybar, eta)
      dphib = d/d eta (phi * b)
      G     = |xi|^sigma phi                (Bessel source kernel)
      Gv    = i xi |xi|^{-sigma} phib       (Riesz potential of the derivative)
      U     = i xi |xi|^{-2 sigma} phib     (inverse fractional Laplacian of the derivative)
    """

    r: float
    lam: np.ndarray
    ybar: np.ndarray
    alpha: float
    beta: float
    sigma: float
    psi: Mollifier = DEFAULT_PSI
    n_support: int = 200
    n_fft: int = 2 ** 16
    keep: float = 6.0
    kinds: tuple = KINDS_TAILED

    def __post_init__(self):
        a, b, s = self.alpha, self.beta, self.sigma
        self.lam = np.atleast_1d(np.asarray(self.lam, float))
        self.ybar = np.atleast_1d(np.asarray(self.ybar, float))
        self.theta = math.log(self.r)
        n = len(self.lam)
        inv = script_A_inverse(self.theta, self.lam, a, b)
        self.c0 = np.stack([inv[:, 0, 0] * self.ybar, inv[:, 1, 0] * self.ybar], axis=1)
        self.c1 = np.stack([inv[:, 0, 1], inv[:, 1, 1]], axis=1)
        f1, f2 = script_F(self.theta, self.lam, a, b)
        self.f = np.stack(np.broadcast_arrays(f1, f2), axis=1)
        # support interval in eta: |c0_i + eta c1_i| < 1 for i = 1, 2
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
        for i in range(2):
            c0, c1 = self.c0[:, i], self.c1[:, i]
            c1 = np.where(c1 == 0, 1e-300, c1)
            e1 = (-1 - c0) / c1
            e2 = (1 - c0) / c1
            lo = np.maximum(lo, np.minimum(e1, e2))
            hi = np.minimum(hi, np.maximum(e1, e2))
        lt_lo, lt_hi = self.psi.t_support
        self.active = (hi > lo) & (self.lam > lt_lo) & (self.lam < lt_hi)
        center = np.where(self.active, 0.5 * (lo + hi), 0.0)
        length = np.where(self.active, hi - lo, 1.0)
        self.supp_lo, self.supp_hi = np.where(self.active, lo, 0.0), np.where(self.active, hi, 0.0)
        self.center, self.length = center, length
        self.delta = length / self.n_support
        self._build()

    # -- profile evaluation from the closed form of psi
    def _m(self, eta):
        m1 = self.c0[:, 0:1] + eta * self.c1[:, 0:1]
        m2 = self.c0[:, 1:2] + eta * self.c1[:, 1:2]
        return m1, m2

    def phi(self, eta):
        m1, m2 = self._m(eta)
        lam = np.broadcast_to(self.lam[:, None], m1.shape)
        return np.where(self.active[:, None], self.psi(lam, m1, m2), 0.0)

    def phib(self, eta):
        m1, m2 = self._m(eta)
        lam = np.broadcast_to(self.lam[:, None], m1.shape)
        b = self.f[:, 0:1] * m1 + self.f[:, 1:2] * m2
        return np.where(self.active[:, None], self.psi(lam, m1, m2) * b, 0.0)

    def dphib(self, eta):
        m1, m2 = self._m(eta)
        lam = np.broadcast_to(self.lam[:, None], m1.shape)
        b = self.f[:, 0:1] * m1 + self.f[:, 1:2] * m2
        db = self.f[:, 0:1] * self.c1[:, 0:1] + self.f[:, 1:2] * self.c1[:, 1:2]
        _, g1, g2 = self.psi.grad_m(lam, m1, m2)
        dphi = g1 * self.c1[:, 0:1] + g2 * self.c1[:, 1:2]
        val = dphi * b + self.psi(lam, m1, m2) * db
        return np.where(self.active[:, None], val, 0.0)

    def _build(self):
        s = self.sigma
        N = self.n_fft
        k = np.arange(N) - N // 2
        eta = self.center[:, None] + k[None, :] * self.delta[:, None]
        phi = self.phi(eta)
        phib = self.phib(eta)
        xi_unit = 2 * np.pi * sfft.fftfreq(N)  # xi * delta
        nz = xi_unit != 0
        self.core = {}
        self.ext = {}
        half = int(min(self.keep * self.n_support, N // 4))
        sl = slice(N // 2 - half, N // 2 + half + 1)
        self.core_x0 = self.center - half * self.delta
        src = {"G": phi, "Gv": phib, "U": phib}
        sup_grid = self.center[:, None] + (np.arange(self.n_support + 1) - self.n_support / 2)[None, :] * self.delta[:, None]
        sup_phi = self.phi(sup_grid)
        sup_phib = self.phib(sup_grid)
        for kind in self.kinds:
            if kind == "G":
                sym = np.zeros(N)
                sym[nz] = np.abs(xi_unit[nz]) ** s
                scale = self.delta ** (-s)
            elif kind == "Gv":
                sym = np.zeros(N, complex)
                sym[nz] = 1j * xi_unit[nz] * np.abs(xi_unit[nz]) ** (-s)
                scale = self.delta ** (s - 1)
            else:
                sym = np.zeros(N, complex)
                sym[nz] = 1j * xi_unit[nz] * np.abs(xi_unit[nz]) ** (-2 * s)
                scale = self.delta ** (2 * s - 1)
            data = np.fft.ifftshift(src[kind], axes=1)
            out = sfft.ifft(sfft.fft(data, axis=1) * sym[None, :], axis=1).real
            out = np.fft.fftshift(out, axes=1) * scale[:, None]
            self.core[kind] = out[:, sl]
            # exterior table in log distance from the centre, value * dist^decay
            kdec = DECAY[kind](s)
            d0 = half * self.delta * 0.95
            logd = np.linspace(0.0, math.log(1e8), 240)
            tabs = []
            for side in (+1, -1):
                targets = self.center[:, None] + side * d0[:, None] * np.exp(logd)[None, :]
                vals = np.empty_like(targets)
                for i in range(len(self.lam)):
                    if not self.active[i]:
                        vals[i] = 0.0
                        continue
                    if kind == "G":
                        vals[i] = fracops.exterior_dsigma(sup_phi[i], sup_grid[i], targets[i], s)
                    elif kind == "Gv":
                        vals[i] = fracops.exterior_odd(sup_phib[i], sup_grid[i], targets[i], s - 1)
                    else:
                        vals[i] = fracops.exterior_odd(sup_phib[i], sup_grid[i], targets[i], 2 * s - 1)
                dist = np.abs(targets - self.center[:, None])
                tabs.append(vals * dist ** kdec)
            self.ext[kind] = (d0, logd[1] - logd[0], tabs[0], tabs[1], kdec)
            self.core[kind] = self.core[kind] - self._image_sum(kind, N, half)
        self.core_half = half

    def _ext_eval(self, kind, rel):
        """Exterior continuation at offsets ``rel`` from the centres (beyond d0)."""
        d0, dlog, tab_p, tab_m, kdec = self.ext[kind]
        dist = np.abs(rel)
        u = np.log(np.maximum(dist, 1e-300) / d0[:, None])
        zeros = np.zeros(len(self.lam))
        vp = _interp_uniform(zeros, np.full(len(self.lam), dlog), tab_p, u)
        vm = _interp_uniform(zeros, np.full(len(self.lam), dlog), tab_m, u)
        dist = np.maximum(dist, d0[:, None])
        return np.where(rel > 0, vp, vm) / dist ** kdec

    def _image_sum(self, kind, N, half, n_img=48):
        """Periodic images seen by the FFT on the kept core window.

        Images sit in the exterior, where the continuation is exact; the
        remainder beyond n_img periods uses the tail amplitude and a Hurwitz zeta."""
        from scipy.special import zeta
        Lp = N * self.delta
        # the image sum is smooth on the window; evaluate coarsely and interpolate
        coarse = np.linspace(-half, half, 49)
        rel = coarse[None, :] * self.delta[:, None]
        tot = np.zeros_like(rel)
        for n in range(1, n_img + 1):
            tot += self._ext_eval(kind, rel + n * Lp[:, None]) + self._ext_eval(kind, rel - n * Lp[:, None])
        d0, dlog, tab_p, tab_m, kdec = self.ext[kind]
        if kdec > 1:
            amp = tab_p[:, -1] + tab_m[:, -1]
            tot += (amp * Lp ** (-kdec) * zeta(kdec, n_img + 1))[:, None]
        fine = np.arange(-half, half + 1)
        return np.array([np.interp(fine, coarse, row) for row in tot])

    def eval(self, kind, eta):
        """Profile ``kind`` at eta (shape (n_slices, M)); compact kinds from the closed form."""
        eta = np.asarray(eta, float)
        if eta.ndim == 1:
            eta = np.broadcast_to(eta, (len(self.lam), len(eta)))
        if kind == "phi":
            return self.phi(eta)
        if kind == "phib":
            return self.phib(eta)
        if kind == "dphib":
            return self.dphib(eta)
        out = _interp_uniform(self.core_x0, self.delta, self.core[kind], eta)
        d0 = self.ext[kind][0]
        rel = eta - self.center[:, None]
        far = np.abs(rel) > d0[:, None]
        if far.any():
            out = np.where(far, self._ext_eval(kind, rel), out)
        return np.where(self.active[:, None], out, 0.0)

    # -- physical kernels: powers of r times profiles
    def prefactor(self, kind):
        a, b, s, r = self.alpha, self.beta, self.sigma, self.r
        Q = homogeneous_dim(a, b)
        ic = 1.0 / abs(frak_c(a, 1))
        ba = b - a
        if kind == "K":
            return ic * r ** (-Q) * np.ones_like(self.lam)
        if kind == "H":
            return a * self.lam * r ** (a - 1) * ic * r ** (-Q)
        if kind == "Theta":
            return ic * r ** (-Q + ba - 1) * np.ones_like(self.lam)
        if kind == "L":
            return ic * r ** (-Q - 1) * np.ones_like(self.lam)
        if kind == "G":
            return -a * ic * r ** (a - 1 - Q - s * ba) * self.lam
        if kind == "Gv":
            return ic * r ** (-Q - 1 + s * ba) * np.ones_like(self.lam)
        if kind == "U":
            return ic * r ** (-Q - 1 + 2 * s * ba) * np.ones_like(self.lam)
        raise ValueError(kind)

    PROFILE_OF = {"K": "phi", "H": "phi", "Theta": "phib", "L": "dphib", "G": "G", "Gv": "Gv", "U": "U"}

    def physical(self, kind, w):
        """Kernel ``kind`` at physical w offsets (n_slices, M) on the slices' (s, y)."""
        eps = self.r ** (self.beta - self.alpha)
        prof = self.eval(self.PROFILE_OF[kind], np.asarray(w) / eps)
        return self.prefactor(kind)[:, None] * prof

    @property
    def s_values(self):
        return self.lam * self.r ** self.alpha

    @property
    def y_values(self):
        return self.ybar * self.r ** self.beta

    def core_interval_physical(self):
        eps = self.r ** (self.beta - self.alpha)
        return self.supp_lo * eps, self.supp_hi * eps


def slices_for_points(r, s, y, sigma, alpha=1.0, beta=2.0, **kw) -> SliceBatch:
    lam = np.asarray(s, float) / r ** alpha
    ybar = np.asarray(y, float) / r ** beta
    return SliceBatch(r, lam, ybar, alpha, beta, sigma, **kw)


def eval_bessel_kernels(r, sigma, s, y, w, alpha=1.0, beta=2.0, **kw):
    """(G_{r,sigma}, G^v_{r,sigma}) at arrays of points (s, y, w) of equal shape."""
    s, y, w = (np.atleast_1d(np.asarray(a, float)) for a in (s, y, w))
    sb = slices_for_points(r, s.ravel(), y.ravel(), sigma, alpha, beta, kinds=("G", "Gv"), **kw)
    wv = w.ravel()[:, None]
    return sb.physical("G", wv)[:, 0].reshape(s.shape), sb.physical("Gv", wv)[:, 0].reshape(s.shape)


def eval_gagliardo_kernels(r, sigma, s, y, w, h, alpha=1.0, beta=2.0, cgag=None, psi=DEFAULT_PSI, **kw):
    """(frakG, frakG^v) at points (s, y, w) and increment h (arrays of equal shape)."""
    s, y, w, h = (np.atleast_1d(np.asarray(a, float)) for a in (s, y, w, h))
    if np.any(h == 0):
        raise ValueError("increment h must be nonzero")
    if cgag is None:
        cgag = fracops.c_gag(1, sigma)
    H1 = eval_H(r, s, y, w + h, alpha, beta, psi)
    H0 = eval_H(r, s, y, w, alpha, beta, psi)
    fG = (H1 - H0) / np.abs(h) ** sigma
    sb = slices_for_points(r, s.ravel(), y.ravel(), sigma, alpha, beta, kinds=("U",), psi=psi, **kw)
    pts = np.stack([w.ravel(), (w + h).ravel()], axis=1)
    U = sb.physical("U", pts)
    fGv = ((U[:, 1] - U[:, 0]) / np.abs(h.ravel()) ** sigma / cgag).reshape(s.shape)
    return fG, fGv


# ---------------------------------------------------------------- norms

def _eta_nodes(sb: SliceBatch, far_factor=1e4, n_core=160, n_tail=160):
    """Common eta quadrature per slice: trapezoid over a core window and
    log-spaced nodes in each tail out to far_factor * length."""
    out_x, out_w = [], []
    for i in range(len(sb.lam)):
        c, ell = sb.center[i], sb.length[i]
        core = np.linspace(c - ell, c + ell, n_core + 1)
        wc = np.full(n_core + 1, 2 * ell / n_core)
        wc[[0, -1]] *= 0.5
        u = np.linspace(math.log(ell), math.log(far_factor * ell), n_tail + 1)
        du = u[1] - u[0]
        wt = np.full(n_tail + 1, du)
        wt[[0, -1]] *= 0.5
        d = np.exp(u)
        xs = np.concatenate([core, c + d, c - d])
        ws = np.concatenate([wc, wt * d, wt * d])
        out_x.append(xs)
        out_w.append(ws)
    return np.array(out_x), np.array(out_w), far_factor


def profile_norms(kind, r, sigma, thetas, alpha=1.0, beta=2.0, n_lam=16, n_y=24, psi=DEFAULT_PSI,
                  n_fft=2 ** 15):
    """||kernel_r||_{L^theta(ds dy dw)} for several theta from one set of profile samples, d=1."""
    lam, wl = psi.t_nodes(n_lam)
    yb = np.linspace(-YBAR_RADIUS, YBAR_RADIUS, n_y + 2)[1:-1]
    wy = np.full(n_y, 2 * YBAR_RADIUS / (n_y + 1))
    L, Y = np.meshgrid(lam, yb, indexing="ij")
    WL, WY = np.meshgrid(wl, wy, indexing="ij")
    kinds = (kind,) if kind in KINDS_TAILED else ()
    sb = SliceBatch(r, L.ravel(), Y.ravel(), alpha, beta, sigma, psi=psi, kinds=kinds, n_fft=n_fft)
    Q = homogeneous_dim(alpha, beta)
    ex, ew, far = _eta_nodes(sb)
    prof = np.abs(sb.eval(SliceBatch.PROFILE_OF[kind], ex))
    pre = np.abs(sb.prefactor(kind))
    wts = (WL * WY).ravel()
    out = []
    for theta in thetas:
        if np.isinf(theta):
            out.append(float(np.max(pre[:, None] * prof)))
            continue
        integ = np.sum(prof ** theta * ew, axis=1)
        if kind in KINDS_TAILED:
            # close the tails beyond far * length analytically with the known decay
            k = DECAY[kind](sigma) * theta
            if k > 1:
                n_tail = (ex.shape[1] - 161) // 2
                last_p = prof[:, 161 + n_tail - 1]
                last_m = prof[:, -1]
                dmax = far * sb.length
                integ = integ + (last_p ** theta + last_m ** theta) * dmax / (k - 1)
        total = np.sum(pre ** theta * integ * wts) * r ** Q
        out.append(float(total ** (1.0 / theta)))
    return out


def profile_norm(kind, r, sigma, theta, alpha=1.0, beta=2.0, **kw):
    return profile_norms(kind, r, sigma, (theta,), alpha, beta, **kw)[0]


def expected_norm_slope(kind, sigma, alpha, beta, theta, d=1):
    Q = homogeneous_dim(alpha, beta, d)
    inv = 0.0 if np.isinf(theta) else 1.0 / theta
    ba = beta - alpha
    if kind == "K":
        return -Q * (1 - inv)
    if kind == "L":
        return -1 - Q * (1 - inv)
    if kind == "Gv":
        return sigma * ba - 1 + Q * (inv - 1)
    if kind == "G":
        return alpha - sigma * ba - 1 + Q * (inv - 1)
    raise ValueError(kind)


def fit_slope(r, vals):
    slope, _ = np.polyfit(np.log(r), np.log(vals), 1)
    return float(slope)


def kernel_norm_scalings(kind, sigma, alpha, beta, thetas, r_grid=None, tol=0.05, **kw) -> list:
    """Fitted log-log slopes of r -> ||kernel_r||_theta, one result per theta."""
    if r_grid is None:
        r_grid = 2.0 ** np.arange(-6, 7)
    r_grid = np.asarray(r_grid, float)
    table = np.array([profile_norms(kind, r, sigma, thetas, alpha, beta, **kw) for r in r_grid])
    out = []
    for j, theta in enumerate(thetas):
        norms = table[:, j]
        slope = fit_slope(r_grid, norms)
        expected = expected_norm_slope(kind, sigma, alpha, beta, theta)
        out.append({"kind": kind, "theta": float(theta), "r": r_grid, "norms": norms, "slope": slope,
                    "expected": float(expected), "tolerance": tol, "pass": bool(abs(slope - expected) <= tol)})
    return out


def kernel_norm_scaling(kind, sigma, alpha, beta, theta, r_grid=None, tol=0.05, **kw) -> dict:
    return kernel_norm_scalings(kind, sigma, alpha, beta, (theta,), r_grid, tol, **kw)[0]


# ---------------------------------------------------------------- integrated kernels

def weak_quasinorm(values, weights, theta, n_levels=200):
    """sup_lambda lambda * |{|F| > lambda}|^{1/theta} from weighted samples."""
    a = np.abs(np.asarray(values, float)).ravel()
    w = np.broadcast_to(np.asarray(weights, float), np.shape(values)).ravel()
    order = np.argsort(a)[::-1]
    a, w = a[order], w[order]
    meas = np.cumsum(w)  # |{|F| >= a_k}|
    pos = a > 0
    if pos.sum() < 10:
        raise ValueError("too few exceedance levels to estimate the weak norm")
    vals = a[pos] * meas[pos] ** (1.0 / theta)
    return float(vals.max())


def integrated_kernel_samples(kind, sigma, alpha, beta, tau, n_s=36, n_y=16, n_eta=64, n_r=6,
                              octaves=12, psi=DEFAULT_PSI, n_fft=2 ** 13):
    """Samples of F_tau = int_0^tau kernel_r dr on a similarity grid with cell measures.

    s = -e^u log-spaced over ``octaves`` below 2 tau^alpha, y = ybar' |s|^{beta/alpha},
    w = eta' |s|^{(beta-alpha)/alpha}; eta' uses a core window and geometric tails.
    """
    lo_t, hi_t = psi.t_support
    smax = -lo_t * tau ** alpha
    u = np.linspace(math.log(smax) - octaves * math.log(2), math.log(smax), n_s + 1)
    uc = 0.5 * (u[1:] + u[:-1])
    du = u[1] - u[0]
    sabs = np.exp(uc)
    ybp = np.linspace(-YBAR_RADIUS, YBAR_RADIUS, n_y + 2)[1:-1]
    dyp = 2 * YBAR_RADIUS / (n_y + 1)
    core_e = 3.0 * (beta + 1) / alpha
    n_core = n_eta // 2
    ec = np.linspace(-core_e, core_e, n_core)
    dec = ec[1] - ec[0]
    n_t = (n_eta - n_core) // 2
    et = np.geomspace(core_e + dec, 1e4 * core_e, n_t + 1)
    etc = np.sqrt(et[1:] * et[:-1])
    det = np.diff(et)
    eta_p = np.concatenate([-etc[::-1], ec, etc])
    deta = np.concatenate([det[::-1], np.full(n_core, dec), det])
    vals = np.zeros((n_s, n_y, len(eta_p)))
    x_gl, w_gl = np.polynomial.legendre.leggauss(n_r)
    for i, sa in enumerate(sabs):
        # r with s / r^alpha in the time support: r^alpha in (sa/2, sa) for (-2,-1)
        r_lo = (sa / -lo_t) ** (1 / alpha)
        r_hi = min((sa / -hi_t) ** (1 / alpha), tau)
        if r_hi <= r_lo:
            continue
        lr = 0.5 * (x_gl + 1) * (math.log(r_hi) - math.log(r_lo)) + math.log(r_lo)
        wr = 0.5 * w_gl * (math.log(r_hi) - math.log(r_lo)) * np.exp(lr)
        yv = ybp * sa ** (beta / alpha)
        wv = eta_p * sa ** ((beta - alpha) / alpha)
        for lri, wri in zip(lr, wr):
            r = math.exp(lri)
            s_arr = np.full(n_y, -sa)
            sb = SliceBatch(r, s_arr / r ** alpha, yv / r ** beta, alpha, beta, sigma, psi=psi,
                            kinds=(kind,) if kind in KINDS_TAILED else (), n_fft=n_fft, n_support=96)
            vals[i] += wri * sb.physical(kind, np.broadcast_to(wv, (n_y, len(wv))))
    cell = (sabs * du)[:, None, None] * (sabs ** (beta / alpha) * dyp)[:, None, None] \
        * (sabs[:, None, None] ** ((beta - alpha) / alpha)) * deta[None, None, :]
    return vals, cell


def integrated_kernel_weak_norm(kind, sigma, alpha, beta, tau_grid=None, theta=None, ratio_tol=10.0,
                                **kw) -> dict:
    from fractions import Fraction
    from .exponents import kernel_indices
    if tau_grid is None:
        tau_grid = 2.0 ** np.arange(-3, 4)
    if theta is None:
        ki = kernel_indices(1, Fraction(sigma).limit_denominator(1000), Fraction(alpha).limit_denominator(1000),
                            Fraction(beta).limit_denominator(1000))
        theta = float(ki.theta1 if kind == "Gv" else ki.theta2)
    norms = []
    for tau in tau_grid:
        v, c = integrated_kernel_samples(kind, sigma, alpha, beta, tau, **kw)
        norms.append(weak_quasinorm(v, c, theta))
    norms = np.array(norms)
    ratio = float(norms.max() / norms.min())
    return {"kind": kind, "theta": float(theta), "tau": np.asarray(tau_grid, float), "weak_norms": norms,
            "ratio": ratio, "tolerance": ratio_tol, "pass": bool(ratio <= ratio_tol)}


# ---------------------------------------------------------------- structural checks

def mean_zero_L(r, alpha=1.0, beta=2.0, n_lam=6, n_y=9, n_gl=64, psi: Mollifier = DEFAULT_PSI):
    """max over (s, y) slices of |int L_r dw| / int |L_r| dw, by Gauss-Legendre on each slice's support."""
    lam, _ = psi.t_gauss_nodes(n_lam)
    yb = np.linspace(-YBAR_RADIUS, YBAR_RADIUS, n_y + 2)[1:-1]
    L, Y = (a.ravel() for a in np.meshgrid(lam, yb, indexing="ij"))
    sb = SliceBatch(r, L, Y, alpha, beta, 0.5, psi=psi, kinds=(), n_fft=2 ** 8)
    x, w = np.polynomial.legendre.leggauss(n_gl)
    half = 0.5 * (sb.supp_hi - sb.supp_lo)
    eta = sb.supp_lo[:, None] + half[:, None] * (x[None, :] + 1)
    vals = sb.dphib(eta) * half[:, None]
    num = np.abs(vals @ w)
    den = np.abs(vals) @ w
    act = sb.active & (den > 0)
    return float(np.max(num[act] / den[act]))


COMPACT = {"K": eval_K, "H": eval_H, "Theta": eval_Theta, "L": eval_L, "P": P_kernel}


def support_violation(kind, r, n=4000, seed=0, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI):
    """Largest |kernel| at random points outside the frozen support box, scaled by r^Q."""
    rng = np.random.default_rng(seed)
    (s0, s1), (y0, y1), (w0, w1) = support_box(r, alpha, beta, psi)
    if kind == "P":
        y1 = YBAR_RADIUS * r ** beta
        w1 = 2 * YBAR_RADIUS * r ** (beta - alpha) * (beta + 1) / alpha
        y0, w0 = -y1, -w1
    box = np.array([(s0, s1), (y0, y1), (w0, w1)])
    mid, rad = box.mean(axis=1), 0.5 * (box[:, 1] - box[:, 0])
    u = rng.uniform(-3, 3, (n, 3))
    out = np.any(np.abs(u) > 1, axis=1)
    pts = mid + u[out] * rad
    val = COMPACT[kind](r, pts[:, 0], pts[:, 1], pts[:, 2], alpha, beta, psi=psi)
    return float(np.max(np.abs(val)) * r ** homogeneous_dim(alpha, beta))


def profile_c1_norm(kind, r, alpha=1.0, beta=2.0, n=(24, 24, 200), psi: Mollifier = DEFAULT_PSI):
    """sup |profile| + sup |grad profile| of the rescaled H or Theta profile on a (lam, ybar, eta) lattice."""
    lo, hi = psi.t_support
    lam = np.linspace(lo, hi, n[0])
    yb = np.linspace(-YBAR_RADIUS, YBAR_RADIUS, n[1])
    eta_max = 2 * YBAR_RADIUS * (beta + 1) / alpha
    eta = np.linspace(-eta_max, eta_max, n[2])
    L, Y = (a.ravel() for a in np.meshgrid(lam, yb, indexing="ij"))
    sb = SliceBatch(r, L, Y, alpha, beta, 0.5, psi=psi, kinds=(), n_fft=2 ** 8)
    if kind == "H":
        prof = alpha * L[:, None] * sb.phi(eta[None, :])
    elif kind == "Theta":
        prof = sb.phib(eta[None, :])
    else:
        raise ValueError(kind)
    prof = prof.reshape(n[0], n[1], n[2])
    grads = np.gradient(prof, lam, yb, eta)
    return float(np.abs(prof).max() + max(np.abs(g).max() for g in grads))


def pq_bounds(r, sigma, alpha=1.0, beta=2.0, n=(40, 80), n_w=400, psi: Mollifier = DEFAULT_PSI):
    """L^1 and L^inf norms of P_r and Q_r by quadrature: midpoint in (s, y), log-graded in w for the tail."""
    lo, hi = psi.t_support
    ys = 1.05 * YBAR_RADIUS * r ** beta
    s = (lo + (hi - lo) * (np.arange(n[0]) + 0.5) / n[0]) * r ** alpha
    y = -ys + 2 * ys * (np.arange(n[1]) + 0.5) / n[1]
    eps = r ** (beta - alpha)
    # w = eps (e^u - 1): dense near 0, geometric in the tail, out to 1e8 eps
    u = np.linspace(0.0, math.log(1e8), n_w + 1)
    uc = 0.5 * (u[1:] + u[:-1])
    wpos = eps * np.expm1(uc)
    dwp = eps * np.exp(uc) * (u[1] - u[0])
    w = np.concatenate([-wpos[::-1], wpos])
    dw = np.concatenate([dwp[::-1], dwp])
    S, Y, Wg = np.meshgrid(s, y, w, indexing="ij")
    cell = (hi - lo) * r ** alpha / n[0] * 2 * ys / n[1] * dw[None, None, :]
    P = P_kernel(r, S, Y, Wg, alpha, beta, psi)
    Qv = Q_kernel(r, S, Y, Wg, sigma, alpha, beta, psi)
    k = 2 - sigma
    # Q's tail beyond the last node, exact for (1 + |w|/eps)^{-k}
    tail = 2 * eps * (1 + wpos[-1] / eps + dwp[-1] / (2 * eps)) ** (1 - k) / (k - 1)
    q_tail = float(np.sum(Qv[:, :, -1] / (1 + wpos[-1] / eps) ** (-k))) * (hi - lo) * r ** alpha / n[0] \
        * 2 * ys / n[1] * tail
    return {"P_l1": float(np.sum(P * cell)), "Q_l1": float(np.sum(Qv * cell) + q_tail),
            "P_linf": float(P.max()), "Q_linf": float(Qv.max())}


def _slice_grid(r, alpha, beta, n_lam, n_y, psi):
    lam, wl = psi.t_gauss_nodes(n_lam)
    yb, wy = np.polynomial.legendre.leggauss(n_y)
    L, Y = (a.ravel() for a in np.meshgrid(lam, YBAR_RADIUS * yb, indexing="ij"))
    W = (wl[:, None] * YBAR_RADIUS * wy[None, :]).ravel() * r ** (alpha + beta)
    return L, Y, W


def _h_quad(n=48, h_min=1e-4, h_max=1e3):
    """Nodes for d eta(h) = dh / |h| on both half-lines (log-trapezoid)."""
    u = np.linspace(math.log(h_min), math.log(h_max), n)
    w = np.full(n, u[1] - u[0])
    w[[0, -1]] *= 0.5
    h = np.exp(u)
    return np.concatenate([h, -h]), np.concatenate([w, w])


def domination_ratio(r, sigma, A, chi, points, p=2.0, alpha=1.0, beta=2.0, n_lam=4, n_y=8, n_w=320,
                     w_span=10.0, psi: Mollifier = DEFAULT_PSI):
    """|T^eta_{frakG^v_r} F| / (r^{sigma(beta-alpha)-1} (T_{Q_r} N_p F + T_{Q_r} N_p^# F)) for F = A(m) chi(h).

    Returns the ratio at each point; the domination bound needs it to stay below a constant uniform in r.
    """
    cg = fracops.c_gag(1, sigma)
    L, Y, Wsl = _slice_grid(r, alpha, beta, n_lam, n_y, psi)
    sb = SliceBatch(r, L, Y, alpha, beta, sigma, psi=psi, kinds=("U",))
    s_, y_ = sb.s_values, sb.y_values
    hh, wh = _h_quad()
    chi_h = chi(hh)
    wgrid = np.linspace(-w_span, w_span, n_w)
    dw = wgrid[1] - wgrid[0]
    # J(s, y, w) = int chi(h) frakG^v(s, y, w, h) d eta(h)
    U0 = sb.physical("U", np.broadcast_to(wgrid, (len(L), n_w)))
    J = np.zeros((len(L), n_w))
    for h, wt, c in zip(hh, wh, chi_h):
        U1 = sb.physical("U", np.broadcast_to(wgrid + h, (len(L), n_w)))
        J += wt * c * (U1 - U0) / abs(h) ** sigma / cg
    # Q_r on the same slices; the (s, y) indicator of Q_r covers the slices
    Qd = homogeneous_dim(alpha, beta)
    Qw = r ** (-Qd) * (1 + np.abs(wgrid) / r ** (beta - alpha)) ** (-2 + sigma)
    chi_p = (np.sum(wh * np.abs(chi_h) ** p)) ** (1 / p)

    def N_sharp(t, x, v):
        acc = 0.0
        for h, wt, c in zip(hh, wh, chi_h):
            acc = acc + wt * np.abs(A(t, x, v - h) * c) ** p
        return acc ** (1 / p)

    out = []
    for (t, x, v) in np.atleast_2d(points):
        T, X, V = t + s_[:, None], x + y_[:, None] + s_[:, None] * v, v + wgrid[None, :]
        Am = A(T, X, V)
        lhs = abs(np.sum(Wsl[:, None] * Am * J) * dw)
        n1 = np.abs(Am) * chi_p
        n2 = N_sharp(T, X, V)
        rhs = np.sum(Wsl[:, None] * (n1 + n2) * Qw[None, :]) * dw
        out.append(lhs / (r ** (sigma * (beta - alpha) - 1) * rhs))
    return np.array(out)
