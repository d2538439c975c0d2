"""Kinetic convolutions, manufactured structural pairs and representation residuals (d=1)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite_e
from scipy import fft as sfft

from . import fracops
from .kernels import (DEFAULT_PSI, Mollifier, SliceBatch, YBAR_RADIUS, eval_K, homogeneous_dim,
                      integrate_compact)
from .trajectories import A_matrix


# ---------------------------------------------------------------- 1-d profiles

def gauss_derivative(k: int, width: float = 1.0, amp: float = 1.0):
    """v -> amp * d^k/dv^k exp(-v^2 / (2 width^2))."""
    coef = np.zeros(k + 1)
    coef[k] = 1.0

    def f(v):
        u = np.asarray(v, float) / width
        # d^k/du^k e^{-u^2/2} = (-1)^k He_k(u) e^{-u^2/2}
        return amp * (-1) ** k * hermite_e.hermeval(u, coef) * np.exp(-0.5 * u * u) / width ** k

    return f


@dataclass
class Profile1D:
    """Tabulated function of one variable on a uniform grid, zero outside."""

    grid: np.ndarray
    values: np.ndarray
    window: tuple = None  # where the profile is not negligible

    def __post_init__(self):
        if self.window is None:
            a = np.abs(self.values)
            big = np.nonzero(a > 1e-9 * a.max())[0] if a.max() > 0 else np.array([0, len(a) - 1])
            self.window = (float(self.grid[big[0]]), float(self.grid[big[-1]]))

    def __call__(self, v):
        return np.interp(v, self.grid, self.values, left=0.0, right=0.0)

    @classmethod
    def from_callable(cls, func, half_width=200.0, n=2 ** 18, window=None):
        grid = np.linspace(-half_width, half_width, n, endpoint=False)
        return cls(grid, func(grid), window)

    @classmethod
    def from_multiplier(cls, func, symbol, half_width=200.0, n=2 ** 18, window=None):
        """Apply a Fourier multiplier to a decaying function sampled on a long grid."""
        grid = np.linspace(-half_width, half_width, n, endpoint=False)
        dx = grid[1] - grid[0]
        vals = func(grid)
        xi = 2 * np.pi * sfft.fftfreq(n, dx)
        out = sfft.ifft(sfft.fft(vals) * symbol(xi)).real
        return cls(grid, out, window)


def _sym_abs(s):
    def f(xi):
        out = np.zeros_like(xi)
        nz = xi != 0
        out[nz] = np.abs(xi[nz]) ** s
        return out
    return f


@dataclass
class SeparableField:
    """Finite sum of products a(t) b(x) P(v)."""

    terms: list
    v_window: tuple = (-8.0, 8.0)

    def __call__(self, t, x, v):
        t, x, v = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(v, float))
        out = np.zeros(t.shape)
        for a, b, P in self.terms:
            out += a(t) * b(x) * P(v)
        return out

    def to_grid(self, axes):
        from .grid import GridFunction
        return GridFunction.from_function(self, axes)

    @classmethod
    def zero(cls):
        z = lambda u: np.zeros(np.shape(u))
        return cls([(z, z, z)])


# ---------------------------------------------------------------- structural pairs

@dataclass
class StructuralPair:
    model: str
    sigma: float
    f: object
    source: object  # S0 field (bessel) or g field with S = D^sigma g (gagliardo)
    dsigma_f: object = None  # D^sigma_v f (bessel)
    meta: dict = field(default_factory=dict)
    structural_residual: float = 0.0


def _base_profiles(width_t=1.0, width_x=1.0, width_v=1.0, k=3):
    a = gauss_derivative(0, width_t)
    da = gauss_derivative(1, width_t)
    b = gauss_derivative(0, width_x)
    db = gauss_derivative(1, width_x)
    chi = gauss_derivative(k, width_v)
    return a, da, b, db, chi


def bessel_pair_from_f(sigma=0.5, widths=(1.0, 1.0, 1.0), k=3, shift=(0.0, 0.0)) -> StructuralPair:
    """f = a(t) b(x) chi(v) with chi a Gaussian derivative; S0 = I^sigma of the transport of f.

    (d_t + v d_x) f = a' b chi + a b' v chi, and both chi and v chi have
    vanishing mean, so S0 = a' b I^sigma chi + a b' I^sigma(v chi) is well defined.
    """
    t0, x0 = shift
    a0, da0, b0, db0, chi = _base_profiles(*widths, k=k)
    a = lambda t: a0(t - t0)
    da = lambda t: da0(t - t0)
    b = lambda x: b0(x - x0)
    db = lambda x: db0(x - x0)
    vchi = lambda v: v * chi(v)
    wv = widths[2]
    win = (-9 * wv, 9 * wv)
    chiP = Profile1D.from_callable(chi, window=win)
    I_chi = Profile1D.from_multiplier(chi, _sym_abs(-sigma), window=win)
    I_vchi = Profile1D.from_multiplier(vchi, _sym_abs(-sigma), window=win)
    D_chi = Profile1D.from_multiplier(chi, _sym_abs(sigma), window=win)
    f = SeparableField([(a, b, chiP)], win)
    S0 = SeparableField([(da, b, I_chi), (a, db, I_vchi)], win)
    Df = SeparableField([(a, b, D_chi)], win)
    meta = {"recipe": "separable f with Gaussian-derivative velocity profile; S0 by Riesz potential",
            "sigma": sigma, "widths": list(widths), "k": k}
    pair = StructuralPair("bessel", sigma, f, S0, Df, meta)
    pair.structural_residual = bessel_structure_residual(pair)
    return pair


def gagliardo_pair_from_f(sigma=0.5, widths=(1.0, 1.0, 1.0), k=3, shift=(0.0, 0.0), cgag=None) -> StructuralPair:
    """f = a b chi and g = -(1/c_gag)(-Delta_v)^{-sigma}(transport of f), so that
    D^{sigma,*} D^sigma g = -c_gag (-Delta)^sigma g = (d_t + v d_x) f."""
    if cgag is None:
        cgag = fracops.c_gag(1, sigma)
    t0, x0 = shift
    a0, da0, b0, db0, chi = _base_profiles(*widths, k=k)
    a = lambda t: a0(t - t0)
    da = lambda t: da0(t - t0)
    b = lambda x: b0(x - x0)
    db = lambda x: db0(x - x0)
    vchi = lambda v: v * chi(v)
    wv = widths[2]
    win = (-9 * wv, 9 * wv)
    chiP = Profile1D.from_callable(chi, window=win)
    # g decays only like |v|^{-2}; keep a wide window so the truncation stays below 1e-4
    gwin = (-150.0 * wv, 150.0 * wv)
    N_chi = Profile1D.from_multiplier(lambda v: -chi(v) / cgag, _sym_abs(-2 * sigma), window=gwin)
    N_vchi = Profile1D.from_multiplier(lambda v: -vchi(v) / cgag, _sym_abs(-2 * sigma), window=gwin)
    f = SeparableField([(a, b, chiP)], win)
    g = SeparableField([(da, b, N_chi), (a, db, N_vchi)], gwin)
    meta = {"recipe": "separable f; g from the inverse fractional Laplacian through the c_gag identity",
            "sigma": sigma, "c_gag": cgag, "widths": list(widths), "k": k}
    pair = StructuralPair("gagliardo", sigma, f, g, None, meta)
    pair.structural_residual = gagliardo_structure_residual(pair)
    return pair


def transport_fd(func, t, x, v, h=1e-3):
    """(d_t + v d_x) func by a fourth-order central difference along the characteristic."""
    def g(e):
        return func(t + e, x + e * v, v)
    return (8 * (g(h) - g(-h)) - (g(2 * h) - g(-2 * h))) / (12 * h)


def _sample_points(n, seed, box=((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))):
    rng = np.random.default_rng(seed)
    return np.array([rng.uniform(lo, hi, n) for lo, hi in box]).T


def bessel_structure_residual(pair: StructuralPair, n=20, seed=0) -> float:
    """max |(d_t+v d_x) f - D^sigma S0| / max|D^sigma S0| at random points, S0 transformed
    on a long velocity line by FFT at each (t, x)."""
    pts = _sample_points(n, seed)
    lhs = transport_fd(pair.f, pts[:, 0], pts[:, 1], pts[:, 2])
    grid = np.linspace(-200, 200, 2 ** 15, endpoint=False)
    dx = grid[1] - grid[0]
    rhs = np.empty(n)
    for i, (t, x, v) in enumerate(pts):
        line = pair.source(t, x, grid)
        D = fracops.dsigma(line, dx, pair.sigma, periodic=True)
        rhs[i] = np.interp(v, grid, D)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def adjoint_increment_at(g, pts, sigma, per_decade=24):
    """D^{sigma,*} D^sigma g = -P g at the points, P the second-difference layer in v."""
    pts = np.atleast_2d(pts)
    t, x, v = (pts[:, k:k + 1] for k in range(3))
    Pg, _ = second_difference_layer(lambda w: g(t, x, v + w), np.zeros((len(pts), 1)), sigma,
                                    per_decade=per_decade)
    return -Pg[:, 0]


def gagliardo_structure_residual(pair: StructuralPair, n=20, seed=0) -> float:
    """max |(d_t+v d_x) f - D^{sigma,*} D^sigma g| / max |transport| at random points (h-quadrature adjoint)."""
    pts = _sample_points(n, seed)
    lhs = transport_fd(pair.f, pts[:, 0], pts[:, 1], pts[:, 2])
    adj = adjoint_increment_at(pair.source, pts, pair.sigma)
    return float(np.max(np.abs(lhs - adj)) / max(np.max(np.abs(lhs)), 1e-300))


class CharacteristicField:
    """f(t,x,v) = int_{t_start}^t src(s, x - (t-s) v, v) ds by Gauss-Legendre."""

    def __init__(self, src, t_start, n_nodes=96):
        self.src = src
        self.t_start = t_start
        self.x_gl, self.w_gl = np.polynomial.legendre.leggauss(n_nodes)

    def __call__(self, t, x, v):
        t, x, v = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(v, float))
        if np.any(t <= self.t_start):
            raise ValueError("evaluation time precedes the start of the characteristic integral")
        half = 0.5 * (t - self.t_start)
        out = np.zeros(t.shape)
        for xg, wg in zip(self.x_gl, self.w_gl):
            s = self.t_start + half * (xg + 1)
            out += wg * half * self.src(s, x - (t - s) * v, v)
        return out


def manufacture_bessel(S0: SeparableField, sigma, t_start=-8.0, n_nodes=96) -> StructuralPair:
    """f by characteristics from D^sigma S0; D^sigma applied to each velocity profile."""
    terms = []
    for a, b, P in S0.terms:
        grid = getattr(P, "grid", None)
        if grid is None:
            Pp = Profile1D.from_callable(P)
        else:
            Pp = P
        DP = Profile1D.from_multiplier(lambda v, Pp=Pp: Pp(v), _sym_abs(sigma))
        terms.append((a, b, DP))
    src = SeparableField(terms, S0.v_window)
    f = CharacteristicField(src, t_start, n_nodes)
    pair = StructuralPair("bessel", sigma, f, S0, None, {"recipe": "characteristics of D^sigma S0",
                                                         "t_start": t_start, "nodes": n_nodes})
    pts = _sample_points(20, 1)
    lhs = transport_fd(f, pts[:, 0], pts[:, 1], pts[:, 2])
    rhs = src(pts[:, 0], pts[:, 1], pts[:, 2])
    scale = max(np.max(np.abs(rhs)), 1e-300)
    pair.structural_residual = float(np.max(np.abs(lhs - rhs)) / scale) if np.any(rhs) else float(np.max(np.abs(lhs)))
    pair.meta["transport_source"] = src
    return pair


def manufacture_gagliardo(g: SeparableField, sigma, t_start=-8.0, n_nodes=96, cgag=None) -> StructuralPair:
    """S = D^sigma g; f by characteristics from -c_gag (-Delta)^sigma g."""
    if cgag is None:
        cgag = fracops.c_gag(1, sigma)
    terms = []
    for a, b, P in g.terms:
        Pp = P if hasattr(P, "grid") else Profile1D.from_callable(P)
        LP = Profile1D.from_multiplier(lambda v, Pp=Pp: -cgag * Pp(v), _sym_abs(2 * sigma))
        terms.append((a, b, LP))
    src = SeparableField(terms, g.v_window)
    f = CharacteristicField(src, t_start, n_nodes)
    pair = StructuralPair("gagliardo", sigma, f, g, None, {"recipe": "characteristics of -c_gag (-Delta)^sigma g",
                                                           "c_gag": cgag})
    pts = _sample_points(20, 2)
    lhs = transport_fd(f, pts[:, 0], pts[:, 1], pts[:, 2])
    adj = adjoint_increment_at(g, pts, sigma)
    scale = max(np.max(np.abs(adj)), 1e-300)
    pair.structural_residual = float(np.max(np.abs(lhs - adj)) / scale) if np.any(adj) else float(np.max(np.abs(lhs)))
    return pair


# ---------------------------------------------------------------- quadrature layouts

def line_nodes(features, w_lo, w_hi, growth=0.5, n_gl=5, max_panels=4000):
    """Composite Gauss-Legendre nodes on [w_lo, w_hi].

    ``features`` is a list of (lo, hi, h): inside [lo, hi] panels have length h,
    outside, a panel whose near end is at distance d from a feature has
    length max(h, growth * d), so panels grow geometrically away from it.
    """
    if not growth > 0:
        raise ValueError("growth must be positive")
    def target(w):
        # size each panel by its distance to the feature at its near end
        best = np.inf
        for lo, hi, h in features:
            if w < lo:
                step = growth * (lo - w) / (1 + growth)
            else:
                step = growth * max(w - hi, 0.0)
            best = min(best, max(h, step))
        return best

    cuts = sorted({w_lo, w_hi, *[c for lo, hi, _ in features for c in (lo, hi) if w_lo < c < w_hi]})
    bps = [w_lo]
    for a, b in zip(cuts[:-1], cuts[1:]):
        w = a
        while w < b - 1e-14 * max(1.0, abs(b)):
            step = target(w)
            w = min(w + step, b)
            if b - w < 0.3 * step:
                w = b
            bps.append(w)
            if len(bps) > max_panels:
                raise RuntimeError("line quadrature exceeded its panel budget")
    bps = np.array(bps)
    xg, wg = np.polynomial.legendre.leggauss(n_gl)
    mid = 0.5 * (bps[1:] + bps[:-1])
    half = 0.5 * np.diff(bps)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def r_nodes(tau, breaks=(0.0, 1.0, 2.5, 5.0, 10.0), n_per=(6, 5, 4, 4)):
    """Gauss-Legendre in u = log(tau / r) on panels; returns r, weights (dr) and r_min."""
    xs, ws = [], []
    for (a, b), n in zip(zip(breaks[:-1], breaks[1:]), n_per):
        x, w = np.polynomial.legendre.leggauss(n)
        u = 0.5 * (b - a) * (x + 1) + a
        xs.append(u)
        ws.append(0.5 * (b - a) * w)
    u = np.concatenate(xs)
    w = np.concatenate(ws)
    r = tau * np.exp(-u)
    return r, w * r, tau * math.exp(-breaks[-1])


@dataclass
class QuadConfig:
    n_lam: int = 3
    n_y: int = 12
    r_breaks: tuple = (0.0, 0.4, 1.0, 2.0, 3.5, 6.0, 10.0)
    r_per: tuple = (4, 3, 3, 2, 2, 2)
    core_panels: int = 8
    data_h: float = 6.0
    growth: float = 1.2
    n_gl: int = 6
    n_gl_outer: int = 3
    w_max: float = 25.0
    h_per_decade: int = 16
    n_fft: int = 2 ** 16
    m_nodes: int = 12
    node_budget: int = 100_000


def slice_nodes(r, alpha, beta, n_lam, n_y, psi: Mollifier = DEFAULT_PSI):
    """(lam, ybar, weight) over the rescaled (s, y) support at scale r; weights in ds dy."""
    lam, wl = psi.t_gauss_nodes(n_lam)
    th = math.log(r)
    Y = np.abs(math.sin(th)) + np.abs(lam * math.cos(th))
    u = np.linspace(-1, 1, n_y + 2)[1:-1]
    L = np.repeat(lam, n_y)
    Yb = (Y[:, None] * u[None, :]).ravel()
    W = (wl[:, None] * (2 * Y[:, None] / (n_y + 1)) * np.ones(n_y)[None, :]).ravel()
    return L, Yb, W * r ** (alpha + beta)


# ---------------------------------------------------------------- convolutions

def mollify_trajectories(F, point, tau, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI, n=12, rule="gauss"):
    """T_{K_tau} F(z) = int F(gamma^m(tau; z)) psi(m) dm, tensor rule in m (bump-Gauss or trapezoid)."""
    t, x, v = point
    if rule == "gauss":
        m0, w0 = psi.t_gauss_nodes(n)
        m1, w1 = psi.m_gauss_nodes(n)
    else:
        m0, w0 = psi.t_nodes(n)
        m1, w1 = psi.m_nodes(n)
    M0, M1, M2 = np.meshgrid(m0, m1, m1, indexing="ij")
    W = w0[:, None, None] * w1[None, :, None] * w1[None, None, :]
    A = A_matrix(np.full(M0.shape, float(tau)), M0, alpha, beta)
    s = M0 * tau ** alpha
    y = A[..., 0, 0] * M1 + A[..., 0, 1] * M2
    w = A[..., 1, 0] * M1 + A[..., 1, 1] * M2
    vals = F(t + s, x + y + s * v, v + w)
    return float(np.sum(vals * psi(M0, M1, M2) * W))


def mollify_many(F, points, tau, alpha=1.0, beta=2.0, psi: Mollifier = DEFAULT_PSI, n=6, chunk=4096):
    """mollify_trajectories at many points; the displacements depend only on tau and m."""
    m0, w0 = psi.t_gauss_nodes(n)
    m1, w1 = psi.m_gauss_nodes(n)
    M0, M1, M2 = (a.ravel() for a in np.meshgrid(m0, m1, m1, indexing="ij"))
    W = (w0[:, None, None] * w1[None, :, None] * w1[None, None, :]).ravel() * psi(M0, M1, M2)
    A = A_matrix(np.full(M0.shape, float(tau)), M0, alpha, beta)
    s = M0 * tau ** alpha
    y = A[..., 0, 0] * M1 + A[..., 0, 1] * M2
    w = A[..., 1, 0] * M1 + A[..., 1, 1] * M2
    pts = np.atleast_2d(np.asarray(points, float))
    out = np.empty(len(pts))
    for i in range(0, len(pts), chunk):
        t, x, v = (c[:, None] for c in pts[i:i + chunk].T)
        out[i:i + chunk] = F(t + s, x + y + s * v, v + w) @ W
    return out


def kinetic_convolve(J, F, point, r=None, n=(48, 96, 96), alpha=1.0, beta=2.0, psi=DEFAULT_PSI, support_r=None):
    """T_J F(z) = int F(z o zeta) J(zeta) d zeta for a compact kernel J(s, y, w).

    ``support_r`` selects the support box of K_r used for the tensor quadrature.
    """
    t, x, v = point
    rr = support_r if support_r is not None else (r if r is not None else 1.0)
    vals, (s, y, w), dv = integrate_compact(
        lambda S, Y, W: J(S, Y, W) * F(t + S, x + Y + S * v, v + W), rr, n, alpha, beta, psi)
    return float(vals.sum() * dv)


def _w_features(sb: SliceBatch, v, data_window, cfg: QuadConfig):
    c_lo, c_hi = sb.core_interval_physical()
    act = sb.active
    lo, hi = float(np.min(c_lo[act])), float(np.max(c_hi[act]))
    core = (lo, hi, (hi - lo) / cfg.core_panels)
    data = (data_window[0] - v, data_window[1] - v, cfg.data_h)
    return core, data


def _rows(F, t, x, v, sb: SliceBatch, w):
    s = sb.s_values[:, None]
    y = sb.y_values[:, None]
    return F(t + s, x + y + s * v, v + w)


def _split_line(core, lo, hi, extra, cfg: QuadConfig):
    """Fine Gauss-Legendre panels on the core, coarser geometric panels outside it."""
    a, b, h = core
    parts = []
    ca, cb = max(a, lo), min(b, hi)
    if cb > ca:
        parts.append(line_nodes([(ca, cb, h)], ca, cb, cfg.growth, cfg.n_gl))
    for seg_lo, seg_hi in ((lo, min(ca, hi)), (max(cb, lo), hi)):
        if seg_hi > seg_lo:
            parts.append(line_nodes([core, *extra], seg_lo, seg_hi, cfg.growth, cfg.n_gl_outer))
    if not parts:
        return np.zeros(0), np.zeros(0)
    return np.concatenate([q[0] for q in parts]), np.concatenate([q[1] for q in parts])


def slice_line_nodes(sb: SliceBatch, lo, hi, extra, cfg: QuadConfig):
    """Per-slice w nodes on [lo, hi] resolving each slice's own support; rows padded with zero weight."""
    c_lo, c_hi = sb.core_interval_physical()
    rows = []
    for i in range(len(sb.lam)):
        if not sb.active[i]:
            rows.append((np.zeros(0), np.zeros(0)))
            continue
        core = (c_lo[i], c_hi[i], (c_hi[i] - c_lo[i]) / cfg.core_panels)
        rows.append(_split_line(core, lo, hi, extra, cfg))
    m = max(1, max(len(r[0]) for r in rows))
    W = np.zeros((len(rows), m))
    WW = np.zeros((len(rows), m))
    for i, (w, ww) in enumerate(rows):
        W[i, :len(w)] = w
        WW[i, :len(w)] = ww
    return W, WW, sum(len(r[0]) for r in rows)


def bessel_line_terms(pair: StructuralPair, sb: SliceBatch, weights, point, cfg: QuadConfig):
    """T_{G_r} S0 + T_{G^v_r} D^sigma f at one point for the slices in ``sb``; also node count."""
    t, x, v = point
    _, data = _w_features(sb, v, pair.f.v_window, cfg)
    # both data fields vanish outside their velocity window
    lo, hi = max(-cfg.w_max, data[0]), min(cfg.w_max, data[1])
    w, ww, count = slice_line_nodes(sb, lo, hi, [data], cfg)
    G = sb.physical("G", w)
    Gv = sb.physical("Gv", w)
    S0 = _rows(pair.source, t, x, v, sb, w)
    Df = _rows(pair.dsigma_f, t, x, v, sb, w)
    per = np.sum((G * S0 + Gv * Df) * ww, axis=1)
    return float(per @ weights), count


def _field_rows(F, t, x, v, sb: SliceBatch, w):
    s = sb.s_values.reshape((-1,) + (1,) * (np.ndim(w) - 1))
    y = sb.y_values.reshape(s.shape)
    return F(t + s, x + y + s * v, v + w)


def second_difference_layer(field, W, sigma, h_min=2e-2, h_max=2000.0, per_decade=8):
    """P F(w) = int_R (2F(w) - F(w+h) - F(w-h)) |h|^{-1-2 sigma} dh at every entry of W.

    ``field`` maps an array of w offsets to data values; positive h on a
    log grid, closed by h^{2-2 sigma} at zero and h^{-2 sigma} at infinity."""
    hp = fracops.HNodes.build(h_min, h_max, per_decade)
    n = hp.n_side
    h = hp.h[n:]
    wt = hp.weights[n:]
    F0 = field(W)
    out = np.zeros_like(F0)
    for k in range(len(h)):
        g = (2 * F0 - field(W + h[k]) - field(W - h[k])) * h[k] ** (-2 * sigma)
        out += wt[k] * g
        if k == 0:
            out += g / (2 - 2 * sigma)
        if k == len(h) - 1:
            out += g / (2 * sigma)
    return 2 * out, len(h)


def gagliardo_source_line(pair: StructuralPair, sb: SliceBatch, point, cfg: QuadConfig):
    """Per slice: int dw int d eta(h) [H(w+h) - H(w)] [g(v+w+h) - g(v+w)] = int_C H(w) P g(w) dw."""
    t, x, v = point
    act = sb.active
    c_lo, c_hi = sb.core_interval_physical()
    c_lo = np.where(act, c_lo, -1.0)
    c_hi = np.where(act, c_hi, 1.0)
    xg, wg = np.polynomial.legendre.leggauss(cfg.n_gl)
    edges = np.linspace(0.0, 1.0, cfg.core_panels + 1)
    half = np.diff(edges)[:, None] / 2
    u = (((edges[:-1] + edges[1:]) / 2)[:, None] + half * xg[None, :]).ravel()
    uw = (half * wg[None, :]).ravel()
    span = c_hi - c_lo
    Wc = c_lo[:, None] + span[:, None] * u[None, :]
    Wcw = span[:, None] * uw[None, :]
    Pg, nh = second_difference_layer(lambda w: _field_rows(pair.source, t, x, v, sb, w), Wc, pair.sigma,
                                     per_decade=cfg.h_per_decade)
    acc = np.sum(sb.physical("H", Wc) * Pg * Wcw, axis=1)
    return np.where(act, acc, 0.0), Wc.shape[1] * int(act.sum()), nh


def gagliardo_velocity_line(pair: StructuralPair, sb: SliceBatch, point, cfg: QuadConfig):
    """Per slice: int dw int d eta(h) [U(w+h) - U(w)] [f(v+w+h) - f(v+w)] = int_R U(w) P f(w) dw."""
    t, x, v = point
    s = pair.sigma
    D_lo, D_hi = pair.f.v_window[0] - v, pair.f.v_window[1] - v
    Wd, Wdw, count = slice_line_nodes(sb, -cfg.w_max, cfg.w_max, [(D_lo, D_hi, cfg.data_h)], cfg)
    Pf, nh = second_difference_layer(lambda w: _field_rows(pair.f, t, x, v, sb, w), Wd, s,
                                     per_decade=cfg.h_per_decade)
    U = sb.physical("U", Wd)
    acc = np.sum(U * Pf * Wdw, axis=1)
    # beyond w_max: U ~ |w|^{-(2-2 sigma)} and P f ~ |w|^{-1-2 sigma}
    k = 3.0
    for edge in (-cfg.w_max, cfg.w_max):
        We = np.full((len(sb.lam), 1), edge)
        Pe, _ = second_difference_layer(lambda w: _field_rows(pair.f, t, x, v, sb, w), We, s,
                                        per_decade=cfg.h_per_decade)
        acc += (sb.physical("U", We) * Pe)[:, 0] * cfg.w_max / (k - 1)
    return np.where(sb.active, acc, 0.0), count, nh


def gagliardo_line_terms(pair: StructuralPair, sb: SliceBatch, weights, point, cfg: QuadConfig, cgag):
    """T^eta_{frakG_r} S + T^eta_{frakG^v_r} D^sigma f at one point.

    Each increment pairing int int dK(w,h) dP(w,h) d eta is rearranged by Fubini
    into int K(w) (P applied to the data)(w) dw, where the h-layer only sees the
    smooth data and never the thin kernel cores.
    """
    a, na, nh = gagliardo_source_line(pair, sb, point, cfg)
    b, nb, _ = gagliardo_velocity_line(pair, sb, point, cfg)
    return float(a @ weights) + float(b @ weights) / cgag, na + nb, nh


@dataclass
class ResidualReport:
    model: str
    tau: float
    points: np.ndarray
    left: np.ndarray
    right: np.ndarray
    abs_residual: np.ndarray
    rel_residual: np.ndarray
    scale_floor: float
    nodes_per_point: int
    h_nodes: int
    structural_residual: float
    threshold: float
    node_budget: int = 0

    @property
    def max_rel(self):
        return float(np.max(self.rel_residual)) if len(self.rel_residual) else 0.0

    @property
    def within_budget(self):
        return self.node_budget <= 0 or self.nodes_per_point <= self.node_budget

    @property
    def passed(self):
        return bool(self.max_rel <= self.threshold and self.within_budget)

    def as_dict(self):
        return {"model": self.model, "tau": self.tau, "max_rel": self.max_rel, "threshold": self.threshold,
                "passed": self.passed, "nodes_per_point": self.nodes_per_point, "node_budget": self.node_budget,
                "h_nodes": self.h_nodes, "structural_residual": self.structural_residual,
                "scale_floor": self.scale_floor}


def representation_points(n=10, seed=0, box=((-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0))):
    """Random points in the middle third of the box along every axis."""
    mid = tuple((lo + (hi - lo) / 3, hi - (hi - lo) / 3) for lo, hi in box)
    return _sample_points(n, seed, mid)


def representation_residual(pair: StructuralPair, tau, points, alpha=1.0, beta=2.0, cfg: QuadConfig | None = None,
                            psi: Mollifier = DEFAULT_PSI, base_tol=None) -> ResidualReport:
    """f - T_{K_tau} f against the r-integrated single-scale convolutions."""
    cfg = cfg or QuadConfig()
    s = pair.sigma
    pts = np.atleast_2d(np.asarray(points, float))
    left = np.array([pair.f(*p) - mollify_trajectories(pair.f, p, tau, alpha, beta, psi, cfg.m_nodes) for p in pts])
    rs, wr, r_min = r_nodes(tau, cfg.r_breaks, cfg.r_per)
    right = np.zeros(len(pts))
    nodes = np.zeros(len(pts), dtype=np.int64)
    n_h = 0
    cgag = fracops.c_gag(1, s)
    vals_min = np.zeros(len(pts))
    kinds = ("G", "Gv") if pair.model == "bessel" else ("U",)
    for r, wgt in zip(rs, wr):
        L, Yb, W = slice_nodes(r, alpha, beta, cfg.n_lam, cfg.n_y, psi)
        sb = SliceBatch(r, L, Yb, alpha, beta, s, psi=psi, kinds=kinds, n_fft=cfg.n_fft)
        for i, p in enumerate(pts):
            if pair.model == "bessel":
                val, nn = bessel_line_terms(pair, sb, W, p, cfg)
            else:
                val, nn, n_h = gagliardo_line_terms(pair, sb, W, p, cfg, cgag)
            right[i] += wgt * val
            nodes[i] += nn
            if r == rs.min():
                vals_min[i] = val
    # the integrand stays bounded as r -> 0 (its envelope exponent is nonnegative here);
    # close (0, r_min) with the value at the smallest node
    right += r_min * vals_min
    floor = 1e-3 * max(np.max(np.abs(left)), 1e-300)
    absr = np.abs(left - right)
    rel = absr / np.maximum(np.abs(left), floor)
    if base_tol is None:
        base_tol = 1e-2 if pair.model == "bessel" else 2e-2
    return ResidualReport(pair.model, float(tau), pts, left, right, absr, rel, floor, int(nodes.max()), n_h,
                          pair.structural_residual, base_tol, cfg.node_budget)
