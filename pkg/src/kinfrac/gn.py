"""Gagliardo-Nirenberg ratios, scale invariance and the large-tau suppression of T_{K_tau}.

Norms of separable fields are taken on tensor lattices scaled with the field's
own widths; the trapezoid rule with vanishing end values is spectrally
accurate for the Gaussian factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fracops
from .exponents import ExponentContext, balance_exponents, gain_exponent_q
from .kernels import DEFAULT_PSI, Mollifier, homogeneous_dim
from .kolmogorov import KolmogorovOracle
from .representation import SeparableField, StructuralPair, bessel_pair_from_f, mollify_many


@dataclass
class GNResult:
    lhs: float
    rhs_v: float
    rhs_s: float
    ratio: float
    trivial: bool = False
    norms: dict = field(default_factory=dict)

    @property
    def finite(self):
        return self.trivial or bool(np.isfinite(self.ratio))

    def as_tuple(self):
        return self.lhs, self.rhs_v, self.rhs_s, self.ratio

    def as_dict(self):
        return {"lhs": self.lhs, "rhs_v": self.rhs_v, "rhs_s": self.rhs_s, "ratio": self.ratio,
                "trivial": self.trivial, "finite": self.finite, **self.norms}


class NormDivergence(ArithmeticError):
    pass


def _exps(ctx: ExponentContext):
    ex = balance_exponents(ctx)
    return float(gain_exponent_q(ctx)), float(ex.a_exp), float(ex.b_exp)


def _assemble(nf, nd, ns, ctx: ExponentContext, extra=None) -> GNResult:
    q, a, b = _exps(ctx)
    norms = {"norm_f_q": nf, "norm_dsigma_p": nd, "norm_source_pconj": ns, "q": q, "a_exp": a, "b_exp": b}
    norms.update(extra or {})
    if nf == 0 and nd == 0 and ns == 0:
        return GNResult(0.0, 0.0, 0.0, 0.0, True, norms)
    rhs_v, rhs_s = nd ** a, ns ** b
    if not all(np.isfinite([nf, nd, ns])):
        raise NormDivergence("a norm in the GN ratio diverged")
    ratio = nf / (rhs_v * rhs_s) if rhs_v * rhs_s > 0 else math.inf
    return GNResult(nf, rhs_v, rhs_s, ratio, False, norms)


# ---------------------------------------------------------------- tensor norms

def tensor_norm(fld: SeparableField, axes, p: float, chunk: int = 8) -> float:
    """||fld||_p on the lattice ``axes`` with the trapezoid weights, built from 1-d factors."""
    t, x, v = (np.asarray(a, float) for a in axes)
    wts = [np.full(len(a), a[1] - a[0]) for a in (t, x, v)]
    for w in wts:
        w[0] *= 0.5
        w[-1] *= 0.5
    facs = [(A(t), B(x), P(v)) for A, B, P in fld.terms]
    total = 0.0
    wxv = wts[1][:, None] * wts[2][None, :]
    for i0 in range(0, len(t), chunk):
        sl = slice(i0, i0 + chunk)
        blk = np.zeros((len(t[sl]), len(x), len(v)))
        for A, B, P in facs:
            blk += A[sl, None, None] * np.multiply.outer(B, P)[None]
        total += float(np.sum(wts[0][sl, None, None] * wxv[None] * np.abs(blk) ** p))
    return total ** (1.0 / p)


def pair_axes(widths, n=(97, 97, 721), spans=(12.0, 12.0, 45.0)):
    """Lattice scaled with the (t, x, v) widths of a separable pair."""
    return tuple(np.linspace(-s * w, s * w, k) for s, w, k in zip(spans, widths, n))


def gn_ratio_bessel(pair: StructuralPair, ctx: ExponentContext, axes=None) -> GNResult:
    """||f||_q / (||D^sigma f||_p^a ||S0||_{p'}^b) for a separable Bessel pair."""
    if pair.model != "bessel":
        raise ValueError("needs a Bessel pair")
    q, _, _ = _exps(ctx)
    p, pc = float(ctx.p), float(ctx.p_conj)
    if axes is None:
        axes = pair_axes(pair.meta.get("widths", (1.0, 1.0, 1.0)))
    nf = tensor_norm(pair.f, axes, q)
    nd = tensor_norm(pair.dsigma_f, axes, p)
    ns = tensor_norm(pair.source, axes, pc)
    return _assemble(nf, nd, ns, ctx)


def zero_bessel_pair(sigma=0.5) -> StructuralPair:
    z = SeparableField.zero()
    return StructuralPair("bessel", sigma, z, z, z, {"recipe": "zero"})


def scaled_bessel_pair(lam=1.0, nu=1.0, sigma=0.5, p=2.0, widths=(1.0, 1.0, 1.0), k=3) -> StructuralPair:
    """Pair built from f(lam^{sp} nu t, lam^{sp+1} nu x, lam v); the source follows from the equation."""
    sp = sigma * p
    wt, wx, wv = widths
    return bessel_pair_from_f(sigma, (wt / (lam ** sp * nu), wx / (lam ** (sp + 1) * nu), wv / lam), k=k)


def bessel_family(n=5, sigma=0.5, seed=0):
    """Manufactured Bessel pairs with random widths and velocity profiles."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        widths = tuple(float(w) for w in rng.uniform(0.6, 1.6, 3))
        out.append(bessel_pair_from_f(sigma, widths, k=int(rng.choice([2, 3, 4]))))
    return out


def _spread(vals):
    vals = np.asarray(vals, float)
    return float(vals.max() / vals.min() - 1.0)


def bessel_invariance(ctx: ExponentContext, factors=(0.5, 1.0, 2.0), widths=(1.0, 1.0, 1.0), tol=0.02) -> dict:
    """GN ratio of the same pair under the anisotropic lambda-scaling and the nu-rescaling."""
    s, p = float(ctx.sigma), float(ctx.p)
    lam = [gn_ratio_bessel(scaled_bessel_pair(lam=f, sigma=s, p=p, widths=widths), ctx).ratio for f in factors]
    nu = [gn_ratio_bessel(scaled_bessel_pair(nu=f, sigma=s, p=p, widths=widths), ctx).ratio for f in factors]
    return {"factors": list(factors), "lambda_ratios": lam, "nu_ratios": nu,
            "lambda_spread": _spread(lam), "nu_spread": _spread(nu),
            "passed": bool(_spread(lam) <= tol and _spread(nu) <= tol)}


# ---------------------------------------------------------------- Kolmogorov oracle at p = 2

@dataclass
class KolmogorovWindow:
    oracle: KolmogorovOracle
    tmax: float = 4.0
    nt: int = 41
    nx: int = 256
    nv: int = 256
    Lx: float = 64.0
    Lv: float = 32.0

    def rescaled(self, nu: float) -> "KolmogorovWindow":
        """f(nu t, nu x, v) solves the same equation with damping nu c on [0, tmax / nu]."""
        o = self.oracle
        f0 = o.f0_hat
        o2 = KolmogorovOracle(o.sigma, lambda k, xi: f0(np.asarray(k) / nu, xi) / nu, o.c * nu)
        return KolmogorovWindow(o2, self.tmax / nu, self.nt, self.nx, self.nv, self.Lx / nu, self.Lv)

    @property
    def t_grid(self):
        return np.linspace(0.0, self.tmax, self.nt)

    def lq_norm(self, q: float) -> float:
        o = self.oracle
        x, v, k, xi = o.lattice(self.nx, self.nv, self.Lx, self.Lv)
        dxdv = (x[1] - x[0]) * (v[1] - v[0])
        per = [np.sum(np.abs(o.physical(t, x, v, k, xi)) ** q) * dxdv for t in self.t_grid]
        return float(np.trapezoid(per, self.t_grid) ** (1.0 / q))

    def dsigma_l2(self) -> float:
        return self.oracle.dsigma_l2(self.t_grid, self.nx, self.nv, self.Lx, self.Lv)


def gn_ratio_kolmogorov(win: KolmogorovWindow, ctx: ExponentContext) -> GNResult:
    """GN ratio of the fractional Kolmogorov solution on [0, tmax], Gagliardo form at p = 2.

    With S = (c / c_gag) D^sigma f the equation has the structural form, and
    Plancherel gives ||D^sigma f||_{L^2 dh} = sqrt(c_gag) ||(-Delta)^{sigma/2} f||_2.
    """
    if ctx.p != 2:
        raise ValueError("the Kolmogorov oracle is a p = 2 solution")
    q, _, _ = _exps(ctx)
    cg = fracops.c_gag(ctx.d, float(ctx.sigma))
    nf = win.lq_norm(q)
    d2 = win.dsigma_l2()
    nd = math.sqrt(cg) * d2
    ns = abs(win.oracle.c) / cg * nd
    return _assemble(nf, nd, ns, ctx, {"dsigma_bessel_l2": d2, "c_gag": cg, "tmax": win.tmax})


def kolmogorov_invariance(win: KolmogorovWindow, ctx: ExponentContext, factors=(0.5, 1.0, 2.0), tol=0.02) -> dict:
    vals = [gn_ratio_kolmogorov(win.rescaled(f), ctx).ratio for f in factors]
    return {"factors": list(factors), "nu_ratios": vals, "nu_spread": _spread(vals),
            "finite": bool(np.all(np.isfinite(vals))), "passed": bool(_spread(vals) <= tol)}


def derivative_only_ratio(win: KolmogorovWindow, ctx: ExponentContext) -> dict:
    """||f||_q / ||D^sigma f||_2^Gamma for the p = 2 solution."""
    q, _, _ = _exps(ctx)
    gamma = float(balance_exponents(ctx).gamma)
    nf, d2 = win.lq_norm(q), win.dsigma_l2()
    return {"gamma": gamma, "ratio": nf / d2 ** gamma, "finite": bool(np.isfinite(nf / d2 ** gamma))}


# ---------------------------------------------------------------- large-tau suppression

def gaussian(widths=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0)):
    wt, wx, wv = widths
    t0, x0, v0 = center

    def f(t, x, v):
        return np.exp(-0.5 * (((t - t0) / wt) ** 2 + ((x - x0) / wx) ** 2 + ((v - v0) / wv) ** 2))
    return f


def dilated(F, s, alpha=1.0, beta=2.0):
    """F o delta_s with delta_s(t, x, v) = (s^alpha t, s^beta x, s^{beta-alpha} v)."""
    return lambda t, x, v: F(s ** alpha * t, s ** beta * x, s ** (beta - alpha) * v)


def _box_norm(vals, axes, p):
    w = [np.full(len(a), a[1] - a[0]) for a in axes]
    W = w[0][:, None, None] * w[1][None, :, None] * w[2][None, None, :]
    return float(np.sum(W * np.abs(vals) ** p) ** (1.0 / p))


def convolved_norm(F, tau, q, scale=1.0, alpha=1.0, beta=2.0, n=(24, 32, 24), m_nodes=6,
                   psi: Mollifier = DEFAULT_PSI):
    """||T_{K_tau} F||_q on a lattice covering the spread of F (length ``scale``) and of K_tau."""
    ell = max(scale, tau)
    tc = psi.t_center * tau ** alpha
    axes = (np.linspace(-tc - 5 * ell ** alpha, -tc + 5 * ell ** alpha, n[0]),
            np.linspace(-14 * ell ** beta, 14 * ell ** beta, n[1]),
            np.linspace(-5 * ell ** (beta - alpha), 5 * ell ** (beta - alpha), n[2]))
    T, X, V = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([T.ravel(), X.ravel(), V.ravel()], axis=1)
    vals = mollify_many(F, pts, tau, alpha, beta, psi, m_nodes).reshape(T.shape)
    return _box_norm(vals, axes, q), vals, axes


def gaussian_lp(widths, p):
    """||exp(-sum u_i^2 / (2 w_i^2))||_p in three variables."""
    return float(np.prod([w * math.sqrt(2 * math.pi / p) for w in widths]) ** (1.0 / p))


def suppression_profile(tau_grid, ctx: ExponentContext, alpha=1.0, beta=2.0, s_factors=None, **kw) -> dict:
    """Fixed-Gaussian norms ||T_{K_tau} f||_q and the operator-norm proxy sup_s ||T f_s||_q / ||f_s||_p.

    f_s = f o delta_s runs over the dilation orbit of one Gaussian; the sup is
    taken near s = 1/tau where the proxy peaks.
    """
    q, p = float(gain_exponent_q(ctx)), float(ctx.p)
    Qd = homogeneous_dim(alpha, beta, ctx.d)
    f = gaussian()
    if s_factors is None:
        s_factors = 2.0 ** np.arange(-1.5, 1.6, 0.5)
    fixed, proxy, argmax = [], [], []
    fp = gaussian_lp((1.0, 1.0, 1.0), p)
    for tau in tau_grid:
        fixed.append(convolved_norm(f, tau, q, 1.0, alpha, beta, **kw)[0] / fp)
        best, sbest = -1.0, None
        for c in s_factors:
            s = c / tau
            fs = dilated(f, s, alpha, beta)
            # ||f o delta_s||_p = s^{-Q/p} ||f||_p
            r = convolved_norm(fs, tau, q, 1.0 / s, alpha, beta, **kw)[0] / (s ** (-Qd / p) * fp)
            if r > best:
                best, sbest = r, c
        proxy.append(best)
        argmax.append(sbest)
    expected = Qd * (1.0 / q - 1.0 / p)
    tau_grid = np.asarray(tau_grid, float)
    slope_proxy = float(np.polyfit(np.log(tau_grid), np.log(proxy), 1)[0])
    slope_fixed = float(np.polyfit(np.log(tau_grid), np.log(fixed), 1)[0])
    return {"tau": tau_grid, "fixed": np.array(fixed), "proxy": np.array(proxy), "argmax": argmax,
            "expected_slope": expected, "slope_proxy": slope_proxy, "slope_fixed": slope_fixed}


def young_check(tau, ctx: ExponentContext, widths=(1.0, 1.0, 1.0), alpha=1.0, beta=2.0, n_kernel=(24, 48, 48),
                **kw) -> dict:
    """||T_{K_tau} f||_q against ||K_tau||_theta ||f||_p with 1 + 1/q = 1/theta + 1/p."""
    from .kernels import eval_K, integrate_compact
    q, p = float(gain_exponent_q(ctx)), float(ctx.p)
    theta = 1.0 / (1.0 + 1.0 / q - 1.0 / p)
    f = gaussian(widths)
    lhs = convolved_norm(f, tau, q, max(widths), alpha, beta, **kw)[0]
    vals, _, dv = integrate_compact(lambda s, y, w: np.abs(eval_K(tau, s, y, w, alpha, beta)) ** theta,
                                    tau, n_kernel, alpha, beta)
    kn = float(vals.sum() * dv) ** (1.0 / theta)
    bound = kn * gaussian_lp(widths, p)
    return {"tau": tau, "theta": theta, "lhs": lhs, "kernel_norm": kn, "bound": bound, "holds": bool(lhs <= bound)}
