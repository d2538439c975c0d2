import math

import mpmath as mp
import numpy as np
import pytest

from kinfrac import kernels as K

Q = 4.0


def test_bump_constant_and_unit_mass():
    z1 = float(mp.quad(lambda u: mp.exp(-1 / (1 - u ** 2)), [-1, 0, 1]))
    psi = K.Mollifier()
    assert psi.z1 == pytest.approx(z1, rel=1e-12)
    # separable, so unit mass is the product of three 1d integrals
    lam, wl = psi.t_gauss_nodes(8)
    m, wm = psi.m_gauss_nodes(8)
    T, M1, M2 = np.meshgrid(lam, m, m, indexing="ij")
    W = wl[:, None, None] * wm[None, :, None] * wm[None, None, :]
    assert float(np.sum(psi(T, M1, M2) * W)) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("n", [3, 6, 10])
def test_bump_gauss_moments(n):
    u, w = K.bump_gauss(n)
    for k in range(0, 2 * n, 2):
        ref = float(mp.quad(lambda x: x ** k * mp.exp(-1 / (1 - x ** 2)), [-1, 0, 1]))
        assert float(np.sum(w * u ** k)) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("tau", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_K_tau_unit_mass(tau):
    vals, _, dv = K.integrate_compact(lambda S, Y, W: K.eval_K(tau, S, Y, W), tau)
    assert float(vals.sum() * dv) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("r", [0.125, 1.0, 8.0])
def test_K_sup_scales_like_r_minus_Q(r):
    # the sup of psi is attained at the centre, which the pullback hits for some (y, w)
    psi = K.DEFAULT_PSI
    peak = psi(psi.t_center, 0.0, 0.0)
    s = psi.t_center * r
    assert float(K.eval_K(r, s, 0.0, 0.0)) == pytest.approx(peak * r ** -Q, rel=1e-12)


@pytest.mark.parametrize("r", [0.25, 1.0, 4.0])
def test_L_has_zero_mean_in_w(r):
    assert K.mean_zero_L(r) <= 1e-8


@pytest.mark.parametrize("kind", sorted(K.COMPACT))
@pytest.mark.parametrize("r", [0.25, 4.0])
def test_compact_support(kind, r):
    assert K.support_violation(kind, r) == 0.0


@pytest.mark.parametrize("kind,theta,expected", [("K", 1.0, 0.0), ("K", 2.0, -2.0), ("K", math.inf, -4.0),
                                                 ("L", math.inf, -5.0), ("Gv", math.inf, -4.5),
                                                 ("Gv", 1.0, -0.5), ("G", 1.0, -0.5), ("G", 2.0, -2.5)])
def test_expected_slopes(kind, theta, expected):
    assert K.expected_norm_slope(kind, 0.5, 1.0, 2.0, theta) == pytest.approx(expected)


def test_tailed_norm_slope_coarse():
    res = K.kernel_norm_scaling("G", 0.5, 1.0, 2.0, 2.0, r_grid=2.0 ** np.arange(-4, 5, 2))
    assert res["slope"] == pytest.approx(-2.5, abs=0.05)


def test_profiles_rotate_but_stay_bounded():
    # the profiles depend on r through log r only; C^1 norms stay comparable over decades
    for kind in ("H", "Theta"):
        vals = [K.profile_c1_norm(kind, r) for r in (1 / 16, 1 / 4, 1.0, 4.0, 16.0)]
        assert max(vals) / min(vals) < 1.5


def test_majorant_l1_is_scale_free():
    a, b = K.pq_bounds(0.5, 0.5), K.pq_bounds(2.0, 0.5)
    assert a["P_l1"] == pytest.approx(b["P_l1"], rel=1e-9)
    assert a["Q_l1"] == pytest.approx(b["Q_l1"], rel=1e-9)
    assert a["P_linf"] == pytest.approx(0.5 ** -Q) and b["P_linf"] == pytest.approx(2.0 ** -Q)


def test_weak_quasinorm_tent():
    # F = 1 - |x| on (-1, 1): |{F > l}| = 2(1 - l), sup of l (2(1 - l))^{1/2} at l = 2/3
    n = 200000
    x = -1 + (np.arange(n) + 0.5) * 2 / n
    val = K.weak_quasinorm(1 - np.abs(x), np.full(n, 2 / n), 2.0)
    assert val == pytest.approx((2 / 3) ** 1.5, rel=1e-4)
    with pytest.raises(ValueError):
        K.weak_quasinorm(np.zeros(5), np.ones(5), 2.0)


# generic slices; at ybar = 0 the slice profile of Gv has zero mass and its tail is one order faster
TAIL_SLICES = [(-1.8, -0.5), (-1.3, 0.8)]


@pytest.mark.parametrize("s,ybar", TAIL_SLICES)
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_bessel_kernel_w_tails(s, ybar, r):
    from kinfrac.fracops import decay_slope
    w = np.geomspace(30, 600, 16)
    n = len(w)
    G, Gv = K.eval_bessel_kernels(r, 0.5, np.full(n, s * r), np.full(n, ybar * r ** 2), w * r)
    assert decay_slope(w, np.abs(G))[0] == pytest.approx(-1.5, abs=0.1)
    assert decay_slope(w, np.abs(Gv))[0] == pytest.approx(-1.5, abs=0.1)


def test_bessel_kernels_vanish_off_the_slab():
    # s outside the time support, and y far outside the |y| <~ r^beta window
    G, Gv = K.eval_bessel_kernels(1.0, 0.5, np.array([-0.5, -1.5]), np.array([0.0, 50.0]), np.zeros(2))
    assert np.all(G == 0) and np.all(Gv == 0)


def test_gagliardo_kernel_large_h():
    h = np.geomspace(10, 1e3, 8)
    n = len(h)
    fG, _ = K.eval_gagliardo_kernels(1.0, 0.5, np.full(n, -1.5), np.zeros(n), np.zeros(n), h)
    from kinfrac.fracops import decay_slope
    assert decay_slope(h, np.abs(fG))[0] == pytest.approx(-0.5, abs=0.05)
    # H_r(w + h) has left the support, so frakG = -H_r(w) |h|^{-sigma}
    np.testing.assert_allclose(fG, -K.eval_H(1.0, -1.5, 0.0, 0.0) * h ** -0.5, rtol=1e-12)


def test_gagliardo_kernel_zero_where_H_is_flat():
    h = np.array([1e-3, 1e-2, 0.1])
    fG, _ = K.eval_gagliardo_kernels(1.0, 0.5, np.full(3, -1.5), np.zeros(3), np.full(3, 50.0), h)
    assert np.all(fG == 0)
    with pytest.raises(ValueError):
        K.eval_gagliardo_kernels(1.0, 0.5, -1.5, 0.0, 0.0, 0.0)


def test_domination_ratio_bounded_in_r():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, (5, 3))
    chi = lambda h: np.exp(-np.log(np.abs(h)) ** 2 / 4)
    worst = []
    for k in range(3):
        c, wd = rng.uniform(-0.5, 0.5, 3), rng.uniform(0.7, 1.5, 3)
        A = lambda T, X, V, c=c, wd=wd: np.exp(-(((T - c[0]) / wd[0]) ** 2 + ((X - c[1]) / (2 * wd[1])) ** 2
                                                 + ((V - c[2]) / wd[2]) ** 2) / 2)
        worst.append(max(K.domination_ratio(r, 0.5, A, chi, pts).max() for r in (0.25, 1.0, 4.0)))
    assert max(worst) <= 1.0
