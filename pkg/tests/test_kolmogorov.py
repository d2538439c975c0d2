import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from kinfrac import gn
from kinfrac import kolmogorov as KO
from kinfrac.exponents import ExponentContext


@pytest.mark.parametrize("t,k,xi", [(1.0, 0.7, -1.3), (2.5, -1.1, 0.4), (0.3, 2.0, 0.0), (1.0, 0.0, 1.5)])
@pytest.mark.parametrize("sigma", [0.3, 0.5, 0.8])
def test_damping_exponent(t, k, xi, sigma):
    cuts = [0, t]
    if k and 0 < t + xi / k < t:
        cuts = [0, t + xi / k, t]  # the integrand has a kink where xi + k(t-s) = 0
    ref = float(mp.quad(lambda s: abs(xi + k * (t - s)) ** (2 * sigma), cuts))
    assert float(KO.damping_exponent(t, k, xi, sigma)) == pytest.approx(ref, rel=1e-9)
    assert KO.damping_exponent_quad(t, k, xi, sigma) == pytest.approx(ref, rel=1e-6)


def test_gaussian_transform():
    f0 = KO.gaussian_f0_hat(1.2, 0.8, 0.5)
    k, xi = 0.6, -0.9
    fx = mp.quad(lambda x: mp.exp(-x ** 2 / (2 * 1.44) - 1j * k * x), [-mp.inf, 0, mp.inf])
    fv = mp.quad(lambda v: mp.exp(-(v - 0.5) ** 2 / (2 * 0.64) - 1j * xi * v), [-mp.inf, 0.5, mp.inf])
    ref = complex(fx * fv)
    assert complex(f0(k, xi)) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_fourier_pde_residual(sigma):
    orc = KO.KolmogorovOracle(sigma, KO.gaussian_f0_hat(1.0, 1.0, 0.5))
    K, X = np.meshgrid(np.linspace(-6, 6, 41), np.linspace(-6, 6, 41), indexing="ij")
    for t in (0.1, 1.0, 4.0):
        assert orc.pde_residual(t, K, X) <= 1e-8


def test_pde_residual_detects_wrong_damping():
    orc = KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat())
    wrong = KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat(), c=1.0)
    wrong.f_hat = lambda t, k, xi: orc.f0_hat(k, xi + k * t) * np.exp(-t * np.abs(xi))
    K, X = np.meshgrid(np.linspace(-3, 3, 21), np.linspace(-3, 3, 21), indexing="ij")
    assert KO.KolmogorovOracle.pde_residual(wrong, 1.0, K, X) > 1e-3


def test_free_transport_without_damping():
    orc = KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat(1.0, 1.0, 0.0), c=0.0)
    x, v, k, xi = orc.lattice(128, 128, 40.0, 20.0)
    t = 1.5
    got = orc.physical(t, x, v, k, xi)
    X, V = np.meshgrid(x, v, indexing="ij")
    np.testing.assert_allclose(got, np.exp(-(X - t * V) ** 2 / 2 - V ** 2 / 2), atol=1e-10)


def test_initial_energy():
    orc = KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat(1.3, 0.7))
    # ||exp(-x^2/(2a^2) - v^2/(2b^2))||_2 = sqrt(pi a b)
    assert orc.energy([0.0])[0] == pytest.approx(math.sqrt(math.pi * 1.3 * 0.7), rel=1e-10)


@pytest.mark.parametrize("sigma", [0.3, 0.5])
def test_energy_nonincreasing(sigma):
    orc = KO.KolmogorovOracle(sigma, KO.gaussian_f0_hat(1.0, 1.0, 0.5))
    en = orc.energy(np.linspace(0, 4, 41))
    assert np.all(np.diff(en) <= 1e-14)
    assert en[-1] < en[0]


def test_bandwidth_guard():
    orc = KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat(0.05, 1.0))
    with pytest.raises(KO.BandwidthError):
        orc.energy([0.0], nx=32, Lx=8.0)


def test_p2_gn_ratio_finite_and_nu_invariant():
    ctx = ExponentContext(1, Fraction(1, 2), Fraction(2))
    win = gn.KolmogorovWindow(KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat(1.0, 1.0, 0.5)))
    r = gn.gn_ratio_kolmogorov(win, ctx)
    assert r.finite and r.ratio > 0
    inv = gn.kolmogorov_invariance(win, ctx)
    assert inv["finite"] and inv["nu_spread"] <= 0.02


def test_rescaled_window_is_a_solution():
    win = gn.KolmogorovWindow(KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat()))
    w2 = win.rescaled(2.0)
    K, X = np.meshgrid(np.linspace(-4, 4, 21), np.linspace(-4, 4, 21), indexing="ij")
    assert w2.oracle.pde_residual(0.7, K, X) <= 1e-8
    assert w2.tmax == pytest.approx(2.0)


def test_gn_kolmogorov_needs_p2():
    win = gn.KolmogorovWindow(KO.KolmogorovOracle(0.5, KO.gaussian_f0_hat()))
    with pytest.raises(ValueError):
        gn.gn_ratio_kolmogorov(win, ExponentContext(1, Fraction(1, 2), Fraction(3)))


def test_zero_x_frequency_is_fractional_heat():
    f0 = KO.gaussian_f0_hat(1.0, 1.0, 0.5)
    orc = KO.KolmogorovOracle(0.5, f0, c=0.7)
    xi = np.linspace(-4, 4, 17)
    for t in (0.5, 2.0):
        np.testing.assert_allclose(orc.f_hat(t, 0.0, xi), f0(0.0, xi) * np.exp(-0.7 * np.abs(xi) * t), rtol=1e-13)


def test_free_transport_in_fourier():
    f0 = KO.gaussian_f0_hat(1.0, 1.0, 0.5)
    orc = KO.KolmogorovOracle(0.5, f0, c=0.0)
    k, xi = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-3, 3, 7), indexing="ij")
    np.testing.assert_allclose(orc.f_hat(1.3, k, xi), f0(k, xi + 1.3 * k), rtol=1e-14)
