import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from kinfrac import gn
from kinfrac.exponents import ExponentContext
from kinfrac.representation import Profile1D, SeparableField, gauss_derivative

CTX = ExponentContext(1, Fraction(1, 2), Fraction(2))


@pytest.mark.parametrize("p", [2.0, 8 / 3, 4 / 3])
def test_gaussian_lp_closed_form(p):
    w = (0.7, 1.0, 1.6)
    one_d = [integrate.quad(lambda u: math.exp(-p * u ** 2 / (2 * wi ** 2)), -np.inf, np.inf)[0] for wi in w]
    assert gn.gaussian_lp(w, p) == pytest.approx(np.prod(one_d) ** (1 / p), rel=1e-10)


@pytest.mark.parametrize("p", [2.0, 8 / 3])
def test_tensor_norm_of_gaussian(p):
    w = (0.8, 1.0, 1.3)
    g = SeparableField([tuple(Profile1D.from_callable(lambda u, s=s: np.exp(-u ** 2 / (2 * s ** 2)))
                              for s in w)])
    axes = gn.pair_axes(w, n=(81, 81, 81), spans=(10.0, 10.0, 10.0))
    assert gn.tensor_norm(g, axes, p) == pytest.approx(gn.gaussian_lp(w, p), rel=1e-6)


def test_tensor_norm_of_sum_is_not_sum_of_norms():
    a = gauss_derivative(0)
    one = SeparableField([(a, a, a)])
    two = SeparableField([(a, a, a), (a, a, a)])
    axes = gn.pair_axes((1, 1, 1), n=(61, 61, 61), spans=(9.0, 9.0, 9.0))
    assert gn.tensor_norm(two, axes, 3.0) == pytest.approx(2 * gn.tensor_norm(one, axes, 3.0), rel=1e-12)


def test_bessel_ratio_invariant():
    inv = gn.bessel_invariance(CTX)
    assert inv["lambda_spread"] <= 0.02
    assert inv["nu_spread"] <= 0.02
    assert inv["passed"]


def test_wrong_scaling_breaks_invariance():
    # stretching only v is not a symmetry of the ratio; the drift must clear the 2% window
    base = gn.gn_ratio_bessel(gn.scaled_bessel_pair(), CTX).ratio
    off = gn.gn_ratio_bessel(gn.scaled_bessel_pair(widths=(1.0, 1.0, 4.0)), CTX).ratio
    assert abs(off / base - 1) > 0.05


def test_wrong_exponent_breaks_invariance():
    # the same lambda-orbit scored with q off the balance value drifts
    pairs = [gn.scaled_bessel_pair(lam=f) for f in (0.5, 1.0, 2.0)]
    vals = []
    for pr in pairs:
        r = gn.gn_ratio_bessel(pr, CTX)
        axes = gn.pair_axes(pr.meta["widths"])
        vals.append(gn.tensor_norm(pr.f, axes, 3.0) / (r.rhs_v * r.rhs_s))
    assert max(vals) / min(vals) - 1 > 0.05


def test_family_ratios_finite():
    for pair in gn.bessel_family(3, seed=4):
        r = gn.gn_ratio_bessel(pair, CTX)
        assert r.finite and 0 < r.ratio < math.inf
        lhs, rv, rs, ratio = r.as_tuple()
        assert ratio == pytest.approx(lhs / (rv * rs))


def test_zero_pair_is_trivial():
    r = gn.gn_ratio_bessel(gn.zero_bessel_pair(), CTX)
    assert r.trivial and r.finite and r.ratio == 0.0


def test_gn_needs_bessel_model():
    from kinfrac.representation import gagliardo_pair_from_f
    with pytest.raises(ValueError):
        gn.gn_ratio_bessel(gagliardo_pair_from_f(0.5), CTX)


def test_dilation_norm_scaling():
    f = gn.gaussian()
    fs = gn.dilated(f, 2.0)
    assert fs(0.5, 0.25, 1.0) == pytest.approx(f(1.0, 1.0, 2.0))


def test_suppression_slope():
    res = gn.suppression_profile(2.0 ** np.arange(-3, 4), CTX)
    assert res["expected_slope"] == pytest.approx(-0.5)
    assert res["slope_proxy"] == pytest.approx(-0.5, abs=0.1)


@pytest.mark.parametrize("tau", [0.5, 2.0])
def test_young_bound(tau):
    out = gn.young_check(tau, CTX)
    assert out["theta"] == pytest.approx(8 / 7)
    assert out["holds"] and out["lhs"] > 0
