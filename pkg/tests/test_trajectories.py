import mpmath as mp
import numpy as np
import pytest

from kinfrac import trajectories as tr
from kinfrac.geometry import PhasePoint

R = tr.dyadic_grid(-6, 6)


def draw(seed, d=1, alpha=1.0, beta=2.0):
    rng = np.random.default_rng(seed)
    return tr.TrajectoryParams(alpha, beta, -rng.uniform(1, 2), rng.uniform(-1, 1, d), rng.uniform(-1, 1, d))


@pytest.mark.parametrize("alpha,beta", [(1.0, 2.0), (0.7, 1.5), (1.0, 2.9)])
def test_determinant_closed_form(alpha, beta):
    A = tr.A_matrix(R, -1.3, alpha, beta)
    np.testing.assert_allclose(tr.block_det(A), -R ** (2 * beta - alpha) / alpha, rtol=1e-12)
    prod = np.einsum("...ij,...jk->...ik", A, tr.A_inverse(R, -1.3, alpha, beta))
    np.testing.assert_allclose(prod, np.broadcast_to(np.eye(2), prod.shape), atol=1e-9)


@pytest.mark.parametrize("r", [0.03, 0.7, 5.0])
def test_forcing_rate_against_mpmath(r):
    beta = 2.0
    g1 = lambda s: s ** beta * mp.sin(mp.log(s))
    g2 = lambda s: s ** beta * mp.cos(mp.log(s))
    d1, d2 = tr.forcing_rate(r, beta)
    assert float(mp.diff(g1, r)) == pytest.approx(float(d1), rel=1e-12)
    assert float(mp.diff(g2, r)) == pytest.approx(float(d2), rel=1e-12)


def test_angular_factorisation():
    m0 = -1.4
    r = np.array([0.1, 1.0, 3.0])
    A = tr.A_matrix(r, m0, 1.0, 2.0)
    scale = np.stack([np.diag([ri ** 2, ri]) for ri in r])
    np.testing.assert_allclose(A, scale @ tr.script_A(np.log(r), m0, 1.0, 2.0), rtol=1e-12)
    inv = tr.script_A_inverse(np.log(r), m0, 1.0, 2.0)
    np.testing.assert_allclose(inv @ tr.script_A(np.log(r), m0, 1.0, 2.0),
                               np.broadcast_to(np.eye(2), (3, 2, 2)), atol=1e-12)


def test_trajectory_starts_at_base():
    p = draw(1, d=2)
    base = PhasePoint(0.4, [1.0, -2.0], [0.5, 0.25])
    t, x, v = tr.trajectory_eval(p, 0.0, base)
    assert PhasePoint(t, x, v).allclose(base)


def test_velocity_rate_by_mpmath_derivative():
    p = draw(2)
    a, b, m0, m1, m2 = p.alpha, p.beta, p.m0, float(p.m1[0]), float(p.m2[0])

    def v(s):
        # velocity component of the endpoint map, written out with mpmath functions
        th = mp.log(s)
        a1 = (b * mp.sin(th) + mp.cos(th)) / a
        a2 = (b * mp.cos(th) - mp.sin(th)) / a
        return s ** (b - a) * (a1 / m0 * m1 + a2 * m2)

    for r in (0.05, 1.0, 7.0):
        assert float(tr.trajectory_velocity_rate(p, r)[0]) == pytest.approx(float(mp.diff(v, r)), rel=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_properties_random_draw(seed):
    d = 1 + seed % 3
    out = tr.check_M_properties(draw(seed, d=d), R)
    assert out["M1_residual"] <= 1e-6
    assert out["M1_velocity_rate_residual"] <= 1e-6
    assert out["M2_residual"] <= 1e-10
    for key in ("M3_slope_col1", "M3_slope_col2", "M4_slope_rate", "M4_slope_dv", "M4_slope_dx"):
        assert abs(out[key] - out[key.replace("slope", "expected")]) <= 0.05, key


def test_slopes_discriminate_wrong_exponent():
    out = tr.check_M_properties(draw(0), R)
    # shifting the target by 0.3 must fail the 0.05 window
    assert abs(out["M3_slope_col1"] - (out["M3_expected_col1"] + 0.3)) > 0.05
    assert abs(out["M4_slope_dx"] - (out["M4_expected_dx"] - 0.3)) > 0.05


def test_central_diff_vector_valued():
    r = np.array([1.0, 2.0])
    h = tr.fd_step(r)
    got = tr.central_diff(lambda s: np.stack([s ** 2, s ** 3], axis=-1), r, h)
    np.testing.assert_allclose(got, np.stack([2 * r, 3 * r ** 2], axis=-1), rtol=1e-7)


@pytest.mark.parametrize("kw", [dict(alpha=2.0, beta=1.0, m0=-1.0), dict(alpha=1.0, beta=2.0, m0=0.0)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        tr.TrajectoryParams(**kw)


def test_negative_r_rejected():
    with pytest.raises(ValueError):
        tr.forcing(-1.0, 2.0)


def test_forcing_examples():
    assert tr.forcing(1.0, 2.0) == pytest.approx((0.0, 1.0))
    g1, g2 = tr.forcing(np.exp(np.pi / 2), 2.0)
    assert g1 == pytest.approx(np.exp(np.pi), rel=1e-14) and abs(g2) < 1e-12
    r = np.random.default_rng(0).uniform(0.01, 50, 20)
    g1, g2 = tr.forcing(r, 2.5)
    np.testing.assert_allclose(g1 ** 2 + g2 ** 2, r ** 5, rtol=1e-12)


def test_zero_m_gives_pure_shear():
    p = tr.TrajectoryParams(1.0, 2.0, -1.5, np.zeros(1), np.zeros(1))
    t, x, v = tr.trajectory_eval(p, 2.0, PhasePoint(0.3, [0.5], [0.7]))
    assert t == pytest.approx(0.3 - 3.0)
    np.testing.assert_allclose(x, 0.5 - 3.0 * 0.7)
    np.testing.assert_allclose(v, 0.7)
    np.testing.assert_array_equal(tr.trajectory_velocity_rate(p, 2.0), 0.0)


def test_determinant_at_r2():
    # c r^{(2 beta - alpha) d} with c = -1/alpha, r = 2
    assert float(tr.block_det(tr.A_matrix(np.array([2.0]), -1.5, 1.0, 2.0))[0]) == pytest.approx(-8.0, rel=1e-13)


def test_angular_determinant_random():
    rng = np.random.default_rng(11)
    lam = -rng.uniform(1, 2, 20)
    th = rng.uniform(-10, 10, 20)
    for a, b in ((1.0, 2.0), (0.8, 1.3)):
        dets = [np.linalg.det(tr.script_A(t, l, a, b)) for t, l in zip(th, lam)]
        np.testing.assert_allclose(dets, -1 / a, rtol=1e-12)


@pytest.mark.parametrize("lam,ybar", [(-1.5, 0.0), (-1.2, 0.4), (-1.8, -0.3)])
def test_rescaled_profiles(lam, ybar):
    out = tr.rescaled_profile(draw(3), lam, ybar, R)
    # Psi is an eta-derivative of a compactly supported profile
    assert np.all(np.abs(out["psi_integral"]) <= 1e-8 * out["psi_scale"])
    assert out["phi_c1_ratio"] <= 10
    assert np.all(out["support_radius"] < 8)
    with pytest.raises(ValueError):
        tr.rescaled_profile(draw(3), -0.5, ybar, R)
