from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from kinfrac import exponents as ex

F = Fraction


def _oracle(d, sigma, p):
    """Solve the two 1/q balance relations for (q, rho) symbolically."""
    q, rho = sp.symbols("q rho", positive=True)
    s, pp = sp.Rational(sigma.numerator, sigma.denominator), sp.Rational(p.numerator, p.denominator)
    pc = pp / (pp - 1)
    hom = (2 * rho - 1) * d + 1
    sol = sp.solve([1 / q + s * (rho - 1) / hom - 1 / pp, 1 / q + (1 - s * (rho - 1)) / hom - 1 / pc],
                   [q, rho], dict=True)
    assert len(sol) == 1
    return F(str(sol[0][q])), F(str(sol[0][rho]))


def test_canonical_values():
    ctx = ex.ExponentContext(1, F(1, 2), F(2))
    der = ex.balance_exponents(ctx)
    assert der.q == F(8, 3)
    assert der.rho == F(2)
    assert der.a_exp == F(3, 4)
    assert der.b_exp == F(1, 4)
    assert der.gamma == F(1)
    assert (der.p_lo, der.p_hi) == (F(12, 7), F(4))


@pytest.mark.parametrize("d,sigma,p", [(1, F(1, 2), F(2)), (1, F(1, 3), F(5, 2)), (2, F(3, 4), F(9, 4)),
                                       (3, F(1, 5), F(21, 10))])
def test_q_rho_match_symbolic_solution(d, sigma, p):
    ctx = ex.ExponentContext(d, sigma, p)
    q, rho = _oracle(d, sigma, p)
    assert ex.gain_exponent_q(ctx) == q
    assert ex.critical_ratio_rho(ctx) == rho


def test_kernel_indices_canonical():
    ki = ex.kernel_indices(1, F(1, 2), 1, 2)
    assert ki.Q == 4
    assert ki.theta1 == F(8, 7)
    assert ki.theta2 == F(8, 7)
    # Young: 1 + 1/q = 1/theta + 1/p at p = 2
    assert 1 + 1 / F(8, 3) == 1 / ki.theta1 + F(1, 2)


def test_sweep_identities_exact():
    pts = ex.rational_sweep(1, F(1, 2), 50)
    assert len(pts) == 50
    for p in pts:
        ctx = ex.ExponentContext(1, F(1, 2), p)
        der = ex.balance_exponents(ctx)
        assert der.a_exp + der.b_exp == 1
        assert der.gamma == der.a_exp + (p - 1) * der.b_exp
        assert ex.exponent_relations(ctx) == (0, 0)
        assert der.A < 0 < der.B


sigmas = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=60)


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 4), sigma=sigmas, u=st.fractions(min_value=F(1, 100), max_value=F(99, 100),
                                                         max_denominator=100))
def test_identities_hold_everywhere_inside(d, sigma, u):
    lo, hi = ex.admissible_p_range(d, sigma)
    p = lo + (hi - lo) * u
    ctx = ex.ExponentContext(d, sigma, p)
    der = ex.balance_exponents(ctx)
    assert der.a_exp + der.b_exp == 1
    assert der.gamma == der.a_exp + (p - 1) * der.b_exp
    r1, r2 = ex.exponent_relations(ctx)
    assert r1 == 0 and r2 == 0
    assert 0 < der.a_exp < 1


def test_upper_endpoint_is_where_A_vanishes():
    ctx = ex.ExponentContext(1, F(1, 2), F(4))
    q = ex.gain_exponent_q(ctx, strict=False)
    assert 2 * (1 / q - 1 / ctx.p) == 0


@pytest.mark.parametrize("sigma", ["3/2", "0", "1", "-1/2"])
def test_sigma_outside_unit_interval_rejected(sigma):
    with pytest.raises(ex.ExponentError, match=r"\(0,1\)"):
        ex.admissible_p_range(1, sigma)


@pytest.mark.parametrize("p", ["12/7", "4", "1", "5"])
def test_p_outside_open_range_rejected(p):
    ctx = ex.ExponentContext(1, F(1, 2), F(p)) if F(p) > 1 else None
    if ctx is None:
        with pytest.raises(ex.ExponentError):
            ex.ExponentContext(1, F(1, 2), F(p))
        return
    with pytest.raises(ex.ExponentError, match="outside"):
        ex.gain_exponent_q(ctx)


def test_floats_are_refused():
    with pytest.raises(ex.ExponentError):
        ex.as_fraction(0.5)


@pytest.mark.parametrize("alpha,beta", [(1, 1), (1, 3), (2, 1)])
def test_kernel_window_enforced(alpha, beta):
    with pytest.raises(ex.ExponentError):
        ex.kernel_indices(1, F(1, 2), alpha, beta)


def test_report_strings():
    rep = ex.exponent_report(1, "1/2", "2")
    assert rep["q"] == "8/3" and rep["rho"] == "2/1" and rep["gamma"] == "1/1"
    assert rep["kernel"]["Q"] == "4/1"


def test_two_dimensional_examples():
    assert ex.admissible_p_range(2, F(1, 2)) == (F(11, 6), F(3))
    assert ex.gain_exponent_q(ex.ExponentContext(2, F(1, 2), F(2))) == F(7, 3) == _oracle(2, F(1, 2), F(2))[0]
    ki = ex.kernel_indices(2, F(1, 2), 1, F(3, 2))
    assert ki.Q == 5 and ki.theta1 == F(20, 19)


def test_upper_endpoint_values():
    ctx = ex.ExponentContext(1, F(1, 2), F(4))
    assert ex.gain_exponent_q(ctx, strict=False) == F(4)
    assert ex.critical_ratio_rho(ctx) == 1


@pytest.mark.parametrize("d,sigma", [(1, F(1, 3)), (1, F(7, 8)), (3, F(1, 2))])
def test_rho_inside_window(d, sigma):
    for p in ex.rational_sweep(d, sigma, 12):
        rho = ex.critical_ratio_rho(ex.ExponentContext(d, sigma, p))
        assert 1 < rho < 1 + 1 / sigma
