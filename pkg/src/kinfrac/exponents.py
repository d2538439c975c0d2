"""Exact rational algebra for the scaling exponents.

Everything here works on :class:`fractions.Fraction`; floats only appear
when a caller asks for them explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

RationalLike = Union[Fraction, int, str]


class ExponentError(ValueError):
    """Raised when an exponent input violates its admissibility constraint."""


def as_fraction(value: RationalLike) -> Fraction:
    """Parse an exact rational. Floats are refused so identities stay exact."""
    if isinstance(value, bool):
        raise ExponentError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ExponentError(f"cannot parse rational {value!r}") from exc
    raise ExponentError(f"expected an exact rational, got {type(value).__name__}")


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _check_d_sigma(d: int, sigma: Fraction) -> None:
    if not isinstance(d, int) or d < 1:
        raise ExponentError(f"d must be a positive integer, got {d!r}")
    if not (0 < sigma < 1):
        raise ExponentError(f"sigma must lie in (0,1), got {sigma}")


@dataclass(frozen=True)
class ExponentContext:
    d: int
    sigma: Fraction
    p: Fraction
    p_conj: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_fraction(self.sigma))
        object.__setattr__(self, "p", as_fraction(self.p))
        _check_d_sigma(self.d, self.sigma)
        if self.p <= 1:
            raise ExponentError(f"p must exceed 1, got {self.p}")
        object.__setattr__(self, "p_conj", self.p / (self.p - 1))


@dataclass(frozen=True)
class DerivedExponents:
    p_lo: Fraction
    p_hi: Fraction
    q: Fraction
    rho: Fraction
    A: Fraction
    B: Fraction
    a_exp: Fraction
    b_exp: Fraction
    gamma: Fraction

    def as_strings(self) -> dict:
        return {k: frac_str(getattr(self, k)) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class KernelIndices:
    d: int
    sigma: Fraction
    alpha: Fraction
    beta: Fraction
    Q: Fraction
    theta1: Fraction
    theta2: Fraction

    def as_strings(self) -> dict:
        out = {k: frac_str(getattr(self, k)) for k in ("sigma", "alpha", "beta", "Q", "theta1", "theta2")}
        out["d"] = self.d
        return out


def admissible_p_range(d: int, sigma: RationalLike) -> tuple[Fraction, Fraction]:
    """Open interval of p for which the gain of integrability holds."""
    s = as_fraction(sigma)
    _check_d_sigma(d, s)
    p_lo = 2 - 2 * s / (2 * d + d * s + 2 * s)
    p_hi = 2 + Fraction(2, d)
    return p_lo, p_hi


def _require_inside(ctx: ExponentContext) -> tuple[Fraction, Fraction]:
    lo, hi = admissible_p_range(ctx.d, ctx.sigma)
    if not (lo < ctx.p < hi):
        raise ExponentError(
            f"p={ctx.p} outside the open admissible range ({lo}, {hi}) for d={ctx.d}, sigma={ctx.sigma}")
    return lo, hi


def gain_exponent_q(ctx: ExponentContext, strict: bool = True) -> Fraction:
    """Integrability exponent q. With ``strict=False`` the closed endpoints are allowed."""
    d, s, p = ctx.d, ctx.sigma, ctx.p
    if strict:
        _require_inside(ctx)
    else:
        lo, hi = admissible_p_range(d, s)
        if not (lo <= p <= hi):
            raise ExponentError(f"p={ctx.p} outside the closed range [{lo}, {hi}]")
    return 2 * p * (d * s + d + s) / (d * (p * s + 2))


def critical_ratio_rho(ctx: ExponentContext) -> Fraction:
    """Ratio beta/alpha balancing the two kernel integrability conditions."""
    d, s, p = ctx.d, ctx.sigma, ctx.p
    den = d * (p - 2) + p * s
    if den == 0:
        raise ExponentError("d(p-2)+p*sigma vanishes; ratio undefined")
    return (d * (p - 2) + 2 * p * s + 2) / (2 * den)


def balance_exponents(ctx: ExponentContext) -> DerivedExponents:
    lo, hi = _require_inside(ctx)
    d, s, p, pc = ctx.d, ctx.sigma, ctx.p, ctx.p_conj
    q = gain_exponent_q(ctx)
    rho = critical_ratio_rho(ctx)
    A = (d + 1) * (1 / q - 1 / p)
    B = 1 + (d + 1) * (1 / q - 1 / pc)
    if not (A < 0 < B):
        raise ExponentError(f"sign condition A<0<B failed: A={A}, B={B}")
    a_exp = B / (B - A)
    b_exp = -A / (B - A)
    gamma = (p * s * (d + 1) + 2 * d) / (2 * (d * s + d + s))
    # closed forms double as internal consistency checks
    assert a_exp == (d * s + 2 * d + s) / (2 * (d * s + d + s))
    assert b_exp == s * (d + 1) / (2 * (d * s + d + s))
    assert a_exp + b_exp == 1
    assert gamma == a_exp + (p - 1) * b_exp
    return DerivedExponents(lo, hi, q, rho, A, B, a_exp, b_exp, gamma)


def homogeneous_dimension(d: int, alpha: Fraction, beta: Fraction) -> Fraction:
    return (2 * beta - alpha) * d + alpha


def kernel_indices(d: int, sigma: RationalLike, alpha: RationalLike, beta: RationalLike) -> KernelIndices:
    s, a, b = as_fraction(sigma), as_fraction(alpha), as_fraction(beta)
    _check_d_sigma(d, s)
    upper = a * (1 + 1 / s)
    if not (0 < a < b < upper):
        raise ExponentError(f"need 0 < alpha < beta < alpha(1+1/sigma) = {upper}; got alpha={a}, beta={b}")
    Q = homogeneous_dimension(d, a, b)
    theta1 = Q / (Q - s * (b - a))
    theta2 = Q / (Q - a + s * (b - a))
    return KernelIndices(d, s, a, b, Q, theta1, theta2)


def exponent_relations(ctx: ExponentContext) -> tuple[Fraction, Fraction]:
    """Both relations evaluated at rho; each returned residual is exactly zero."""
    d, s = ctx.d, ctx.sigma
    q = gain_exponent_q(ctx)
    rho = critical_ratio_rho(ctx)
    hom = (2 * rho - 1) * d + 1
    r1 = 1 / q + s * (rho - 1) / hom - 1 / ctx.p
    r2 = 1 / q + (1 - s * (rho - 1)) / hom - 1 / ctx.p_conj
    return r1, r2


def rational_sweep(d: int, sigma: RationalLike, n: int = 50) -> list[Fraction]:
    """n equispaced rationals strictly inside the admissible p-range."""
    lo, hi = admissible_p_range(d, sigma)
    return [lo + (hi - lo) * Fraction(k, n + 1) for k in range(1, n + 1)]


def exponent_report(d: int, sigma: RationalLike, p: RationalLike,
                    alpha: RationalLike | None = None, beta: RationalLike | None = None) -> dict:
    """JSON-ready dictionary of every derived exponent as "num/den" strings."""
    ctx = ExponentContext(d, as_fraction(sigma), as_fraction(p))
    der = balance_exponents(ctx)
    out = {"d": d, "sigma": frac_str(ctx.sigma), "p": frac_str(ctx.p), "p_conj": frac_str(ctx.p_conj)}
    out.update(der.as_strings())
    if alpha is None and beta is None:
        a, b = Fraction(1), der.rho
    else:
        a = as_fraction(alpha if alpha is not None else 1)
        b = as_fraction(beta) if beta is not None else a * der.rho
    out["kernel"] = kernel_indices(d, ctx.sigma, a, b).as_strings()
    return out
