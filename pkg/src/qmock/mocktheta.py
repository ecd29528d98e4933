"""The universal mock theta functions g2, g3 and the overpartition generating functions.

Everything here is an exact identity between truncated integer series.  The
formal variable x of the two-variable generating function is never kept
symbolic: it is always specialised to a signed power of q, and q itself may be
replaced by ``q**step`` so that the same code serves both the base-q form of a
hypergeometric identity and its ``q -> q^d`` specialisation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .partitions import FamilyParams
from .qseries import (
    INFINITY,
    Monomial,
    TruncatedSeries,
    invert,
    mul,
    poch_finite,
    poch_inf,
)


class BadSpecialization(ValueError):
    """A substitution that would make a denominator non-invertible or an exponent negative."""


@dataclass
class IdentityReport:
    name: str
    order: int
    residual: TruncatedSeries
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": {k: str(v) for k, v in self.params.items()},
            "order": self.order,
            "pass": self.passed,
            "first_nonzero_residual_index": self.residual.first_nonzero(),
        }


def _mono(sign: int, exponent: int, what: str = "argument") -> Monomial:
    if exponent < 0:
        raise BadSpecialization(f"{what} reduces to {'-' if sign < 0 else ''}q^{exponent}")
    return Monomial(sign, exponent)


def _ratio(m: Monomial, k: Monomial, what: str = "argument") -> Monomial:
    """``m / k`` as a monomial."""
    return _mono(m.sign * k.sign, m.exponent - k.exponent, what)


def _require_unit(m: Monomial, what: str) -> None:
    # (m; q)_n and (m; q)_inf are invertible iff m has positive exponent
    if m.exponent < 1:
        raise BadSpecialization(f"{what} = {m} makes a denominator non-invertible")


def _poch_prod(params, step: int, n: int | None, order: int) -> TruncatedSeries:
    out = TruncatedSeries.one(order)
    for a in params:
        factor = poch_inf(a, step, order) if n is None else poch_finite(a, step, n, order)
        out = mul(out, factor)
    return out


# ---------------------------------------------------------------------------
# g2 and g3

def _check_universal_arg(x: Monomial, step: int) -> None:
    if not 1 <= x.exponent <= step - 1:
        raise BadSpecialization(
            f"x = {x} must be +-q^e with 1 <= e <= {step - 1} for base q^{step}")


def g2_series(x: Monomial, step: int, order: int) -> TruncatedSeries:
    """``g2(x; q^step) = sum (-q;q)_n q^{n(n+1)/2} / (x, q/x; q)_{n+1}`` in base ``q^step``."""
    _check_universal_arg(x, step)
    D = step
    xinv = Monomial(x.sign, D - x.exponent)  # q^D / x
    term = TruncatedSeries.one(order).over_one_minus(x).over_one_minus(xinv)
    total = term
    n = 1
    while D * n * (n + 1) // 2 <= order:
        term = term.times_one_minus(Monomial(-1, D * n))
        term = term * Monomial(1, D * n)
        term = term.over_one_minus(x.shift(D * n)).over_one_minus(xinv.shift(D * n))
        total = total + term
        n += 1
    return total


def g3_series(x: Monomial, step: int, order: int) -> TruncatedSeries:
    """``g3(x; q^step) = sum q^{n(n+1)} / (x, q/x; q)_{n+1}`` in base ``q^step``."""
    _check_universal_arg(x, step)
    D = step
    xinv = Monomial(x.sign, D - x.exponent)
    term = TruncatedSeries.one(order).over_one_minus(x).over_one_minus(xinv)
    total = term
    n = 1
    while D * n * (n + 1) <= order:
        term = term * Monomial(1, 2 * D * n)
        term = term.over_one_minus(x.shift(D * n)).over_one_minus(xinv.shift(D * n))
        total = total + term
        n += 1
    return total


# ---------------------------------------------------------------------------
# the q-difference equation for the overpartition generating function

def f_recurrence(x0: Monomial, p: FamilyParams, order: int) -> TruncatedSeries:
    """Solve the overpartition q-difference equation at ``x = x0``.

    The ladder ``f(x0 q^{kd})`` is filled from the top, where ``x0 q^{kd}``
    is invisible at this order and f is 1, down to ``k = 0`` using
    ``f(x) = (x q^r + x q^{d-r}) / (1 - x q^d) f(x q^d)
             + (1 + x q^d) / (1 - x q^{2d}) f(x q^{2d})``.
    """
    d, r = p.d, p.r
    e = x0.exponent
    top = max(0, (order - e) // d + 1)
    one = TruncatedSeries.one(order)
    f1, f2 = one, one  # f(x q^{(k+1)d}), f(x q^{(k+2)d})
    for k in range(top - 1, -1, -1):
        x = x0.shift(k * d)
        first = (f1 * x.shift(r) + f1 * x.shift(d - r)).over_one_minus(x.shift(d))
        second = (f2 + f2 * x.shift(d)).over_one_minus(x.shift(2 * d))
        f1, f2 = first + second, f1
    return f1


def verify_qdiff(x0: Monomial, p: FamilyParams, order: int) -> IdentityReport:
    """Residual of the q-difference equation with each f value solved separately."""
    d, r = p.d, p.r
    f0 = f_recurrence(x0, p, order)
    fd = f_recurrence(x0.shift(d), p, order)
    f2d = f_recurrence(x0.shift(2 * d), p, order)
    one = TruncatedSeries.one(order)
    coeff1 = (TruncatedSeries.from_monomial(x0.shift(r), order)
              + TruncatedSeries.from_monomial(x0.shift(d - r), order))
    coeff1 = mul(coeff1, invert(one.times_one_minus(x0.shift(d))))
    coeff2 = one + TruncatedSeries.from_monomial(x0.shift(d), order)
    coeff2 = mul(coeff2, invert(one.times_one_minus(x0.shift(2 * d))))
    residual = f0 - mul(coeff1, fd) - mul(coeff2, f2d)
    return IdentityReport("qdiff", order, residual, {"x": x0, "d": d, "r": r})


# ---------------------------------------------------------------------------
# two closed forms of F(x, y; q)

def F_sum_form(x: Monomial, y: Monomial, order: int, step: int = 1) -> TruncatedSeries:
    """``(-x;q)_inf / (xq;q)_inf * sum (y, q/y; q)_n (-x)^n / (q^2;q^2)_n`` in base ``q^step``.

    For ``x = +-1`` the series only converges after it is paired with the
    ``(1 + x)`` factor of the prefactor; that rearrangement is used there.
    """
    D = step
    if x.exponent > order:
        return TruncatedSeries.one(order)
    yinv = _ratio(Monomial(1, D), y, "q/y")
    one = TruncatedSeries.one(order)

    def ratio_step(t: TruncatedSeries, n: int) -> TruncatedSeries:
        # (1 - y q^{n-1})(1 - q^n/y) / (1 - q^{2n}), all in base q^D
        t = t.times_one_minus(y.shift(D * (n - 1))).times_one_minus(yinv.shift(D * (n - 1)))
        return t.over_one_minus(Monomial(1, 2 * D * n))

    negx = -x
    if x.exponent >= 1:
        pre = mul(poch_inf(negx, D, order), invert(poch_inf(x.shift(D), D, order)))
        term, total, n = one, one, 1
        while n * x.exponent <= order:
            term = ratio_step(term, n) * negx
            total = total + term
            n += 1
        return mul(pre, total)

    # |x| = 1: (1 + x) * sum T_n = sum (T_n + x T_{n-1})
    pre = mul(poch_inf(negx.shift(D), D, order), invert(poch_inf(x.shift(D), D, order)))
    term, total, n = one, one, 1
    while D * (n - 1) <= order:
        nxt = ratio_step(term, n) * negx
        total = total + nxt + term * x
        term = nxt
        n += 1
    return mul(pre, total)


def F_product_form(x: Monomial, y: Monomial, order: int, step: int = 1) -> TruncatedSeries:
    """``(-xy, -xq/y; q)_inf / (xq, -q; q)_inf * sum (-x, x; q)_n q^{n(n+1)/2} / (q, -xy, -xq/y; q)_n``."""
    D = step
    if x.exponent > order:
        return TruncatedSeries.one(order)
    yinv = _ratio(Monomial(1, D), y, "q/y")
    a1 = -(x * y)
    a2 = -(x * yinv)
    _require_unit(a1, "-xy")
    _require_unit(a2, "-xq/y")
    num = mul(poch_inf(a1, D, order), poch_inf(a2, D, order))
    den = mul(poch_inf(x.shift(D), D, order), poch_inf(Monomial(-1, D), D, order))
    pre = mul(num, invert(den))
    term = TruncatedSeries.one(order)
    total = term
    n = 1
    while D * n * (n + 1) // 2 <= order:
        j = D * (n - 1)
        term = term.times_one_minus((-x).shift(j)).times_one_minus(x.shift(j))
        term = term * Monomial(1, D * n)
        term = term.over_one_minus(Monomial(1, D * n))
        term = term.over_one_minus(a1.shift(j)).over_one_minus(a2.shift(j))
        total = total + term
        n += 1
    return mul(pre, total)


# ---------------------------------------------------------------------------
# closed forms of the generating functions

def _family_products(p: FamilyParams, sign: int, order: int) -> TruncatedSeries:
    # (s q^r, s q^{d-r}; q^d)_inf with s = -sign inside the Pochhammer
    d, r = p.d, p.r
    return mul(poch_inf(Monomial(sign, r), d, order), poch_inf(Monomial(sign, d - r), d, order))


def closed_B(p: FamilyParams, order: int) -> TruncatedSeries:
    """``(-q^r, -q^{d-r}; q^d)_inf / (q^{2d}; q^{2d})_inf``."""
    return mul(_family_products(p, -1, order), invert(poch_inf(Monomial(1, 2 * p.d), 2 * p.d, order)))


def closed_C(p: FamilyParams, order: int) -> TruncatedSeries:
    """``closed_B * (1 - q^d) * g2(-q^r; q^d)``."""
    B = closed_B(p, order).times_one_minus(Monomial(1, p.d))
    return mul(B, g2_series(Monomial(-1, p.r), p.d, order))


def _parity_prefactor(p: FamilyParams, order: int) -> TruncatedSeries:
    minus = poch_inf(Monomial(-1, p.d), p.d, order)
    return mul(_family_products(p, 1, order), invert(mul(minus, minus)))


def closed_parity_B(p: FamilyParams, order: int) -> TruncatedSeries:
    """``(q^r, q^{d-r}; q^d)_inf / (-q^d; q^d)_inf^2``: even minus odd part counts."""
    return _parity_prefactor(p, order)


def closed_parity_C(p: FamilyParams, order: int) -> TruncatedSeries:
    pre = _parity_prefactor(p, order).times_one_minus(Monomial(-1, p.d))
    return mul(pre, g2_series(Monomial(1, p.r), p.d, order))


def schur_E_product(p: FamilyParams, order: int) -> TruncatedSeries:
    """``(-q^r, -q^{d-r}; q^d)_inf``, the distinct-parts side of Schur's theorem."""
    return _family_products(p, -1, order)


def schur_C_via_g3(p: FamilyParams, order: int) -> TruncatedSeries:
    """The Schur C-family generating function as ``B(q) * g3(-q^r; q^d)``."""
    return mul(schur_E_product(p, order), g3_series(Monomial(-1, p.r), p.d, order))


# ---------------------------------------------------------------------------
# the 3phi2 transformation

def _sum_terms(nums, dens, z: Monomial, order: int, step: int, extra_quad: bool = False) -> TruncatedSeries:
    """``sum_n (nums; q)_n / (dens; q)_n * z^n [* q^{step n(n-1)/2}]`` by direct products."""
    total = TruncatedSeries.zero(order)
    n = 0
    while True:
        weight = n * z.exponent + (step * n * (n - 1) // 2 if extra_quad else 0)
        if weight > order:
            break
        if n > 0 and weight == 0:
            raise BadSpecialization("summand weight does not grow; the series diverges")
        top = _poch_prod(nums, step, n, order)
        bottom = _poch_prod(dens, step, n, order)
        zn = TruncatedSeries.from_monomial(Monomial(z.sign ** n, weight), order)
        total = total + mul(mul(top, invert(bottom)), zn)
        n += 1
    return total


def phi32_check(a: Monomial, b: Monomial, c, dd: Monomial, e: Monomial,
                order: int, step: int = 1) -> IdentityReport:
    """Residual of the 3phi2 transformation

    ``sum (aq/bc, d, e)_n / (q, aq/b, aq/c)_n (aq/de)^n
      = (aq/d, aq/e, aq/bc)_inf / (aq/b, aq/c, aq/de)_inf
        * sum (aq/de, b, c)_n / (q, aq/d, aq/e)_n (aq/bc)^n``

    in base ``q^step``.  ``c=INFINITY`` selects the limiting form, where the
    factors containing 1/c become 1 and ``(c)_n (aq/bc)^n`` tends to
    ``(-aq/b)^n q^{n(n-1)/2}``.
    """
    D = step
    aq = a.shift(D)
    qm = Monomial(1, D)
    aq_b = _ratio(aq, b, "aq/b")
    aq_d = _ratio(aq, dd, "aq/d")
    aq_e = _ratio(aq, e, "aq/e")
    aq_de = _ratio(aq_d, e, "aq/de")
    composites = {"aq/b": aq_b, "aq/d": aq_d, "aq/e": aq_e, "aq/de": aq_de}
    limit = c is INFINITY
    if not limit:
        aq_c = _ratio(aq, c, "aq/c")
        aq_bc = _ratio(aq_b, c, "aq/bc")
        composites.update({"aq/c": aq_c, "aq/bc": aq_bc})
    for name, m in composites.items():
        _require_unit(m, name)

    if limit:
        lhs = _sum_terms([dd, e], [qm, aq_b], aq_de, order, D)
        pre_num = [aq_d, aq_e]
        pre_den = [aq_b, aq_de]
        rhs_sum = _sum_terms([aq_de, b], [qm, aq_d, aq_e], -aq_b, order, D, extra_quad=True)
    else:
        lhs = _sum_terms([aq_bc, dd, e], [qm, aq_b, aq_c], aq_de, order, D)
        pre_num = [aq_d, aq_e, aq_bc]
        pre_den = [aq_b, aq_c, aq_de]
        rhs_sum = _sum_terms([aq_de, b, c], [qm, aq_d, aq_e], aq_bc, order, D)
    pre = mul(_poch_prod(pre_num, D, None, order), invert(_poch_prod(pre_den, D, None, order)))
    residual = lhs - mul(pre, rhs_sum)
    params = {"a": a, "b": b, "c": c, "d": dd, "e": e, "step": D}
    return IdentityReport("phi32", order, residual, params)


def phi32_specialised_case(x: Monomial, y: Monomial, order: int, step: int) -> IdentityReport:
    """The specialisation ``a=-x, b=x, c->inf, d=y, e=q/y`` that links the two forms of F."""
    yinv = _ratio(Monomial(1, step), y, "q/y")
    rep = phi32_check(-x, x, INFINITY, y, yinv, order, step)
    rep.name = "phi32-specialised"
    return rep


def random_phi32_args(rng: random.Random, step: int = 1, max_exp: int = 6):
    """Draw ``(a, b, c, d, e)`` whose composite arguments all have positive exponent."""
    D = step
    while True:
        a, b, c, d, e = (Monomial(rng.choice((1, -1)), rng.randint(0, max_exp)) for _ in range(5))
        base = a.exponent + D
        if min(base - b.exponent, base - c.exponent, base - d.exponent - e.exponent,
               base - b.exponent - c.exponent) >= 1:
            return a, b, c, d, e


def identity_report(name: str, lhs: TruncatedSeries, rhs: TruncatedSeries, **params) -> IdentityReport:
    order = min(lhs.order, rhs.order)
    return IdentityReport(name, order, lhs.truncate(order) - rhs.truncate(order), params)


__all__ = [
    "BadSpecialization", "IdentityReport", "g2_series", "g3_series", "f_recurrence",
    "verify_qdiff", "F_sum_form", "F_product_form", "closed_B", "closed_C",
    "closed_parity_B", "closed_parity_C", "schur_E_product", "schur_C_via_g3",
    "phi32_check", "phi32_specialised_case", "random_phi32_args", "identity_report",
]
