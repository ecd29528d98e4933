import random

import pytest
import sympy

from qmock import mocktheta as mt
from qmock.partitions import FamilyParams, family_counts, signed_family_counts, valid_params
from qmock.qseries import INFINITY, Monomial, TruncatedSeries

GRID = valid_params()
SMALL_GRID = valid_params((3, 4, 5))
q = sympy.symbols("q")


def sympy_coeffs(expr, order):
    poly = sympy.Poly(sympy.series(expr, q, 0, order + 1).removeO(), q)
    return [int(poly.coeff_monomial(q ** n)) for n in range(order + 1)]


def sym_poch(a, base, n):
    return sympy.prod([1 - a * base ** j for j in range(n)])


class TestUniversalFunctions:
    def test_g2_against_sympy(self):
        N, D = 15, 3
        x = -q
        base = q ** D
        expr = sum(sym_poch(-base, base, n) * base ** (n * (n + 1) // 2)
                   / (sym_poch(x, base, n + 1) * sym_poch(base / x, base, n + 1)) for n in range(4))
        got = mt.g2_series(Monomial(-1, 1), D, N)
        assert list(got.coeffs) == sympy_coeffs(expr, N)

    def test_g3_against_sympy(self):
        N, D = 18, 4
        x = -q
        base = q ** D
        expr = sum(base ** (n * (n + 1))
                   / (sym_poch(x, base, n + 1) * sym_poch(base / x, base, n + 1)) for n in range(3))
        got = mt.g3_series(Monomial(-1, 1), D, N)
        assert list(got.coeffs) == sympy_coeffs(expr, N)

    @pytest.mark.parametrize("fn", [mt.g2_series, mt.g3_series])
    def test_constant_term(self, fn):
        assert fn(Monomial(-1, 1), 3, 0) == TruncatedSeries.one(0)

    @pytest.mark.parametrize("x", [Monomial(1, 0), Monomial(-1, 3), Monomial(1, 5)])
    def test_bad_argument(self, x):
        with pytest.raises(mt.BadSpecialization):
            mt.g2_series(x, 3, 10)


@pytest.mark.parametrize("p", GRID, ids=str)
class TestGeneratingFunctions:
    def test_main1_recurrence_equals_product(self, p):
        assert mt.f_recurrence(Monomial(1, 0), p, 40) == mt.closed_B(p, 40)

    def test_cor1_enumeration(self, p):
        oracle = list(mt.closed_B(p, 40).coeffs)
        assert family_counts("obar-b", p, 40) == oracle
        assert family_counts("obar-e", p, 40) == oracle

    def test_main2(self, p):
        assert mt.f_recurrence(Monomial(1, p.d), p, 40) == mt.closed_C(p, 40)
        assert family_counts("obar-c", p, 30) == list(mt.closed_C(p, 30).coeffs)

    def test_schur(self, p):
        e = list(mt.schur_E_product(p, 40).coeffs)
        assert family_counts("schur-b", p, 40) == e
        assert family_counts("schur-e", p, 40) == e
        assert family_counts("schur-c", p, 40) == list(mt.schur_C_via_g3(p, 40).coeffs)

    def test_parity(self, p):
        assert signed_family_counts("obar-b", p, 25) == list(mt.closed_parity_B(p, 25).coeffs)
        assert signed_family_counts("obar-c", p, 25) == list(mt.closed_parity_C(p, 25).coeffs)

    @pytest.mark.parametrize("sign,mult", [(1, 0), (1, 1), (-1, 0), (-1, 1), (1, 2)])
    def test_qdiff_residual(self, p, sign, mult):
        assert mt.verify_qdiff(Monomial(sign, mult * p.d), p, 40).passed


def test_worked_example_coefficient():
    p = FamilyParams(3, 1)
    assert mt.f_recurrence(Monomial(1, 0), p, 15)[15] == 14
    assert mt.closed_B(p, 15)[15] == 14


def test_recurrence_boundary():
    p = FamilyParams(3, 1)
    assert mt.f_recurrence(Monomial(1, 41), p, 40) == TruncatedSeries.one(40)
    assert mt.verify_qdiff(Monomial(1, 41), p, 40).passed


@pytest.mark.parametrize("p", SMALL_GRID, ids=str)
@pytest.mark.parametrize("x", ["1", "q^d", "-1", "-q^d"])
def test_F_forms_agree(p, x):
    xm = Monomial.parse(x.replace("d", str(p.d)))
    y = Monomial(1, p.r)
    s = mt.F_sum_form(xm, y, 40, p.d)
    assert s == mt.F_product_form(xm, y, 40, p.d)
    assert s == mt.f_recurrence(xm, p, 40)


def test_F_at_x_zero():
    y = Monomial(1, 1)
    assert mt.F_sum_form(Monomial(1, 50), y, 40, 3) == TruncatedSeries.one(40)
    assert mt.F_product_form(Monomial(1, 50), y, 40, 3) == TruncatedSeries.one(40)


def test_F_at_q_to_the_d_gives_g2_structure():
    # f(q^d) = (1 - q^d) * B * g2(-q^r; q^d)
    p = FamilyParams(3, 1)
    s = mt.F_product_form(Monomial(1, 3), Monomial(1, 1), 40, 3)
    assert s == mt.closed_C(p, 40)


@pytest.mark.parametrize("p", SMALL_GRID, ids=str)
def test_phi32_specialisation(p):
    y = Monomial(1, p.r)
    for x in (Monomial(1, p.d), Monomial(-1, p.d), Monomial(1, 2 * p.d)):
        assert mt.phi32_specialised_case(x, y, 40, p.d).passed


def test_phi32_random_tuples():
    rng = random.Random(7)
    for step in (1, 2, 3):
        for _ in range(8):
            assert mt.phi32_check(*mt.random_phi32_args(rng, step), 30, step).passed


def test_phi32_limit_random_tuples():
    rng = random.Random(11)
    for _ in range(8):
        a, b, _, d, e = mt.random_phi32_args(rng, 2)
        assert mt.phi32_check(a, b, INFINITY, d, e, 30, 2).passed


def test_phi32_a_equals_b():
    a = Monomial(1, 2)
    rep = mt.phi32_check(a, a, Monomial(-1, 0), Monomial(-1, 1), Monomial(1, 1), 30, 1)
    assert rep.passed


@pytest.mark.parametrize("args", [
    # aq/b = 1
    (Monomial(1, 0), Monomial(1, 1), Monomial(1, 0), Monomial(1, 0), Monomial(1, 0)),
    # aq/(de) has negative exponent
    (Monomial(1, 0), Monomial(1, 0), Monomial(1, 0), Monomial(1, 1), Monomial(1, 1)),
])
def test_phi32_bad_specialisation(args):
    with pytest.raises(mt.BadSpecialization):
        mt.phi32_check(*args, 20)


def test_product_form_bad_y():
    with pytest.raises(mt.BadSpecialization):
        mt.F_product_form(Monomial(1, 3), Monomial(1, 5), 20, 3)


def test_report_dict():
    rep = mt.identity_report("demo", TruncatedSeries([1, 2, 3], 2), TruncatedSeries([1, 2, 4, 5], 3))
    d = rep.to_dict()
    assert d["order"] == 2 and d["pass"] is False and d["first_nonzero_residual_index"] == 2
