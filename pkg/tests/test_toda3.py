"""Lattice operators in two ratio variables and their closed-form solutions."""

import random
from fractions import Fraction
from math import comb, factorial

import pytest

from qcseries.exactalg import RatFunc, substitute
from qcseries.toda3 import (
    ALPHA_REGISTRY,
    ALPHA_TO_LAMBDA,
    LAMBDA_REGISTRY,
    UV_REGISTRY,
    BiSeries,
    TodaOperator,
    apply,
    batyrev_b,
    build_operators,
    char_poly,
    closed_a,
    closed_a_equivariant,
    closed_solution,
    verify_batyrev,
    verify_corollary_3_5,
    verify_operator_annihilation,
    verify_recursions_equivariant,
    verify_recursions_plain,
)

LREG = LAMBDA_REGISTRY


def euler_ops():
    return TodaOperator.euler(LREG, 1), TodaOperator.euler(LREG, 2)


def shift_ops():
    return TodaOperator.shift(LREG, 1, 0), TodaOperator.shift(LREG, 0, 1)


# -- characteristic polynomial ---------------------------------------------------------


def test_char_poly_matches_minor_expansion():
    reg = UV_REGISTRY
    u0, u1, u2 = (reg.var(f"u_{i}") for i in range(3))
    v1, v2 = reg.var("v_1"), reg.var("v_2")
    cp = char_poly()
    assert cp.p1 == u0 + u1 + u2
    assert cp.p2 == u0 * u1 + u0 * u2 + u1 * u2 + v1 + v2
    assert cp.p3 == u0 * u1 * u2 + u0 * v2 + u2 * v1


# -- operator normal form --------------------------------------------------------------


def test_euler_action_and_shift_action():
    th1, th2 = euler_ops()
    v1, _ = shift_ops()
    assert th1.act_monomial(3, 2) == {(3, 2): RatFunc.from_scalar(LREG, 3)}
    assert th2.act_monomial(3, 2) == {(3, 2): RatFunc.from_scalar(LREG, 2)}
    assert th1.act_monomial(0, 5) == {}
    assert v1.act_monomial(3, 2) == {(4, 2): RatFunc.one(LREG)}


def test_compose_rewrites_euler_past_multiplication():
    th1, _ = euler_ops()
    v1, _ = shift_ops()
    # theta o v = v o (theta + 1), and the two orders differ by the shift
    left = th1.compose(v1)
    right = v1.compose(th1 + TodaOperator.const(LREG, 1))
    assert left == right
    assert left != v1.compose(th1)
    assert left.act_monomial(2, 0) == {(3, 0): RatFunc.from_scalar(LREG, 3)}
    assert v1.compose(th1).act_monomial(2, 0) == {
        (3, 0): RatFunc.from_scalar(LREG, 2)
    }


def test_operator_algebra_basics():
    th1, th2 = euler_ops()
    v1, v2 = shift_ops()
    assert th1.compose(th2) == th2.compose(th1)
    assert v1.compose(v2) == v2.compose(v1)
    assert (th1 - th1).is_zero
    assert th1.power(0) == TodaOperator.const(LREG, 1)
    sq = th1.power(2)
    assert sq.act_monomial(4, 1) == {(4, 1): RatFunc.from_scalar(LREG, 16)}
    with pytest.raises(ValueError):
        TodaOperator(LREG, {(-1, 0): {(0, 0): RatFunc.one(LREG)}})


# -- building the two operators --------------------------------------------------------


def test_plain_operators_match_hand_expansion():
    th1, th2 = euler_ops()
    v1, v2 = shift_ops()
    d2, d3 = build_operators(equivariant=False)
    assert d2 == -th1.power(2) + th1.compose(th2) - th2.power(2) + v1 + v2
    assert d3 == (
        -th1.power(2).compose(th2)
        + th1.compose(th2.power(2))
        - v2.compose(th1)
        + v1.compose(th2)
    )


def test_equivariant_specializes_to_plain():
    flat = {"lambda_0": 0, "lambda_1": 0, "lambda_2": 0, "h": 1}
    eq_ops = build_operators(equivariant=True)
    plain_ops = build_operators(equivariant=False)
    for eq_op, plain_op in zip(eq_ops, plain_ops):
        assert eq_op.substitute(flat) == plain_op


def test_equivariant_second_operator_monomial_action():
    d2, _ = build_operators(equivariant=True)
    l0, l1, l2, h = (RatFunc.from_poly(LREG.var(n)) for n in LREG.names)
    a1, a2 = l1 - l0, l2 - l1
    one = RatFunc.one(LREG)
    for i, j in ((1, 0), (0, 1), (2, 1), (3, 3)):
        image = d2.act_monomial(i, j)
        eigen = -(h * h * (i * i - i * j + j * j) + a1 * h * i + a2 * h * j)
        assert image == {(i, j): eigen, (i + 1, j): one, (i, j + 1): one}
    # at the origin only the shifts survive
    assert d2.act_monomial(0, 0) == {(1, 0): one, (0, 1): one}


# -- closed-form coefficients ----------------------------------------------------------


def test_plain_coefficients_spot_values():
    assert closed_a(0, 0) == 1
    assert closed_a(1, 0) == 1
    assert closed_a(1, 1) == 2
    assert closed_a(2, 1) == Fraction(3, 4)
    assert closed_a(2, 2) == Fraction(3, 8)
    assert closed_a(-1, 2) == 0
    assert closed_a(4, 0) == Fraction(1, factorial(4) ** 2)


def test_binomial_sum_form_matches_closed():
    for i in range(7):
        for j in range(7):
            assert batyrev_b(i, j) == closed_a(i, j)
            assert sum(comb(i, r) * comb(j, r) for r in range(min(i, j) + 1)) == comb(
                i + j, i
            )
    assert batyrev_b(0, 3) == Fraction(1, 36)


def test_equivariant_coefficients_spot_values():
    reg = ALPHA_REGISTRY
    a1, a2, h = (reg.var(n) for n in reg.names)
    th = a1 + a2
    assert closed_a_equivariant(0, 0) == RatFunc.one(reg)
    assert closed_a_equivariant(1, 0) == RatFunc.from_factored(
        reg.one(), [h, h + a1]
    )
    # shared factors of the two highest-weight factorials cancel
    expected11 = RatFunc.from_factored(
        h.scale(2) + th, [h, h, h + a1, h + a2, h + th]
    )
    assert closed_a_equivariant(1, 1) == expected11
    assert closed_a_equivariant(-1, 0).is_zero


def test_equivariant_specialization_to_plain_coefficients():
    flat = {"alpha_1": 0, "alpha_2": 0, "h": 1}
    for i in range(4):
        for j in range(4 - i):
            specialized = closed_a_equivariant(i, j).substitute(flat)
            assert specialized.const_value() == closed_a(i, j)


# -- series and truncation -------------------------------------------------------------


def test_biseries_validation_and_lookup():
    one = RatFunc.one(LREG)
    s = BiSeries(LREG, 2, {(0, 0): one, (1, 1): one + one})
    assert s.coefficient(1, 1) == one + one
    assert s.coefficient(2, 0).is_zero
    assert s.coefficient(-1, 0).is_zero
    with pytest.raises(ValueError):
        BiSeries(LREG, 1, {(1, 1): one})
    with pytest.raises(ValueError):
        BiSeries(LREG, 1, {(-1, 0): one})


def test_apply_certifies_reduced_order():
    d2, _ = build_operators(equivariant=False)
    series = closed_solution(4, equivariant=False)
    image = apply(d2, series)
    assert image.order == 3
    assert image.is_zero
    with pytest.raises(ValueError):
        apply(d2, BiSeries(LREG, 0, {(0, 0): RatFunc.one(LREG)}))


def test_apply_detects_wrong_coefficient():
    d2, _ = build_operators(equivariant=False)
    coeffs = dict(closed_solution(3, equivariant=False).coeffs)
    coeffs[(1, 1)] = RatFunc.from_scalar(LREG, 3)
    image = apply(d2, BiSeries(LREG, 3, coeffs))
    assert not image.is_zero
    assert (1, 1) in image.coeffs


def test_operator_action_matches_recursion_on_random_series():
    rng = random.Random(7)
    coeffs = {
        (i, j): RatFunc.from_scalar(LREG, rng.randint(-5, 5))
        for i in range(4)
        for j in range(4 - i)
    }
    s = BiSeries(LREG, 3, coeffs)
    d2, _ = build_operators(equivariant=False)
    image = apply(d2, s)
    for idx in range(3):
        for jdx in range(3 - idx):
            direct = (
                s.coefficient(idx - 1, jdx)
                + s.coefficient(idx, jdx - 1)
                - s.coefficient(idx, jdx) * (idx * idx - idx * jdx + jdx * jdx)
            )
            assert image.coefficient(idx, jdx) == direct


# -- verification reports --------------------------------------------------------------


def test_plain_recursions_hold():
    report = verify_recursions_plain(8)
    assert report.ok
    assert report.status == "pass"


def test_equivariant_recursions_hold():
    report = verify_recursions_equivariant(4)
    assert report.ok


def test_operator_annihilation_both_modes():
    plain = verify_operator_annihilation(5, equivariant=False)
    assert plain.ok
    assert any("certified through order 4" in n for n in plain.notes)
    eq = verify_operator_annihilation(4, equivariant=True)
    assert eq.ok


def test_batyrev_report():
    assert verify_batyrev(6).ok


def test_flag_bridge_small_box():
    report = verify_corollary_3_5(2)
    assert report.ok
    assert report.status == "pass"


def test_closed_solution_specialization_tower():
    flat = {"lambda_0": 0, "lambda_1": 0, "lambda_2": 0, "h": 1}
    eq = closed_solution(3, equivariant=True)
    plain = closed_solution(3, equivariant=False)
    specialized = eq.substitute(flat)
    for i in range(4):
        for j in range(4 - i):
            assert specialized.coefficient(i, j) == plain.coefficient(i, j)


def test_apply_commutes_with_specialization():
    # specializing weights before or after acting gives the same series
    flat = {"lambda_0": 0, "lambda_1": 0, "lambda_2": 0, "h": 1}
    l0, l2 = LREG.var("lambda_0"), LREG.var("lambda_2")
    coeffs = {
        (i, j): RatFunc.from_poly(l0.scale(i) + l2 + LREG.const(j + 1))
        for i in range(3)
        for j in range(3 - i)
    }
    s = BiSeries(LREG, 2, coeffs)
    d2_eq, _ = build_operators(equivariant=True)
    d2_plain, _ = build_operators(equivariant=False)
    left = apply(d2_eq, s).substitute(flat)
    right = apply(d2_plain, s.substitute(flat))
    assert left.order == right.order
    for i in range(2):
        for j in range(2 - i):
            assert left.coefficient(i, j) == right.coefficient(i, j)
