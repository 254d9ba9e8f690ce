"""Core exact-arithmetic tests: frozen examples plus algebraic property suites."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcseries.exactalg import (
    LinearFactorization,
    MultiPoly,
    PoleError,
    RatFunc,
    VarRegistry,
    homogeneous_degree,
    parse_text,
    partial_fractions,
    poly_arith,
    rat_arith,
    recombine,
    shifted_factorial,
    substitute,
)

REG = VarRegistry(["alpha", "h"])
ALPHA = REG.var("alpha")
H = REG.var("h")


def rf(p) -> RatFunc:
    return RatFunc.coerce(REG, p)


# -- polynomials -------------------------------------------------------------


def test_product_of_linear_factors_expands():
    # (h + alpha)(2h + alpha) hand-expanded
    got = (H + ALPHA) * (2 * H + ALPHA)
    want = 2 * H**2 + 3 * ALPHA * H + ALPHA**2
    assert got == want
    assert poly_arith(H + ALPHA, 2 * H + ALPHA, "mul") == want


def test_poly_text_is_graded_lex_descending():
    p = (H + ALPHA) * (2 * H + ALPHA)
    assert p.text() == "alpha^2 + 3*alpha*h + 2*h^2"
    assert REG.zero().text() == "0"
    assert REG.const(Fraction(-3, 4)).text() == "-3/4"


def test_registry_mismatch_rejected():
    other = VarRegistry(["x"])
    with pytest.raises(ValueError):
        poly_arith(ALPHA, other.var("x"), "add")
    with pytest.raises(ValueError):
        rat_arith(rf(ALPHA), RatFunc.coerce(other, other.var("x")), "add")


def test_divide_exact_roundtrip_and_failure():
    p = (H + ALPHA) ** 3 * (2 * H + ALPHA)
    q = p.divide_exact(H + ALPHA)
    assert q == (H + ALPHA) ** 2 * (2 * H + ALPHA)
    assert p.divide_exact(H - ALPHA) is None


# -- rational functions ------------------------------------------------------


def test_sum_of_reciprocal_linear_forms():
    # 1/(alpha + h) + 1/(-alpha + h) == 2h/(h^2 - alpha^2)
    got = rf(1) / rf(ALPHA + H) + rf(1) / rf(H - ALPHA)
    want = rf(2 * H) / rf(H**2 - ALPHA**2)
    assert got == want


def test_denominator_is_expanded_primitive_positive_lead():
    f = rf(1) / rf(ALPHA + H) / rf(ALPHA + 2 * H) / 2
    assert f.denominator == ALPHA**2 + 3 * ALPHA * H + 2 * H**2
    assert f.numerator == REG.const(Fraction(1, 2))
    assert f.text() == "1/(2(alpha + h)(alpha + 2*h))"
    # dividing by an already-expanded product keeps one opaque factor
    g = rf(1) / (rf(ALPHA + H) * rf(ALPHA + 2 * H) * 2)
    assert g == f
    assert g.text() == "1/(2(alpha^2 + 3*alpha*h + 2*h^2))"
    assert (rf(H) / rf(ALPHA + H)).text() == "h/(alpha + h)"
    assert (rf(1) / (rf(H) ** 2 * 2)).text() == "1/(2h^2)"


def test_cancellation_by_trial_division():
    f = rf((H + ALPHA) ** 2 * (2 * H + ALPHA)) / rf(H + ALPHA) / rf(H - ALPHA)
    assert f == rf((H + ALPHA) * (2 * H + ALPHA)) / rf(H - ALPHA)
    # the factored form actually cancelled, not just compared equal
    assert f.denominator == ALPHA - H  # primitive, positive grlex lead
    # dividing by an expanded product keeps one opaque factor but the same value
    g = rf((H + ALPHA) ** 2 * (2 * H + ALPHA)) / rf((H + ALPHA) * (H - ALPHA))
    assert g == f


def test_division_by_zero_ratfunc():
    with pytest.raises(ZeroDivisionError):
        rf(1) / RatFunc.zero(REG)
    with pytest.raises(ZeroDivisionError):
        RatFunc.from_num_den(REG.one(), REG.zero())


def test_substitute_simple_and_pole():
    # f = 1/(alpha + h), h -> -alpha/2 gives 2/alpha
    f = rf(1) / rf(ALPHA + H)
    got = f.substitute({"h": rf(-ALPHA) / 2})
    assert got == rf(2) / rf(ALPHA)
    with pytest.raises(PoleError):
        (rf(1) / rf(H)).substitute({"h": 0})
    # polynomial substitution stays exact: p -> value
    assert substitute(H, {"h": rf(ALPHA) ** 2}) == rf(ALPHA) ** 2


def test_substitute_is_simultaneous():
    # alpha -> h, h -> alpha must swap, not chain
    f = rf(ALPHA + 2 * H)
    got = f.substitute({"alpha": H, "h": ALPHA})
    assert got == rf(H + 2 * ALPHA)


def test_substitute_across_registries():
    target = VarRegistry(["lambda_0", "lambda_1", "h"])
    lam0, lam1 = target.var("lambda_0"), target.var("lambda_1")
    f = rf(1) / rf(ALPHA + H)
    got = f.substitute({"alpha": RatFunc.from_poly(lam0 - lam1)}, target)
    assert got == RatFunc.coerce(target, 1) / RatFunc.from_poly(lam0 - lam1 + target.var("h"))


def test_homogeneous_degree():
    f = rf(2 * H) / rf(H**2 - ALPHA**2)
    assert homogeneous_degree(f) == -1
    assert homogeneous_degree(rf(H + ALPHA**2)) is None
    assert homogeneous_degree(RatFunc.zero(REG)) == 0
    assert homogeneous_degree(f, {"alpha": 2, "h": 2}) == -2


def test_shifted_factorial():
    assert shifted_factorial(REG, 0, ALPHA, H) == REG.one()
    assert shifted_factorial(REG, 2, ALPHA, H) == (H + ALPHA) * (2 * H + ALPHA)


# -- partial fractions --------------------------------------------------------


def test_partial_fractions_two_factors():
    # 1/((h+alpha)(2h+alpha)) = (-1/alpha)/(h+alpha) + (2/alpha)/(2h+alpha)
    fz = LinearFactorization("h", [H + ALPHA, 2 * H + ALPHA], RatFunc.one(REG))
    decomp = partial_fractions(RatFunc.one(REG), fz, REG.one())
    assert len(decomp) == 2
    r1, f1 = decomp[0]
    r2, f2 = decomp[1]
    assert f1 == H + ALPHA and r1 == rf(-1) / rf(ALPHA)
    assert f2 == 2 * H + ALPHA and r2 == rf(2) / rf(ALPHA)
    assert recombine(decomp, REG) == rf(1) / (rf(H + ALPHA) * rf(2 * H + ALPHA))


def test_partial_fractions_preconditions():
    with pytest.raises(ValueError):
        LinearFactorization("h", [H + ALPHA, 2 * H + 2 * ALPHA], RatFunc.one(REG))  # same root
    fz = LinearFactorization("h", [H + ALPHA, 2 * H + ALPHA], RatFunc.one(REG))
    with pytest.raises(ValueError):
        partial_fractions(RatFunc.one(REG), fz, H**2)  # numerator degree too big
    with pytest.raises(ValueError):
        LinearFactorization("h", [ALPHA + REG.one()], RatFunc.one(REG))  # no h at all
    with pytest.raises(ValueError):
        LinearFactorization("h", [ALPHA * H + ALPHA], RatFunc.one(REG))  # non-constant lead
    with pytest.raises(ValueError):
        partial_fractions(rf(H), fz, REG.one())  # scale involves h


def test_factorization_expand_reconstructs():
    fz = LinearFactorization("h", [H + ALPHA, 2 * H + ALPHA], rf(3 * ALPHA))
    assert fz.expand() == rf(3 * ALPHA * (H + ALPHA) * (2 * H + ALPHA))


# -- canonical text round trip --------------------------------------------------


def test_text_parse_roundtrip():
    cases = [
        rf(1) / rf(ALPHA + H),
        rf(1) / (rf(ALPHA + H) * rf(ALPHA + 2 * H) * 2),
        rf(2 * H) / rf(H**2 - ALPHA**2),
        rf(-ALPHA) / 3,
        RatFunc.zero(REG),
        rf(ALPHA**2 - Fraction(1, 2) * H),
    ]
    for f in cases:
        assert parse_text(REG, f.text()) == f


# -- property suites -------------------------------------------------------------


def coeffs():
    return st.one_of(
        st.integers(min_value=-6, max_value=6),
        st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5)),
    )


def monos(nvars=3, maxdeg=3):
    return st.tuples(*([st.integers(0, maxdeg)] * nvars))


PREG = VarRegistry(["x", "y", "z"])


def polys():
    return st.dictionaries(monos(), coeffs(), max_size=5).map(
        lambda d: PREG.zero() + MultiPoly(PREG, {m: c for m, c in d.items() if c != 0})
    )


def nonzero_polys():
    return polys().filter(lambda p: not p.is_zero)


def ratfuncs():
    return st.builds(
        lambda n, d: RatFunc.from_num_den(n, d), polys(), nonzero_polys()
    )


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_poly_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + PREG.zero() == a
    assert a * PREG.one() == a
    assert a - a == PREG.zero()


@settings(max_examples=40, deadline=None)
@given(ratfuncs(), ratfuncs(), ratfuncs())
def test_ratfunc_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RatFunc.zero(PREG)
    if not a.is_zero:
        assert a * a.reciprocal() == RatFunc.one(PREG)
        assert (b / a) * a == b


@settings(max_examples=40, deadline=None)
@given(ratfuncs(), ratfuncs(), st.integers(-4, 4), st.integers(-4, 4))
def test_substitution_is_a_homomorphism(a, b, xv, yv):
    bindings = {"x": RatFunc.from_scalar(PREG, xv), "y": RatFunc.from_scalar(PREG, yv)}
    try:
        sa = a.substitute(bindings)
        sb = b.substitute(bindings)
        ssum = (a + b).substitute(bindings)
        sprod = (a * b).substitute(bindings)
    except PoleError:
        return
    assert ssum == sa + sb
    assert sprod == sa * sb


@settings(max_examples=40, deadline=None)
@given(nonzero_polys(), nonzero_polys())
def test_homogeneous_degree_additive_on_products(a, b):
    da = homogeneous_degree(RatFunc.from_poly(a))
    db = homogeneous_degree(RatFunc.from_poly(b))
    if da is None or db is None:
        return
    assert homogeneous_degree(RatFunc.from_poly(a * b)) == da + db
    assert homogeneous_degree(RatFunc.from_poly(a) / RatFunc.from_poly(b)) == da - db


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(-8, 8), min_size=2, max_size=4, unique=True),
    st.lists(coeffs(), min_size=1, max_size=3),
)
def test_partial_fractions_recombine_exactly(shifts, numcoeffs):
    # denominator prod (h + s*alpha + s^2), numerator of low h-degree
    reg = REG
    a, h = ALPHA, H
    factors = [h + s * a + reg.const(s * s) for s in shifts]
    roots = [RatFunc.from_poly(-(s * a) - reg.const(s * s)) for s in shifts]
    distinct = all(
        not (roots[i] == roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots))
    )
    if not distinct:
        return
    numerator = reg.zero()
    for i, c in enumerate(numcoeffs[: len(factors) - 1 or 1]):
        if i >= len(factors):
            break
        numerator = numerator + (h**i) * c
    if numerator.is_zero or numerator.degree_in("h") >= len(factors):
        return
    fz = LinearFactorization("h", factors, RatFunc.one(reg))
    decomp = partial_fractions(RatFunc.from_scalar(reg, Fraction(1, 3)), fz, numerator)
    target = RatFunc.from_poly(numerator) / fz.expand() / Fraction(1, 3)
    assert recombine(decomp, reg) == target
