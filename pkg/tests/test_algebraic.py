"""Tests for real algebraic numbers, field arithmetic, and resultants."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxcubic.algebraic import (
    AlgebraicField,
    AlgebraicPoint,
    FieldPoly,
    PointValue,
    RealAlgebraic,
    TowerContext,
    cauchy_bound,
    count_roots,
    isolate_real_roots,
    sturm_chain,
    sylvester_resultant,
    ucompose,
    udivmod,
    ueval,
    ugcd,
    umul,
    uneg,
    unipoly,
    unipoly_str,
    uprimitive,
    uscale,
    usquarefree,
    value_float,
    value_sign,
)
from darbouxcubic.errors import PositiveDimensional
from darbouxcubic.poly import parse_poly

SQRT2_OVER_2 = unipoly([-1, 0, 2])  # 2t^2 - 1


# -- univariate toolkit ---------------------------------------------------------


def test_unipoly_normalization():
    assert unipoly([1, 2, 0, 0]) == (Fraction(1), Fraction(2))
    assert unipoly([0]) == ()


def test_udivmod_euclidean():
    a = unipoly([2, 0, 1])  # t^2 + 2
    b = unipoly([1, 1])  # t + 1
    q, r = udivmod(a, b)
    assert q == unipoly([-1, 1])
    assert r == unipoly([3])
    qb = umul(q, b)
    recomposed = tuple(
        (qb[i] if i < len(qb) else 0) + (r[i] if i < len(r) else 0) for i in range(3)
    )
    assert recomposed == a


def test_ugcd_and_squarefree():
    # (t-1)^2 (t+2)
    p = umul(umul(unipoly([-1, 1]), unipoly([-1, 1])), unipoly([2, 1]))
    g = ugcd(p, unipoly([-1, 1]))
    assert g == unipoly([-1, 1])
    assert usquarefree(p) == uprimitive(umul(unipoly([-1, 1]), unipoly([2, 1])))


def test_ucompose():
    f = unipoly([0, 0, 1])  # t^2
    g = unipoly([1, 1])  # t + 1
    assert ucompose(f, g) == unipoly([1, 2, 1])


def test_sturm_count_roots():
    p = unipoly([0, 1, 0, -1])  # y - y^3: roots -1, 0, 1
    assert count_roots(p, Fraction(-2), Fraction(2)) == 3
    assert count_roots(p, Fraction(1, 2), Fraction(2)) == 1
    assert count_roots(p, Fraction(2), Fraction(3)) == 0
    assert cauchy_bound(p) >= 1


def test_count_roots_rejects_root_endpoints():
    with pytest.raises(ValueError):
        count_roots(unipoly([0, 1]), Fraction(0), Fraction(1))


def test_unipoly_str():
    assert unipoly_str(unipoly([-1, 0, 2])) == "2*t^2 - 1"
    assert unipoly_str((), "y") == "0"
    assert unipoly_str(unipoly([Fraction(1, 2)])) == "1/2"


# -- root isolation -------------------------------------------------------------


def test_isolation_finds_exact_rationals():
    roots = isolate_real_roots([0, 1, 0, -1])  # y - y^3
    assert roots == [Fraction(-1), Fraction(0), Fraction(1)]


def test_isolation_of_irrational_roots():
    roots = isolate_real_roots(SQRT2_OVER_2)
    assert len(roots) == 2
    assert all(isinstance(r, RealAlgebraic) for r in roots)
    assert abs(roots[1].to_float() - 0.5**0.5) < 1e-12
    assert roots[0] < 0 < roots[1]


def test_isolation_mixed():
    # (t - 1/2)(t^2 - 2): rational 1/2 plus +-sqrt(2)
    p = umul(unipoly([Fraction(-1, 2), 1]), unipoly([-2, 0, 1]))
    roots = isolate_real_roots(p)
    assert len(roots) == 3
    assert roots[1] == Fraction(1, 2)
    assert isinstance(roots[0], RealAlgebraic) and isinstance(roots[2], RealAlgebraic)


def test_isolation_zero_poly_raises():
    with pytest.raises(PositiveDimensional):
        isolate_real_roots([0])


def test_no_real_roots():
    assert isolate_real_roots([1, 0, 1]) == []  # t^2 + 1


# -- RealAlgebraic ----------------------------------------------------------------


def test_real_algebraic_comparisons():
    a, b = isolate_real_roots(SQRT2_OVER_2)
    assert a.sign() == -1 and b.sign() == 1
    assert b > Fraction(7, 10)
    assert b < Fraction(71, 100)
    assert a < b
    assert not (a == b)


def test_real_algebraic_equality_across_polys():
    # sqrt(2)/2 as root of 2t^2-1 and of (2t^2-1)(t-3): equal values
    b1 = isolate_real_roots(SQRT2_OVER_2)[1]
    bigger = umul(SQRT2_OVER_2, unipoly([-3, 1]))
    b2 = [r for r in isolate_real_roots(bigger) if isinstance(r, RealAlgebraic) and r > 0][0]
    assert b1 == b2


def test_real_algebraic_exact_rational_detection():
    r = RealAlgebraic(unipoly([-1, 0, 1]), Fraction(1, 2), Fraction(3, 2))  # t^2-1 near 1
    assert r.exact_rational() == 1
    s = isolate_real_roots(SQRT2_OVER_2)[1]
    assert s.exact_rational() is None


def test_real_algebraic_refine_certificate():
    b = isolate_real_roots(SQRT2_OVER_2)[1]
    lo, hi = b.refine(Fraction(1, 10**12))
    assert hi - lo < Fraction(1, 10**12)
    assert lo < hi
    assert float(b) == pytest.approx(0.5**0.5, abs=1e-15)


# -- AlgebraicField -----------------------------------------------------------------


def field_sqrt2_over_2() -> AlgebraicField:
    return AlgebraicField(SQRT2_OVER_2, Fraction(1, 2), Fraction(1))


def test_field_arithmetic():
    F = field_sqrt2_over_2()
    beta = F.generator()
    assert F.mul(beta, beta) == (Fraction(1, 2),)
    assert F.mul(beta, F.inv(beta)) == (Fraction(1),)
    assert F.sign_of(unipoly([Fraction(-7, 10), 1])) == 1
    assert F.sign_of(unipoly([Fraction(-71, 100), 1])) == -1
    assert F.sign_of(F.sub(F.mul(beta, beta), F.constant(Fraction(1, 2)))) == 0


def test_field_split_on_zero_divisor():
    # modulus (2t^2-1)(t-3) tracking 1/sqrt(2); inverting (t-3) must split
    F = AlgebraicField(umul(SQRT2_OVER_2, unipoly([-3, 1])), Fraction(1, 2), Fraction(1))
    inv = F.inv(unipoly([-3, 1]))
    assert F.modulus == uprimitive(SQRT2_OVER_2)
    assert F.mul(inv, F.reduce(unipoly([-3, 1]))) == (Fraction(1),)


def test_field_zero_test_splits_and_reports():
    # (t-3) vanishes nowhere near beta; (2t^2-1) vanishes exactly
    F = AlgebraicField(umul(SQRT2_OVER_2, unipoly([-3, 1])), Fraction(1, 2), Fraction(1))
    assert F.sign_of(SQRT2_OVER_2) == 0
    assert F.sign_of(unipoly([-3, 1])) == -1


def test_field_inverting_zero_raises():
    F = field_sqrt2_over_2()
    with pytest.raises(ZeroDivisionError):
        F.inv(F.constant(0))
    with pytest.raises(ZeroDivisionError):
        F.inv(SQRT2_OVER_2)  # reduces to zero mod the modulus


def test_field_element_float():
    F = field_sqrt2_over_2()
    x = F.element_float(unipoly([1, 2]))  # 1 + 2*beta = 1 + sqrt(2)
    assert x == pytest.approx(1 + 2**0.5, rel=1e-12)


# -- FieldPoly and towers --------------------------------------------------------------


def test_field_poly_roots():
    # x^2 - beta^2 over Q(beta), beta = 1/sqrt(2): roots +-1/sqrt(2)
    F = field_sqrt2_over_2()
    h = FieldPoly(F, [uneg(F.mul(F.generator(), F.generator())), (), unipoly([1])])
    intervals = h.isolate_real_roots()
    assert len(intervals) == 2
    (a_lo, a_hi), (b_lo, b_hi) = intervals
    assert a_hi <= 0 <= b_lo or a_hi < b_lo


def test_tower_sign_and_zero():
    # beta = sqrt(2), x = 2^(1/4) as root of x^2 - beta
    G = AlgebraicField(unipoly([-2, 0, 1]), Fraction(1), Fraction(3, 2))
    H = FieldPoly(G, [uneg(G.generator()), (), unipoly([1])])
    T = TowerContext(H, Fraction(1), Fraction(5, 4))
    pt = AlgebraicPoint.with_tower(T)
    assert pt.evaluate(parse_poly("x^2 - 1")).sign() == 1
    assert pt.evaluate(parse_poly("x^4 - 2")).sign() == 0
    assert pt.evaluate(parse_poly("x - 2")).sign() == -1
    assert pt.x_float() == pytest.approx(2**0.25, rel=1e-12)
    assert pt.y_float() == pytest.approx(2**0.5, rel=1e-12)


# -- PointValue ----------------------------------------------------------------------


def test_point_value_square_rationalizes():
    F = field_sqrt2_over_2()
    v = PointValue.in_field(F, uscale(F.generator(), -2))  # -2*beta = -sqrt(2)
    assert v.sign() == -1
    assert v.as_rational() is None
    assert v.square_as_rational() == 2
    assert v.to_float() == pytest.approx(-(2**0.5), rel=1e-12)


def test_point_value_ring_ops():
    F = field_sqrt2_over_2()
    b = PointValue.in_field(F, F.generator())
    assert (b * b).as_rational() == Fraction(1, 2)
    assert (b + b - b * 2).sign() == 0
    assert (1 - b).sign() == 1
    assert (b - 1).sign() == -1
    assert (b**4).as_rational() == Fraction(1, 4)
    assert value_sign(b) == 1
    assert value_sign(Fraction(-3)) == -1
    assert value_float(Fraction(1, 2)) == 0.5


def test_point_value_mixed_field_tower():
    G = AlgebraicField(unipoly([-2, 0, 1]), Fraction(1), Fraction(3, 2))
    H = FieldPoly(G, [uneg(G.generator()), (), unipoly([1])])
    T = TowerContext(H, Fraction(1), Fraction(5, 4))
    x = PointValue.in_tower(T, FieldPoly.from_rational_coeffs(G, [0, 1]))
    beta = PointValue.in_field(G, G.generator())
    # x^2 = beta exactly
    assert (x * x - beta).sign() == 0
    assert (beta - x).sign() == 1  # sqrt(2) > 2^(1/4)


def test_algebraic_point_field_shape():
    # point (x, y) = (1 - beta, beta), beta = 1/sqrt(2)
    F = field_sqrt2_over_2()
    pt = AlgebraicPoint.with_field(F, unipoly([1, -1]))
    val = pt.evaluate(parse_poly("x + y"))  # (1 - beta) + beta = 1
    assert val.as_rational() == 1
    assert pt.y_float() == pytest.approx(0.5**0.5, rel=1e-12)
    assert pt.x_exact() is None


def test_algebraic_point_rational_shape():
    pt = AlgebraicPoint.rational(1, -1)
    assert pt.evaluate(parse_poly("x*y + 2")) == Fraction(1)
    assert pt.x_exact() == 1 and pt.y_exact() == -1


# -- resultants ------------------------------------------------------------------------


def test_sylvester_known_values():
    P = parse_poly("x - x^2*y - x*y^2 + y^3")
    Q = parse_poly("y - y^3")
    R = sylvester_resultant(P, Q, "x")
    # roots of R are exactly the equilibrium ordinates {0, +-1}
    assert set(isolate_real_roots(R)) == {Fraction(-1), Fraction(0), Fraction(1)}
    S = sylvester_resultant(P, Q, "y")
    assert set(isolate_real_roots(S)) == {Fraction(-1), Fraction(0), Fraction(1)}


def test_sylvester_constant_in_eliminated_var():
    # Q has no x: Res_x(P, Q) = Q^deg_x(P)
    P = parse_poly("x^2 + y")
    Q = parse_poly("y - 2")
    R = sylvester_resultant(P, Q, "x")
    assert uprimitive(R) == uprimitive(umul(unipoly([-2, 1]), unipoly([-2, 1])))


def test_sylvester_zero_input_raises():
    with pytest.raises(PositiveDimensional):
        sylvester_resultant(parse_poly("0"), parse_poly("x"), "x")


def test_resultant_agrees_with_common_root():
    # P = (x - y)(x + 2), Q = (x - y)(x - 3): share the line x = y
    P = parse_poly("(x - y)*(x + 2)")
    Q = parse_poly("(x - y)*(x - 3)")
    R = sylvester_resultant(P, Q, "x")
    # every y is a common-root ordinate, so the resultant vanishes
    assert R == ()


# -- property tests ----------------------------------------------------------------------

coeffs_strategy = st.lists(
    st.fractions(min_value=Fraction(-5), max_value=Fraction(5), max_denominator=4),
    min_size=1,
    max_size=5,
)


@settings(max_examples=50, deadline=None)
@given(coeffs_strategy, coeffs_strategy)
def test_udivmod_identity(a_c, b_c):
    a, b = unipoly(a_c), unipoly(b_c)
    if not b:
        return
    q, r = udivmod(a, b)
    n = max(len(a), len(umul(q, b)), len(r), 1)

    def pad(p):
        return tuple(p) + (Fraction(0),) * (n - len(p))

    assert tuple(x + y for x, y in zip(pad(umul(q, b)), pad(r))) == pad(a)
    assert len(r) < len(b) or not r


@settings(max_examples=30, deadline=None)
@given(coeffs_strategy)
def test_isolation_certificates(c):
    p = unipoly(c)
    if not p or len(p) == 1:
        return
    roots = isolate_real_roots(p)
    q = usquarefree(p)
    # every exact rational root evaluates to zero; intervals isolate one root
    for r in roots:
        if isinstance(r, Fraction):
            assert ueval(p, r) == 0
        else:
            lo, hi = r.interval
            assert count_roots(q, lo, hi) == 1
    # count matches a Sturm count over a full bound
    bound = cauchy_bound(q) + 2
    assert len(roots) == count_roots(q, -bound, bound)


@settings(max_examples=30, deadline=None)
@given(st.integers(-20, 20), st.integers(1, 10))
def test_field_sign_matches_float(num, den):
    F = field_sqrt2_over_2()
    q = Fraction(num, den * 2)
    s = F.sign_of(unipoly([-q, 1]))  # sign of beta - q
    expected = (0.5**0.5 > float(q)) - (0.5**0.5 < float(q))
    assert s == expected
