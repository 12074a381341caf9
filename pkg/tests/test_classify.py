"""Linear and center-manifold classification.

The semi-hyperbolic oracles were computed by hand. For the one-parameter
cubic family in the first directional chart, the direction points
(1, 0) and (-1, 0) at p = 0 carry Jacobians diag(-2, 0) and diag(2, 0);
the center manifold there is w = 0 itself and the reduced equation is a
cubic, giving a stable node and a saddle respectively.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxcubic.classify import (
    ClassificationTag,
    classify_equilibrium,
    classify_finite_equilibria,
    classify_linear,
    classify_semihyperbolic,
)
from darbouxcubic.compactify import chart_x, chart_y
from darbouxcubic.errors import UndeterminedAtOrder, UnsupportedPoint
from darbouxcubic.poly import RationalPoly
from darbouxcubic.system import PlanarSystem, family_two, finite_equilibria, system_from_strings

F = Fraction


def mat(a, b, c, d):
    return ((F(a), F(b)), (F(c), F(d)))


class TestClassifyLinear:
    def test_saddle(self):
        tag = classify_linear(mat(1, 0, 0, -2))
        assert tag.category == "saddle" and tag.stability is None

    def test_stable_node(self):
        assert str(classify_linear(mat(-1, 0, 0, -3))) == "stable node"

    def test_unstable_node(self):
        assert str(classify_linear(mat(3, 1, 0, 1))) == "unstable node"

    def test_stable_focus(self):
        tag = classify_linear(mat(0, 1, -1, -1))
        assert str(tag) == "stable focus"

    def test_linear_center_has_caveat(self):
        tag = classify_linear(mat(0, 1, -1, 0))
        assert tag.category == "center (linear)"
        assert tag.caveat is not None

    def test_star_node(self):
        tag = classify_linear(mat(2, 0, 0, 2))
        assert str(tag) == "unstable star node"

    def test_degenerate_node(self):
        tag = classify_linear(mat(1, 1, 0, 1))
        assert str(tag) == "unstable degenerate node"

    def test_semi_hyperbolic(self):
        tag = classify_linear(mat(-2, 0, 0, 0))
        assert tag.category == "semi-hyperbolic"

    def test_nilpotent(self):
        tag = classify_linear(mat(0, 1, 0, 0))
        assert tag.category == "nilpotent"

    def test_linearly_zero(self):
        tag = classify_linear(mat(0, 0, 0, 0))
        assert tag.category == "linearly zero"

    def test_triangular_matrices_report_eigenvalues(self):
        tag = classify_linear(mat(-1, 5, 0, -2))
        assert tag.evidence["eigenvalues"] == ["-1", "-2"]


@given(
    lam1=st.integers(-9, 9).filter(lambda v: v != 0),
    lam2=st.integers(-9, 9).filter(lambda v: v != 0),
    t=st.tuples(
        st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4)
    ).filter(lambda t: t[0] * t[3] - t[1] * t[2] != 0),
)
def test_linear_verdict_is_conjugation_invariant(lam1, lam2, t):
    # conjugating diag(lam1, lam2) preserves eigenvalues, hence the verdict
    a, b, c, d = (F(v) for v in t)
    det = a * d - b * c
    j = (
        (
            (a * lam1 * d - b * lam2 * c) / det,
            (b * a * (lam2 - lam1)) / det,
        ),
        (
            (c * d * (lam1 - lam2)) / det,
            (a * lam2 * d - b * lam1 * c) / det,
        ),
    )
    tag = classify_linear(j)
    if lam1 * lam2 < 0:
        assert tag.category == "saddle"
    else:
        assert tag.category in ("node", "star node", "degenerate node")
        expected = "stable" if lam1 < 0 else "unstable"
        assert tag.stability == expected


class TestFamilyDirectionPoints:
    """Equator directions (1, 0) and (-1, 0) of the first chart."""

    def test_p_zero_chart_x(self):
        cx = chart_x(family_two(0))
        t1 = classify_semihyperbolic(cx, (1, 0))
        t2 = classify_semihyperbolic(cx, (-1, 0))
        assert str(t1) == "stable node"
        assert t1.evidence["leading_order"] == 3
        assert t1.evidence["hyperbolic_eigenvalue"] == "-2"
        assert str(t2) == "saddle"
        assert t2.evidence["leading_order"] == 3
        assert t2.evidence["hyperbolic_eigenvalue"] == "2"

    def test_p_zero_chart_y(self):
        cy = chart_y(family_two(0))
        assert str(classify_semihyperbolic(cy, (1, 0))) == "stable node"
        assert str(classify_semihyperbolic(cy, (-1, 0))) == "saddle"

    @pytest.mark.parametrize(
        "p, cat1, cat2",
        [
            (1, "stable node", "saddle"),
            (2, "stable star node", "saddle"),
            (F(-1, 2), "saddle", "unstable node"),
            (-2, "saddle", "unstable star node"),
        ],
    )
    def test_nonzero_p_is_hyperbolic(self, p, cat1, cat2):
        cx = chart_x(family_two(p))
        assert str(classify_linear(cx.jacobian_at((1, 0)))) == cat1
        assert str(classify_linear(cx.jacobian_at((-1, 0)))) == cat2


class TestSemiHyperbolic:
    def test_even_order_saddle_node(self):
        sn = system_from_strings("x^2", "-y")
        tag = classify_semihyperbolic(sn, (0, 0))
        assert tag.category == "saddle-node"
        assert tag.evidence["leading_order"] == 2

    def test_mixed_coordinates_saddle_node(self):
        # manifold x = y^2 + ..., reduced rate y^2
        tag = classify_semihyperbolic(system_from_strings("-x + y^2", "y^2"), (0, 0))
        assert tag.category == "saddle-node"
        assert tag.evidence["leading_order"] == 2
        assert tag.evidence["manifold_coeffs"] != {}

    def test_full_matrix_saddle_node(self):
        # J = [[0, 0], [1, -1]]; manifold tangent to x = y, reduced rate c^2
        tag = classify_semihyperbolic(system_from_strings("x*y", "x - y"), (0, 0))
        assert tag.category == "saddle-node"
        assert tag.evidence["leading_order"] == 2

    def test_odd_order_node_and_saddle(self):
        assert str(classify_semihyperbolic(system_from_strings("-x", "-y^3"), (0, 0))) == "stable node"
        assert str(classify_semihyperbolic(system_from_strings("x", "y^3"), (0, 0))) == "unstable node"
        assert str(classify_semihyperbolic(system_from_strings("-x", "y^3"), (0, 0))) == "saddle"
        assert str(classify_semihyperbolic(system_from_strings("x", "-y^3"), (0, 0))) == "saddle"

    def test_translated_point(self):
        sys = system_from_strings("x^2 - 2*x + 1", "-y + 2")
        tag = classify_semihyperbolic(sys, (1, 2))
        assert tag.category == "saddle-node"

    def test_line_of_equilibria_is_undetermined(self):
        with pytest.raises(UndeterminedAtOrder):
            classify_semihyperbolic(system_from_strings("-x", "0"), (0, 0))

    def test_hyperbolic_point_rejected(self):
        with pytest.raises(UnsupportedPoint):
            classify_semihyperbolic(system_from_strings("-x", "y"), (0, 0))

    def test_non_equilibrium_rejected(self):
        with pytest.raises(UnsupportedPoint):
            classify_semihyperbolic(system_from_strings("-x + 1", "y^2"), (0, 0))

    def test_irrational_point_rejected(self):
        pts = finite_equilibria(family_two(-2))
        irrational = [pt for pt in pts if pt.x_exact() is None][0]
        with pytest.raises(UnsupportedPoint):
            classify_semihyperbolic(family_two(-2), irrational)


@given(
    lam=st.integers(-6, 6).filter(lambda v: v != 0),
    a=st.integers(-6, 6).filter(lambda v: v != 0),
    m=st.integers(2, 5),
    t=st.tuples(
        st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)
    ).filter(lambda t: t[0] * t[3] - t[1] * t[2] != 0),
    shift=st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
)
@settings(deadline=None)
def test_semihyperbolic_verdict_is_coordinate_invariant(lam, a, m, t, shift):
    """Conjugate (lam*x, a*y^m) by an invertible matrix and a translation;
    the center-manifold verdict must not change."""
    t00, t01, t10, t11 = (F(v) for v in t)
    det = t00 * t11 - t01 * t10
    x0, y0 = (F(v) for v in shift)
    xy = ("x", "y")
    x_var = RationalPoly.var("x", xy)
    y_var = RationalPoly.var("y", xy)
    # coordinates of T^{-1} ((x, y) - (x0, y0))
    xs = ((x_var - x0) * t11 - (y_var - y0) * t01) * (1 / det)
    ys = ((x_var - x0) * (-t10) + (y_var - y0) * t00) * (1 / det)
    g1 = xs * lam
    g2 = ys**m * a
    sys = PlanarSystem(g1 * t00 + g2 * t01, g1 * t10 + g2 * t11)
    tag = classify_semihyperbolic(sys, (x0, y0))
    if m % 2 == 0:
        assert tag.category == "saddle-node"
    elif (a > 0) == (lam > 0):
        assert tag.category == "node"
        assert tag.stability == ("stable" if lam < 0 else "unstable")
    else:
        assert tag.category == "saddle"


class TestClassifyEquilibrium:
    def test_semi_hyperbolic_is_refined(self):
        cx = chart_x(family_two(0))
        pts = finite_equilibria(cx)
        by_u = {pt.x_exact(): pt for pt in pts}
        eq = classify_equilibrium(cx, by_u[F(1)])
        assert str(eq.tag) == "stable node"
        assert eq.tag.evidence["leading_order"] == 3

    def test_undetermined_keeps_linear_tag(self):
        # the y-axis is a line of equilibria; classify one point directly
        from darbouxcubic.algebraic import AlgebraicPoint

        sys = system_from_strings("-x", "0")
        pt = AlgebraicPoint.rational(F(0), F(0))
        eq = classify_equilibrium(sys, pt)
        assert eq.tag.category == "semi-hyperbolic"
        assert "order" in eq.tag.caveat

    def test_family_origin(self):
        eqs = classify_finite_equilibria(family_two(2))
        assert len(eqs) == 1
        assert str(eqs[0].tag) == "unstable star node"

    def test_family_irrational_points(self):
        tags = [str(e.tag) for e in classify_finite_equilibria(family_two(-2))]
        assert tags == [
            "stable node",
            "saddle",
            "unstable star node",
            "saddle",
            "stable node",
        ]

    def test_describe_serializable(self):
        import json

        for e in classify_finite_equilibria(family_two(-4)):
            json.dumps(e.describe())
