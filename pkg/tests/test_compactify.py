"""Charts at infinity and equator equilibria.

Oracle values below were derived by hand from the chart formulas:
with P = x + P3, Q = y + Q3 the first chart (u = y/x, z = 1/x) gives,
after the z^2 time rescale,

    du/dt = Q3(1,u) - u*P3(1,u),   dz/dt = -z*(z^2 + P3(1,u)),

and the second chart (v = x/y, z = 1/y) swaps the roles of P3 and Q3.
"""

from fractions import Fraction

import pytest

from darbouxcubic.algebraic import value_float, value_sign
from darbouxcubic.compactify import chart_x, chart_y, equator_equilibria, star_cubic_parts
from darbouxcubic.errors import ShapeError
from darbouxcubic.poly import parse_poly
from darbouxcubic.system import PlanarSystem, family_two, system_from_strings


def test_star_cubic_parts_family():
    p3, q3 = star_cubic_parts(family_two(Fraction(1, 2)))
    assert p3 == parse_poly("-x^2*y + 1/2*x*y^2 + y^3")
    assert q3 == parse_poly("1/2*y^3")


def test_star_cubic_parts_zero_cubic_is_allowed():
    p3, q3 = star_cubic_parts(system_from_strings("x", "y + y^3"))
    assert p3.is_zero
    assert q3 == parse_poly("y^3")


@pytest.mark.parametrize(
    "p_str, q_str",
    [
        ("x + x^2", "y"),  # quadratic contamination
        ("x + y^4", "y"),  # quartic contamination
        ("2*x + y^3", "y"),  # wrong linear part
        ("x + y^3", "y + x"),  # linear cross term in second component
    ],
)
def test_star_cubic_parts_rejects_wrong_shape(p_str, q_str):
    with pytest.raises(ShapeError):
        star_cubic_parts(system_from_strings(p_str, q_str))


@pytest.mark.parametrize("p", [-2, -1, 0, 1, 2, Fraction(1, 2)])
def test_chart_x_family(p):
    cx = chart_x(family_two(p))
    u_rate = parse_poly("u^2 - u^4", variables=("u", "z"))
    z_rate = parse_poly(
        "-z^3 + u*z - p*u^2*z - u^3*z", variables=("u", "z"), params={"p": p}
    )
    assert cx.p_comp == u_rate
    assert cx.q_comp == z_rate


def test_chart_x_lineage():
    cx = chart_x(family_two(1))
    kinds = [rec.kind for rec in cx.lineage]
    assert kinds[-1] == "chart_x"
    last = cx.lineage[-1]
    assert last.param("substitution") == "u=y/x, z=1/x"
    assert last.param("time_rescale") == "z^2"


@pytest.mark.parametrize("p", [-2, 0, Fraction(1, 2), 3])
def test_chart_y_family(p):
    cy = chart_y(family_two(p))
    assert cy.p_comp == parse_poly("1 - v^2", variables=("v", "z"))
    assert cy.q_comp == parse_poly(
        "-z^3 - p*z", variables=("v", "z"), params={"p": p}
    )


def test_chart_x_star_cubic():
    cx = chart_x(system_from_strings("x + x^3", "y + y^3"))
    assert cx.p_comp == parse_poly("u^3 - u", variables=("u", "z"))
    assert cx.q_comp == parse_poly("-z^3 - z", variables=("u", "z"))


class TestEquatorFamily:
    """The family has exactly three equator directions, all in chart one."""

    def setup_method(self):
        self.points = equator_equilibria(family_two(3))

    def test_three_points_all_chart_x(self):
        assert len(self.points) == 3
        assert all(pt.chart == "x" for pt in self.points)

    def test_sorted_by_direction(self):
        us = [pt.point.x_exact() for pt in self.points]
        assert us == [Fraction(-1), Fraction(0), Fraction(1)]

    def test_origin_direction_is_linearly_zero(self):
        o0 = self.points[1]
        assert o0.linearly_zero
        assert all(e == 0 for row in o0.jacobian for e in row)

    def test_outer_jacobians(self):
        o2, _, o1 = self.points
        assert o1.jacobian == ((Fraction(-2), Fraction(0)), (Fraction(0), Fraction(-3)))
        assert o2.jacobian == ((Fraction(2), Fraction(0)), (Fraction(0), Fraction(-3)))

    def test_describe_is_serializable(self):
        import json

        for pt in self.points:
            json.dumps(pt.describe())


def test_vertical_direction_included_when_needed():
    # First component x has zero cubic part, so P3(0,1) = 0 and the
    # vertical direction v = 0 is an equator equilibrium in chart two.
    pts = equator_equilibria(system_from_strings("x", "y + y^3"))
    charts = [pt.chart for pt in pts]
    assert charts.count("y") == 1
    vert = [pt for pt in pts if pt.chart == "y"][0]
    assert vert.point.x_exact() == 0 and vert.point.y_exact() == 0
    assert vert.jacobian == ((Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1)))


def test_equator_directions_for_star_cubic():
    # x*Q3 - y*P3 = x*y*(y - x)*(y + x): four directions, one of them vertical
    pts = equator_equilibria(system_from_strings("x + x^3", "y + y^3"))
    assert [pt.chart for pt in pts] == ["x", "x", "x", "y"]
    assert [pt.point.x_exact() for pt in pts] == [-1, 0, 1, 0]
    # here u = 0 is hyperbolic, not linearly zero
    assert not pts[1].linearly_zero
    assert pts[1].jacobian == ((Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1)))


def test_irrational_equator_directions():
    # du/dt = Q3(1,u) - u*P3(1,u) = u^2 - 2 with P3 = 0, Q3 = -2x^3 + x*y^2
    pts = equator_equilibria(system_from_strings("x", "y - 2*x^3 + x*y^2"))
    xs = [pt for pt in pts if pt.chart == "x"]
    ys = [pt for pt in pts if pt.chart == "y"]
    assert len(xs) == 2 and len(ys) == 1
    floats = sorted(pt.point.x_float() for pt in xs)
    assert abs(floats[0] + 2 ** 0.5) < 1e-12
    assert abs(floats[1] - 2 ** 0.5) < 1e-12
    for pt in xs:
        # J = [[2u, 0], [0, 0]] at (u, 0): exact sign of the irrational entry
        assert value_sign(pt.jacobian[0][0]) == (1 if pt.point.x_float() > 0 else -1)
        assert value_sign(pt.jacobian[0][1]) == 0
        assert value_sign(pt.jacobian[1][1]) == 0
        assert not pt.linearly_zero


def test_charts_preserve_variable_names():
    cx = chart_x(family_two(1))
    cy = chart_y(family_two(1))
    assert cx.variables == ("u", "z")
    assert cy.variables == ("v", "z")
