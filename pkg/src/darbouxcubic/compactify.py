"""Compactification of cubic planar systems onto the Poincaré disk.

For a polynomial system whose linear part at the origin is the identity and
whose nonlinear part is homogeneous cubic,

    dx/dt = x + P3(x, y),    dy/dt = y + Q3(x, y),

the behavior at infinity is read off in two affine charts on the sphere:

    chart covering x != 0:  u = y/x,  z = 1/x
    chart covering y != 0:  v = x/y,  z = 1/y

After clearing the pole with the positive time rescale d(tau) = z^-2 dt,
the first chart becomes

    du/dtau = Q3(1, u) - u * P3(1, u)
    dz/dtau = -z * (z^2 + P3(1, u))

and symmetrically for the second chart with the roles of P3 and Q3
exchanged. Points on the equator z = 0 with du/dtau = 0 are the directions
along which orbits can escape to (or arrive from) infinity; their Jacobians
decide the local structure, and linearly-zero ones are handed to the
blow-up machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebraic import (
    AlgebraicField,
    AlgebraicPoint,
    RealAlgebraic,
    isolate_real_roots,
)
from .errors import ShapeError
from .poly import RationalPoly
from .system import Jacobian, PlanarSystem


def star_cubic_parts(system: PlanarSystem) -> tuple[RationalPoly, RationalPoly]:
    """Validate the identity-plus-cubic shape and return (P3, Q3).

    Raises:
        ShapeError: the system is not of the form
            (x + cubic, y + cubic) with both cubics homogeneous of degree 3
            (either may be zero).
    """
    x, y = system.variables
    x_poly = RationalPoly.var(x, system.variables)
    y_poly = RationalPoly.var(y, system.variables)
    p3 = system.p_comp - x_poly
    q3 = system.q_comp - y_poly
    for name, part in (("first", p3), ("second", q3)):
        comps = part.homogeneous_components()
        if any(d != 3 for d in comps):
            raise ShapeError(
                f"{name} component must be its variable plus a homogeneous "
                f"cubic; found extra degrees {sorted(set(comps) - {3})}"
            )
    return p3, q3


def _restrict_first_to_one(cubic: RationalPoly, out_var: str) -> RationalPoly:
    """P3(1, s) as a polynomial in the chart variables (s, z)."""
    out_vars = (out_var, "z")
    acc = RationalPoly.zero(out_vars)
    for (_, j), c in cubic.terms.items():
        acc = acc + RationalPoly.monomial(c, (j, 0), out_vars)
    return acc


def _restrict_second_to_one(cubic: RationalPoly, out_var: str) -> RationalPoly:
    """P3(s, 1) as a polynomial in the chart variables (s, z)."""
    out_vars = (out_var, "z")
    acc = RationalPoly.zero(out_vars)
    for (i, _), c in cubic.terms.items():
        acc = acc + RationalPoly.monomial(c, (i, 0), out_vars)
    return acc


def chart_x(system: PlanarSystem) -> PlanarSystem:
    """The infinity chart covering directions with x != 0, in (u, z).

    Time is rescaled by z^2 (positive away from the equator), which the
    lineage records.
    """
    p3, q3 = star_cubic_parts(system)
    uv = ("u", "z")
    p3_u = _restrict_first_to_one(p3, "u")  # P3(1, u)
    q3_u = _restrict_first_to_one(q3, "u")  # Q3(1, u)
    u_poly = RationalPoly.var("u", uv)
    z_poly = RationalPoly.var("z", uv)
    u_rate = q3_u - u_poly * p3_u
    z_rate = -z_poly * (z_poly * z_poly + p3_u)
    return system.with_step(
        u_rate,
        z_rate,
        "chart_x",
        {"substitution": "u=y/x, z=1/x", "time_rescale": "z^2"},
    )


def chart_y(system: PlanarSystem) -> PlanarSystem:
    """The infinity chart covering directions with y != 0, in (v, z)."""
    p3, q3 = star_cubic_parts(system)
    vv = ("v", "z")
    p3_v = _restrict_second_to_one(p3, "v")  # P3(v, 1)
    q3_v = _restrict_second_to_one(q3, "v")  # Q3(v, 1)
    v_poly = RationalPoly.var("v", vv)
    z_poly = RationalPoly.var("z", vv)
    v_rate = p3_v - v_poly * q3_v
    z_rate = -z_poly * (z_poly * z_poly + q3_v)
    return system.with_step(
        v_rate,
        z_rate,
        "chart_y",
        {"substitution": "v=x/y, z=1/y", "time_rescale": "z^2"},
    )


@dataclass
class EquatorPoint:
    """A direction at infinity where the chart flow has an equilibrium.

    Attributes:
        chart: "x" or "y" (which chart the coordinates live in).
        point: the chart coordinates (first coordinate is u or v, second
            is z = 0).
        jacobian: exact 2x2 Jacobian of the chart system at the point.
        linearly_zero: True when the Jacobian vanishes identically, i.e.
            the point needs a blow-up.
    """

    chart: str
    point: AlgebraicPoint
    jacobian: Jacobian
    linearly_zero: bool

    def describe(self) -> dict:
        from .algebraic import PointValue

        def entry(e):
            return str(e) if isinstance(e, Fraction) else e.describe()

        return {
            "chart": self.chart,
            "point": self.point.describe(),
            "jacobian": [[entry(e) for e in row] for row in self.jacobian],
            "linearly_zero": self.linearly_zero,
        }


def _is_zero_matrix(jac: Jacobian) -> bool:
    from .algebraic import value_sign

    return all(value_sign(e) == 0 for row in jac for e in row)


def equator_equilibria(system: PlanarSystem) -> list[EquatorPoint]:
    """All equilibria on the equator of the Poincaré disk, exactly.

    Directions with x != 0 are found as roots of the first chart's u-rate
    restricted to z = 0; the vertical direction pair is checked separately
    in the second chart at v = 0. Antipodal directions are reported once
    (the charts identify them). Points are sorted by u ascending, with the
    vertical direction (if present) last.
    """
    cx = chart_x(system)
    cy = chart_y(system)
    out: list[EquatorPoint] = []
    # roots of du/dtau on z = 0
    u_rate_at_equator = RationalPoly.zero(("u", "z"))
    for (i, j), c in cx.p_comp.terms.items():
        if j == 0:
            u_rate_at_equator = u_rate_at_equator + RationalPoly.monomial(c, (i, 0), ("u", "z"))
    if u_rate_at_equator.is_zero:
        roots: list = []
    else:
        roots = isolate_real_roots(u_rate_at_equator.univariate_coeffs("u"))
    for u0 in roots:
        if isinstance(u0, Fraction):
            pt = AlgebraicPoint.rational(u0, 0)
        else:
            fld = AlgebraicField.from_real(u0)
            pt = AlgebraicPoint.with_field(fld, [0], algebraic_index=0)
        jac = cx.jacobian_at(pt)
        out.append(EquatorPoint("x", pt, jac, _is_zero_matrix(jac)))
    # the vertical direction: v = 0 in the second chart
    v_rate_at_origin = cy.p_comp.eval_exact(0, 0)
    if v_rate_at_origin == 0:
        pt = AlgebraicPoint.rational(0, 0)
        jac = cy.jacobian_at(pt)
        out.append(EquatorPoint("y", pt, jac, _is_zero_matrix(jac)))
    return out
