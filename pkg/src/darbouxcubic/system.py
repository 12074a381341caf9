"""Planar polynomial differential systems with exact rational coefficients.

A :class:`PlanarSystem` couples the two component polynomials of

    dx/dt = P(x, y),    dy/dt = Q(x, y)

with a lineage: the chain of coordinate transforms and time rescales that
produced it from the system the user supplied. The lineage is what lets a
trajectory computed in a blow-up chart be mapped back to the original
plane, and what records that a chart's clock runs at a rescaled (possibly
orientation-reversed) rate.

The module also finds all finite equilibria exactly. The strategy is
classical elimination: the resultant of P and Q with respect to x is a
univariate polynomial in y whose real roots contain every equilibrium
ordinate; for each root the x-coordinates are the common roots of the two
specialized polynomials, i.e. the roots of their gcd over Q or over the
root's number field. Every candidate is certified against the companion
resultant in the other variable before it is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebraic import (
    AlgebraicField,
    AlgebraicPoint,
    FieldPoly,
    PointValue,
    RealAlgebraic,
    TowerContext,
    UniPoly,
    isolate_real_roots,
    sylvester_resultant,
    uadd,
    ucompose,
    udegree,
    ueval,
    ugcd,
    uis_zero,
    umul,
    uneg,
    unipoly,
    uscale,
)
from .errors import NotDivisible, NotInvariant, PositiveDimensional, SolverIncomplete
from .poly import RationalPoly, Scalar, _coerce, divide_exact, parse_poly

Jacobian = tuple[tuple["Fraction | PointValue", ...], ...]


@dataclass(frozen=True)
class TransformRecord:
    """One step in a system's construction history.

    Attributes:
        kind: e.g. "chart_x", "chart_y", "time_rescale", "half_power_blowup".
        params: exact parameters of the step (stringified rationals and
            flags), sufficient to replay or invert it.
        parent: the (P, Q) component pair the step was applied to.
    """

    kind: str
    params: tuple[tuple[str, str], ...]
    parent: tuple[RationalPoly, RationalPoly]

    @classmethod
    def make(
        cls,
        kind: str,
        params: Mapping[str, object],
        parent: tuple[RationalPoly, RationalPoly],
    ) -> "TransformRecord":
        frozen = tuple(sorted((str(k), str(v)) for k, v in params.items()))
        return cls(kind, frozen, parent)

    def param(self, key: str) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class PlanarSystem:
    """An exact planar polynomial vector field.

    Attributes:
        p_comp: the first component P (rate of the first variable).
        q_comp: the second component Q (rate of the second variable).
        lineage: transform records from the originally supplied system to
            this one, oldest first.
    """

    p_comp: RationalPoly
    q_comp: RationalPoly
    lineage: tuple[TransformRecord, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.p_comp.variables != self.q_comp.variables:
            raise ValueError("components must share a variable pair")

    @property
    def variables(self) -> tuple[str, str]:
        return self.p_comp.variables

    def components(self) -> tuple[RationalPoly, RationalPoly]:
        return self.p_comp, self.q_comp

    def with_step(
        self,
        p_comp: RationalPoly,
        q_comp: RationalPoly,
        kind: str,
        params: Mapping[str, object],
    ) -> "PlanarSystem":
        record = TransformRecord.make(kind, params, (self.p_comp, self.q_comp))
        return PlanarSystem(p_comp, q_comp, self.lineage + (record,))

    def vector_field_exact(self, x: Scalar, y: Scalar) -> tuple[Fraction, Fraction]:
        return self.p_comp.eval_exact(x, y), self.q_comp.eval_exact(x, y)

    def vector_field_float(self, x: float, y: float) -> tuple[float, float]:
        return self.p_comp.eval_float(x, y), self.q_comp.eval_float(x, y)

    def jacobian_polys(self) -> tuple[tuple[RationalPoly, ...], ...]:
        x, y = self.variables
        return (
            (self.p_comp.diff(x), self.p_comp.diff(y)),
            (self.q_comp.diff(x), self.q_comp.diff(y)),
        )

    def jacobian_at(self, point: "AlgebraicPoint | tuple[Scalar, Scalar]") -> Jacobian:
        """The 2x2 Jacobian matrix evaluated exactly at a point.

        Entries are Fractions at rational points and :class:`PointValue`
        objects (exact sign queries, certified floats) at algebraic ones.
        """
        if not isinstance(point, AlgebraicPoint):
            point = AlgebraicPoint.rational(*point)
        rows = self.jacobian_polys()
        return tuple(tuple(point.evaluate(entry) for entry in row) for row in rows)

    def describe(self) -> dict:
        return {
            "variables": list(self.variables),
            "rates": [str(self.p_comp), str(self.q_comp)],
            "lineage": [
                {"kind": r.kind, "params": dict(r.params)} for r in self.lineage
            ],
        }

    def __str__(self) -> str:
        x, y = self.variables
        return f"d{x}/dt = {self.p_comp}; d{y}/dt = {self.q_comp}"


def system_from_strings(
    p_text: str,
    q_text: str,
    params: Mapping[str, Scalar] | None = None,
    variables: tuple[str, str] = ("x", "y"),
) -> PlanarSystem:
    return PlanarSystem(
        parse_poly(p_text, params, variables),
        parse_poly(q_text, params, variables),
    )


def family_two(p: Scalar) -> PlanarSystem:
    """The one-parameter cubic family under study.

        dx/dt = x - x^2 y + p x y^2 + y^3
        dy/dt = y + p y^3

    Its linear part at the origin is the identity, the lines y = 0 and
    y = +-x are invariant, and the whole equator of the compactified plane
    consists of a degenerate point pair plus two hyperbolic pairs.
    """
    value = _coerce(p)
    return system_from_strings(
        "x - x^2*y + p*x*y^2 + y^3",
        "y + p*y^3",
        {"p": value},
    )


# -- invariant lines and restrictions -------------------------------------------


def line_cofactor(system: PlanarSystem, line: RationalPoly) -> RationalPoly | None:
    """Cofactor of an affine line if it is invariant for the system.

    The line a*x + b*y + c is invariant exactly when its directional
    derivative along the vector field is a polynomial multiple of the line;
    the quotient (the cofactor) is returned, or None when not invariant.
    """
    if line.total_degree() != 1:
        raise ValueError("line_cofactor expects an affine line (degree 1)")
    x, y = system.variables
    derivative = line.diff(x) * system.p_comp + line.diff(y) * system.q_comp
    if derivative.is_zero:
        return RationalPoly.zero(system.variables)
    try:
        return divide_exact(derivative, line)
    except NotDivisible:
        return None


def restrict_to_line(
    system: PlanarSystem, line: RationalPoly
) -> tuple[UniPoly, UniPoly]:
    """Dynamics of the system restricted to an invariant affine line.

    The line is parametrized by whichever coordinate it is not constant
    in: for b != 0 the parameter is s = x with y = -(a s + c)/b, else
    s = y. Returns (rate, other) as univariate coefficient tuples in s:
    ds/dt = rate(s) along the line, and the remaining coordinate equals
    other(s).

    Raises:
        NotInvariant: the line is not invariant for the system.
    """
    if line_cofactor(system, line) is None:
        raise NotInvariant(f"{line} is not an invariant line of the system")
    x, y = system.variables
    a = line.coefficient((1, 0))
    b = line.coefficient((0, 1))
    c = line.coefficient((0, 0))
    if b:
        # parameter x; y = -(a x + c)/b
        other = unipoly([-c / b, -a / b])
        rate_poly = system.p_comp
        param_index = 0
    else:
        # parameter y; x = -c/a
        other = unipoly([-c / a])
        rate_poly = system.q_comp
        param_index = 1

    rate: UniPoly = ()
    for (i, j), coeff in rate_poly.terms.items():
        s_exp = (i, j)[param_index]
        o_exp = (i, j)[1 - param_index]
        mono = unipoly([0] * s_exp + [coeff])
        rate = uadd(rate, umul(mono, _upow(other, o_exp)))
    return rate, other


def _upow(base: UniPoly, n: int) -> UniPoly:
    out = unipoly([1])
    for _ in range(n):
        out = umul(out, base)
    return out


# -- finite equilibria -------------------------------------------------------------


def _specialize_rational(poly: RationalPoly, y0: Fraction) -> UniPoly:
    """poly(x, y0) as a univariate coefficient tuple in x."""
    deg = poly.degree_in(0)
    out = [Fraction(0)] * (deg + 1)
    for (i, j), c in poly.terms.items():
        out[i] += c * y0**j
    return unipoly(out)


def _specialize_field(poly: RationalPoly, fieldQ: AlgebraicField) -> FieldPoly:
    """poly(x, beta) as a polynomial in x over the field of beta."""
    deg = poly.degree_in(0)
    coeffs: list[UniPoly] = [() for _ in range(deg + 1)]
    gen_pows: list[UniPoly] = [fieldQ.constant(1)]
    for (i, j), c in poly.terms.items():
        while len(gen_pows) <= j:
            gen_pows.append(fieldQ.mul(gen_pows[-1], fieldQ.generator()))
        coeffs[i] = fieldQ.add(coeffs[i], uscale(gen_pows[j], c))
    return FieldPoly(fieldQ, coeffs)


def _certify_against(S: UniPoly, point: AlgebraicPoint) -> bool:
    """Check that the x-coordinate of the point is a root of S."""
    xv = point.x_value()
    if isinstance(xv, Fraction):
        return ueval(S, xv) == 0
    if xv.kind == "field":
        return xv.field.sign_of(ucompose(S, xv.elem)) == 0
    val = PointValue.in_tower(
        xv.tower, FieldPoly.from_rational_coeffs(xv.field, S)
    )
    return val.sign() == 0


def finite_equilibria(system: PlanarSystem) -> list[AlgebraicPoint]:
    """All finite equilibria of the system, exactly.

    Returns points sorted by (second coordinate, first coordinate). Points
    with irrational coordinates are returned in field or tower shape with
    certified isolating data.

    Raises:
        PositiveDimensional: the zero sets of P and Q share a curve, so the
            equilibria are not isolated points.
        SolverIncomplete: a candidate could not be certified; the partial
            list is attached to the exception.
    """
    P, Q = system.components()
    if P.is_zero and Q.is_zero:
        raise PositiveDimensional("both components vanish identically")
    if P.is_zero or Q.is_zero:
        lone = Q if P.is_zero else P
        if lone.is_constant:
            return []
        raise PositiveDimensional(
            "one component vanishes identically; equilibria form the zero "
            "set of the other"
        )
    R = sylvester_resultant(P, Q, 0)  # eliminate x -> roots in y
    S = sylvester_resultant(P, Q, 1)  # eliminate y -> roots in x
    if uis_zero(R) or uis_zero(S):
        raise PositiveDimensional("the components share a common curve")
    points: list[AlgebraicPoint] = []
    for y0 in isolate_real_roots(R):
        if isinstance(y0, Fraction):
            px = _specialize_rational(P, y0)
            qx = _specialize_rational(Q, y0)
            if uis_zero(px) and uis_zero(qx):
                raise PositiveDimensional(
                    f"the horizontal line at {y0} consists of equilibria"
                )
            g = ugcd(px, qx)
            if udegree(g) < 1:
                continue  # spurious elimination root: no common x here
            for x0 in isolate_real_roots(g):
                if isinstance(x0, Fraction):
                    points.append(AlgebraicPoint.rational(x0, y0))
                else:
                    fld = AlgebraicField.from_real(x0)
                    points.append(
                        AlgebraicPoint.with_field(fld, [y0], algebraic_index=0)
                    )
        else:
            fld = AlgebraicField.from_real(y0)
            pf = _specialize_field(P, fld)
            qf = _specialize_field(Q, fld)
            if pf.normalized_nonzero().is_zero and qf.normalized_nonzero().is_zero:
                raise PositiveDimensional(
                    "a horizontal line at an algebraic ordinate consists of "
                    "equilibria"
                )
            if pf.normalized_nonzero().is_zero:
                g = qf.monic()
            elif qf.normalized_nonzero().is_zero:
                g = pf.monic()
            else:
                g = pf.gcd(qf)
            if g.degree < 1:
                continue
            if g.degree == 1:
                # x = -c0 / c1 expressed inside the field
                c0, c1 = g.coeffs[0], g.coeffs[1]
                x_expr = fld.mul(uneg(c0), fld.inv(c1))
                points.append(AlgebraicPoint.with_field(fld, x_expr, algebraic_index=1))
            else:
                for lo, hi in g.isolate_real_roots():
                    points.append(AlgebraicPoint.with_tower(TowerContext(g, lo, hi)))
    certified: list[AlgebraicPoint] = []
    failed: list[AlgebraicPoint] = []
    for pt in points:
        try:
            ok = _certify_against(S, pt)
        except RuntimeError:
            ok = False
        (certified if ok else failed).append(pt)
    if failed:
        err = SolverIncomplete(
            f"{len(failed)} candidate equilibria failed cross-certification"
        )
        err.partial = certified
        raise err
    certified.sort(key=lambda pt: (pt.y_float(1e-15), pt.x_float(1e-15)))
    return certified


def equilibrium_count_is(system: PlanarSystem, expected: int) -> bool:
    return len(finite_equilibria(system)) == expected
