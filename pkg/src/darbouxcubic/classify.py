"""Exact classification of equilibrium points.

Linear classification works from exact signs of the determinant, trace,
and discriminant of the Jacobian, so it is correct even when the matrix
entries are irrational algebraic numbers. Semi-hyperbolic points (one zero
eigenvalue, one nonzero) are refined through a center-manifold reduction
with undetermined coefficients: the manifold s = phi(c) is computed order
by order, the flow is restricted to it, and the leading term c^m of the
reduced equation decides the picture:

    * m even: saddle-node;
    * m odd with the leading coefficient and the nonzero eigenvalue of the
      same sign: node (stable when that eigenvalue is negative);
    * m odd with opposite signs: saddle.

The reduction requires exact translation and diagonalization, so it is
implemented for points with rational coordinates; algebraic semi-hyperbolic
points keep their linear tag with a caveat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import AlgebraicPoint, PointValue, value_sign
from .errors import UndeterminedAtOrder, UnsupportedPoint
from .poly import RationalPoly, Scalar, _coerce
from .system import Jacobian, PlanarSystem


@dataclass
class ClassificationTag:
    """The verdict for one equilibrium.

    Attributes:
        category: "node", "saddle", "focus", "star node", "degenerate node",
            "center (linear)", "saddle-node", "semi-hyperbolic",
            "nilpotent", or "linearly zero".
        stability: "stable", "unstable", or None when not applicable
            (saddles, centers, undecided categories).
        evidence: exact quantities behind the verdict (strings for exact
            rationals, floats for certified approximations).
        caveat: honest limitation note, e.g. a linear center that nonlinear
            terms could perturb.
    """

    category: str
    stability: str | None = None
    evidence: dict = field(default_factory=dict)
    caveat: str | None = None

    @property
    def is_hyperbolic(self) -> bool:
        return self.category in ("node", "saddle", "focus", "star node", "degenerate node")

    def describe(self) -> dict:
        out = {"category": self.category, "stability": self.stability, "evidence": self.evidence}
        if self.caveat:
            out["caveat"] = self.caveat
        return out

    def __str__(self) -> str:
        return f"{self.stability} {self.category}" if self.stability else self.category


def _evidence_value(v: "Fraction | PointValue") -> "str | float":
    if isinstance(v, PointValue):
        return v.to_float(1e-12)
    return str(v)


def classify_linear(jac: Jacobian) -> ClassificationTag:
    """Classification from the Jacobian alone, by exact sign analysis.

    Hyperbolic cases are definitive. A linear center gets a caveat (cubic
    terms can make it a focus); zero-determinant cases are labeled
    "semi-hyperbolic" / "nilpotent" / "linearly zero" for downstream
    refinement.
    """
    (a, b), (c, d) = jac
    det = a * d - b * c
    tr = a + d
    disc = tr * tr - 4 * det
    s_det, s_tr, s_disc = value_sign(det), value_sign(tr), value_sign(disc)
    evidence = {
        "determinant": _evidence_value(det),
        "trace": _evidence_value(tr),
        "discriminant": _evidence_value(disc),
    }
    if value_sign(b) == 0 or value_sign(c) == 0:
        evidence["eigenvalues"] = [_evidence_value(a), _evidence_value(d)]
    if s_det < 0:
        return ClassificationTag("saddle", None, evidence)
    if s_det > 0:
        stability = "stable" if s_tr < 0 else "unstable"
        if s_tr == 0:
            return ClassificationTag(
                "center (linear)",
                None,
                evidence,
                caveat="linear center: nonlinear terms may produce a focus",
            )
        if s_disc < 0:
            return ClassificationTag("focus", stability, evidence)
        if s_disc > 0:
            return ClassificationTag("node", stability, evidence)
        # repeated eigenvalue: star when the matrix is already diagonal
        if value_sign(b) == 0 and value_sign(c) == 0:
            return ClassificationTag("star node", stability, evidence)
        return ClassificationTag("degenerate node", stability, evidence)
    # zero determinant
    if all(value_sign(e) == 0 for row in jac for e in row):
        return ClassificationTag("linearly zero", None, evidence)
    if s_tr != 0:
        return ClassificationTag(
            "semi-hyperbolic",
            None,
            evidence,
            caveat="one zero eigenvalue: center-manifold reduction needed",
        )
    return ClassificationTag(
        "nilpotent", None, evidence, caveat="nilpotent linear part: not resolved here"
    )


def _rational_jacobian(jac: Jacobian) -> tuple[tuple[Fraction, ...], ...] | None:
    rows = []
    for row in jac:
        out = []
        for e in row:
            if isinstance(e, PointValue):
                r = e.as_rational()
                if r is None:
                    return None
                out.append(r)
            else:
                out.append(_coerce(e))
        rows.append(tuple(out))
    return tuple(rows)


def classify_semihyperbolic(
    system: PlanarSystem,
    point: "AlgebraicPoint | tuple[Scalar, Scalar]",
    max_order: int = 8,
) -> ClassificationTag:
    """Refine a semi-hyperbolic equilibrium via center-manifold reduction.

    Args:
        system: the ambient system.
        point: the equilibrium; must have rational coordinates.
        max_order: highest order of the manifold expansion to try.

    Returns:
        A tag with category "node", "saddle", or "saddle-node", carrying
        the reduction data (eigenvalue, leading order and coefficient, the
        manifold expansion) in its evidence.

    Raises:
        UnsupportedPoint: the point has irrational coordinates, or its
            Jacobian is not semi-hyperbolic.
        UndeterminedAtOrder: the reduced equation vanishes through
            max_order.
    """
    if isinstance(point, AlgebraicPoint):
        x0, y0 = point.x_exact(), point.y_exact()
        if x0 is None or y0 is None:
            raise UnsupportedPoint(
                "center-manifold reduction needs rational coordinates"
            )
    else:
        x0, y0 = _coerce(point[0]), _coerce(point[1])
    vars_ = system.variables
    x_poly = RationalPoly.var(vars_[0], vars_)
    y_poly = RationalPoly.var(vars_[1], vars_)
    p_shift = system.p_comp.compose(x_poly + x0, y_poly + y0)
    q_shift = system.q_comp.compose(x_poly + x0, y_poly + y0)
    if p_shift.coefficient((0, 0)) != 0 or q_shift.coefficient((0, 0)) != 0:
        raise UnsupportedPoint("the point is not an equilibrium")
    a = p_shift.coefficient((1, 0))
    b = p_shift.coefficient((0, 1))
    c = q_shift.coefficient((1, 0))
    d = q_shift.coefficient((0, 1))
    det = a * d - b * c
    lam = a + d
    if det != 0 or lam == 0:
        raise UnsupportedPoint(
            "semi-hyperbolic reduction needs eigenvalues 0 and lambda != 0"
        )
    # eigenvectors: v0 for 0, v1 for lambda (rows of J are proportional)
    v0 = (b, -a) if (a, b) != (0, 0) else (d, -c)
    v1 = (b, lam - a) if (b, lam - a) != (0, 0) else (lam - d, c)
    det_t = v0[0] * v1[1] - v1[0] * v0[1]
    if det_t == 0:
        raise UnsupportedPoint("eigenvector basis is degenerate")
    cs = ("c", "s")
    c_var = RationalPoly.var("c", cs)
    s_var = RationalPoly.var("s", cs)
    x_of = c_var * v0[0] + s_var * v1[0]
    y_of = c_var * v0[1] + s_var * v1[1]
    p_sub = p_shift.compose(x_of, y_of)
    q_sub = q_shift.compose(x_of, y_of)
    c_rate = (p_sub * v1[1] - q_sub * v1[0]) * (1 / det_t)
    s_rate = (p_sub * (-v0[1]) + q_sub * v0[0]) * (1 / det_t)
    # sanity of the diagonalization
    assert c_rate.coefficient((1, 0)) == 0 and c_rate.coefficient((0, 1)) == 0
    assert s_rate.coefficient((1, 0)) == 0 and s_rate.coefficient((0, 1)) == lam

    phi = RationalPoly.zero(cs)  # s = phi(c), starts at order 2
    for k in range(2, max_order + 1):
        on_manifold_q = _restrict_to_manifold(s_rate, c_var, phi, k)
        on_manifold_p = _restrict_to_manifold(c_rate, c_var, phi, k)
        g = on_manifold_q - phi.diff("c") * on_manifold_p
        r_k = g.truncate(k).coefficient((k, 0))
        a_k = -r_k / lam
        if a_k:
            phi = phi + RationalPoly.monomial(a_k, (k, 0), cs)
    reduced = _restrict_to_manifold(c_rate, c_var, phi, max_order).truncate(max_order)
    leading = None
    for m in range(2, max_order + 1):
        coeff = reduced.coefficient((m, 0))
        if coeff:
            leading = (m, coeff)
            break
    if leading is None:
        raise UndeterminedAtOrder(
            f"reduced equation vanishes through order {max_order}"
        )
    m, a_m = leading
    manifold_terms = {e[0]: str(coef) for e, coef in phi.sorted_terms()}
    evidence = {
        "hyperbolic_eigenvalue": str(lam),
        "leading_order": m,
        "leading_coeff": str(a_m),
        "center_direction": [str(v0[0]), str(v0[1])],
        "manifold_coeffs": manifold_terms,
    }
    if m % 2 == 0:
        return ClassificationTag("saddle-node", None, evidence)
    if (a_m > 0) == (lam > 0):
        stability = "stable" if lam < 0 else "unstable"
        return ClassificationTag("node", stability, evidence)
    return ClassificationTag("saddle", None, evidence)


def _restrict_to_manifold(
    rate: RationalPoly, c_var: RationalPoly, phi: RationalPoly, order: int
) -> RationalPoly:
    """rate(c, phi(c)) truncated to total degree order."""
    return rate.truncate(order + 2).compose(c_var, phi).truncate(order)


@dataclass
class Equilibrium:
    """An equilibrium with its exact Jacobian and classification."""

    point: AlgebraicPoint
    jacobian: Jacobian
    tag: ClassificationTag

    def describe(self) -> dict:
        def entry(e):
            return str(e) if isinstance(e, Fraction) else e.describe()

        return {
            "point": self.point.describe(),
            "jacobian": [[entry(e) for e in row] for row in self.jacobian],
            "classification": self.tag.describe(),
        }


def classify_equilibrium(system: PlanarSystem, point: AlgebraicPoint) -> Equilibrium:
    """Classify one equilibrium, refining semi-hyperbolic rational points
    through the center-manifold reduction automatically."""
    jac = system.jacobian_at(point)
    tag = classify_linear(jac)
    if tag.category == "semi-hyperbolic":
        try:
            tag = classify_semihyperbolic(system, point)
        except UnsupportedPoint as exc:
            tag.caveat = f"linear tag only: {exc}"
        except UndeterminedAtOrder as exc:
            tag.caveat = f"linear tag only: {exc}"
    return Equilibrium(point, jac, tag)


def classify_finite_equilibria(system: PlanarSystem) -> list[Equilibrium]:
    from .system import finite_equilibria

    return [classify_equilibrium(system, pt) for pt in finite_equilibria(system)]
