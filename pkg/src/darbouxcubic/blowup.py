"""Half-power blow-up of a linearly zero chart origin.

When a directional chart has an equilibrium at its origin whose Jacobian
vanishes identically, the origin is resolved by the square-root weighted
substitution

    w = z / u^(1/2)        on the branch u > 0,
    w = z / (-u)^(1/2)     on the branch u < 0.

Writing t for the square root in use, the chain rule gives

    dw/dt = zdot / t - (w / 2) * udot / u,

and for the systems handled here the result is again polynomial in
(u, w); when it is not, a genuine half power survives and the transform
reports that instead of silently approximating. A subsequent time rescale
by u makes the exceptional divisor u = 0 an invariant line carrying
finitely many equilibria. On the branch u < 0 that rescale runs the clock
backwards, so classifications are reported both in rescaled time and in
the original flow time.

Geometry of the reassembly: divisor points (0, w) of the u > 0 branch
correspond to approach curves z ~ w * sqrt(u), with the two signed
z-half-axes appearing as the ideal endpoints w = +/-inf. Walking the full
circle of approach directions counterclockwise therefore visits

    u > 0 divisor (w from -inf to +inf),  the +z half-axis,
    u < 0 divisor (w from +inf to -inf),  the -z half-axis,

and back. Saddle separatrices transverse to the divisor, together with
the two invariant half-axes, cut this circle into sectors; a sector
containing a divisor node is nodal (parabolic), and a sector whose two
boundary orbits run in opposite directions is a saddle (hyperbolic)
sector. Inconsistent patterns are refused rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import (
    AlgebraicField,
    AlgebraicPoint,
    RealAlgebraic,
    UniPoly,
    isolate_real_roots,
    ueval,
    uis_zero,
    unipoly,
    value_sign,
)
from .classify import ClassificationTag, Equilibrium, classify_linear
from .errors import (
    NonHyperbolicDivisor,
    PositiveDimensional,
    ShapeError,
)
from .poly import (
    BRANCH_NEGATIVE,
    BRANCH_POSITIVE,
    HalfPowerPoly,
    RationalPoly,
    divide_exact,
    substitute_halfpower,
)
from .system import Jacobian, PlanarSystem


@dataclass
class BlowupChart:
    """One branch of the blow-up: a polynomial system in (u, w).

    Attributes:
        branch: "u>0" or "u<0".
        system: the transformed system (rates of u and w).
        rescaled: whether the time rescale by u has been applied.
        orientation_reversed: True when the rescale reverses the clock,
            which happens exactly on the u < 0 branch.
    """

    branch: str
    system: PlanarSystem
    rescaled: bool = False
    orientation_reversed: bool = False

    def blow_down(self, u: float, w: float) -> tuple[float, float]:
        """Map a chart point back to the pre-blow-up (u, z) coordinates."""
        return u, w * abs(u) ** 0.5

    def describe(self) -> dict:
        return {
            "branch": self.branch,
            "system": self.system.describe(),
            "rescaled": self.rescaled,
            "orientation_reversed": self.orientation_reversed,
        }


def half_power_blowup(chart_sys: PlanarSystem, branch: str) -> BlowupChart:
    """Blow up the origin of a chart system on one branch.

    Args:
        chart_sys: system in (u, z) whose origin is an equilibrium with
            identically zero Jacobian.
        branch: BRANCH_POSITIVE ("u>0") or BRANCH_NEGATIVE ("u<0").

    Returns:
        The (u, w) system, not yet time-rescaled.

    Raises:
        ShapeError: the origin is not a linearly zero equilibrium.
        HalfPowerResidue: the transformed field is not polynomial in
            (u, w), i.e. an odd power of the square root survives.
    """
    u_name, z_name = chart_sys.variables
    for label, comp in (("first", chart_sys.p_comp), ("second", chart_sys.q_comp)):
        if comp.coefficient((0, 0)) != 0:
            raise ShapeError(f"origin is not an equilibrium ({label} rate has a constant term)")
        if comp.coefficient((1, 0)) != 0 or comp.coefficient((0, 1)) != 0:
            raise ShapeError(
                f"origin is not linearly zero ({label} rate has linear terms); "
                "the half-power blow-up targets a vanishing Jacobian"
            )
    f_h = substitute_halfpower(chart_sys.p_comp, branch)
    g_h = substitute_halfpower(chart_sys.q_comp, branch)
    w_name = f_h.variables[1]
    u_mono = RationalPoly.var(u_name, (u_name, w_name))
    w_half = HalfPowerPoly({(0, 1): Fraction(1)}, branch, f_h.variables)
    wdot_h = g_h.shift_half_power(-1) - w_half * divide_exact(f_h, u_mono) * Fraction(1, 2)
    udot = f_h.to_rational_poly()
    wdot = wdot_h.to_rational_poly()
    root = u_name if branch == BRANCH_POSITIVE else f"-{u_name}"
    new_sys = chart_sys.with_step(
        udot,
        wdot,
        "half_power_blowup",
        {"branch": branch, "substitution": f"{w_name}={z_name}/({root})^(1/2)"},
    )
    return BlowupChart(branch, new_sys)


def rescale_time(chart: BlowupChart) -> BlowupChart:
    """Divide both rates by u, making the divisor an invariant line.

    On the u < 0 branch the rescale reverses the time orientation, which
    the returned chart records.

    Raises:
        ShapeError: the chart was already rescaled.
        NotDivisible: a rate is not divisible by u (the divisor is not a
            removable factor for this system).
    """
    if chart.rescaled:
        raise ShapeError("chart is already time-rescaled")
    u_name = chart.system.variables[0]
    u_poly = RationalPoly.var(u_name, chart.system.variables)
    udot = divide_exact(chart.system.p_comp, u_poly)
    wdot = divide_exact(chart.system.q_comp, u_poly)
    reversed_ = chart.branch == BRANCH_NEGATIVE
    new_sys = chart.system.with_step(
        udot,
        wdot,
        "time_rescale",
        {"factor": u_name, "orientation_reversed": reversed_},
    )
    return BlowupChart(chart.branch, new_sys, rescaled=True, orientation_reversed=reversed_)


def blow_up_branch(chart_sys: PlanarSystem, branch: str) -> BlowupChart:
    """Blow up and rescale in one step."""
    return rescale_time(half_power_blowup(chart_sys, branch))


@dataclass
class DivisorEquilibrium:
    """An equilibrium on the exceptional divisor u = 0.

    Attributes:
        branch: which half-plane chart it lives in.
        point: (0, w0) with w0 exact.
        jacobian: Jacobian in the rescaled time.
        tag_rescaled: linear classification in rescaled time.
        tag_flow: classification in the original flow time (equal to
            tag_rescaled unless the branch reverses orientation).
    """

    branch: str
    point: AlgebraicPoint
    jacobian: Jacobian
    tag_rescaled: ClassificationTag
    tag_flow: ClassificationTag

    @property
    def w_float(self) -> float:
        return self.point.y_float()

    def describe(self) -> dict:
        base = Equilibrium(self.point, self.jacobian, self.tag_flow).describe()
        base["branch"] = self.branch
        base["classification_rescaled_time"] = self.tag_rescaled.describe()
        return base


def _restrict_to_divisor(poly: RationalPoly) -> UniPoly:
    """The univariate polynomial poly(0, w)."""
    coeffs: dict[int, Fraction] = {}
    for (i, j), c in poly.terms.items():
        if i == 0:
            coeffs[j] = c
    if not coeffs:
        return unipoly([])
    top = max(coeffs)
    return unipoly([coeffs.get(j, 0) for j in range(top + 1)])


def _negate_jacobian(jac: Jacobian) -> Jacobian:
    return tuple(tuple(-e for e in row) for row in jac)


def divisor_equilibria(chart: BlowupChart) -> list[DivisorEquilibrium]:
    """All equilibria on the divisor u = 0 of a rescaled chart, sorted by w.

    Raises:
        ShapeError: the chart is not rescaled, or the divisor is not
            invariant (the u-rate does not vanish on u = 0).
        PositiveDimensional: the divisor consists entirely of equilibria.
    """
    if not chart.rescaled:
        raise ShapeError("divisor equilibria are defined on the rescaled chart")
    sys = chart.system
    if not uis_zero(_restrict_to_divisor(sys.p_comp)):
        raise ShapeError(
            "the exceptional divisor is not invariant: the u-rate does not vanish on u=0"
        )
    g = _restrict_to_divisor(sys.q_comp)
    if uis_zero(g):
        raise PositiveDimensional("the exceptional divisor consists entirely of equilibria")
    out: list[DivisorEquilibrium] = []
    for root in isolate_real_roots(g):
        if isinstance(root, RealAlgebraic):
            fld = AlgebraicField.from_real(root)
            point = AlgebraicPoint.with_field(fld, [0], algebraic_index=1)
        else:
            point = AlgebraicPoint.rational(Fraction(0), root)
        jac = sys.jacobian_at(point)
        tag_rescaled = classify_linear(jac)
        if chart.orientation_reversed:
            tag_flow = classify_linear(_negate_jacobian(jac))
        else:
            tag_flow = tag_rescaled
        out.append(DivisorEquilibrium(chart.branch, point, jac, tag_rescaled, tag_flow))
    return out


_NODE_CATEGORIES = ("node", "star node", "degenerate node")


@dataclass
class Sector:
    """One sector of the resolved point, between two boundary orbits."""

    kind: str  # "nodal" | "saddle"
    orientation: str | None  # "attracting" | "repelling" | None
    start: dict
    end: dict
    interior: list[dict] = field(default_factory=list)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "orientation": self.orientation,
            "start": self.start,
            "end": self.end,
            "interior": self.interior,
        }


@dataclass
class SectorStructure:
    """The full cyclic sector decomposition of the resolved point."""

    sectors: list[Sector]
    degenerate: bool = False
    note: str | None = None

    @property
    def counts(self) -> dict:
        return {
            "nodal": sum(1 for s in self.sectors if s.kind == "nodal"),
            "saddle": sum(1 for s in self.sectors if s.kind == "saddle"),
        }

    def describe(self) -> dict:
        out = {
            "counts": self.counts,
            "sectors": [s.describe() for s in self.sectors],
            "degenerate": self.degenerate,
        }
        if self.note:
            out["note"] = self.note
        return out


def _axis_orientations(chart_sys: PlanarSystem) -> tuple[str, str]:
    """Flow direction on the two invariant z-half-axes of the chart.

    Returns ("inflow"|"outflow") for the +z and -z half-axes, where inflow
    means the orbit approaches the origin in forward time.

    Raises:
        PositiveDimensional: the z-axis consists entirely of equilibria.
        ShapeError: the z-axis is not invariant.
    """
    z_on_axis = _restrict_to_divisor(chart_sys.q_comp)  # zdot(0, z)
    u_on_axis = _restrict_to_divisor(chart_sys.p_comp)  # udot(0, z)
    if not uis_zero(u_on_axis):
        raise ShapeError("the z-axis of the chart is not invariant")
    if uis_zero(z_on_axis):
        raise PositiveDimensional("the z-axis of the chart consists of equilibria")
    m = next(j for j in range(len(z_on_axis)) if z_on_axis[j] != 0)
    c_m = z_on_axis[m]
    plus = "inflow" if c_m < 0 else "outflow"
    minus = "inflow" if c_m * Fraction(-1) ** m > 0 else "outflow"
    return plus, minus


def _transverse_orientation(eq: DivisorEquilibrium, reversed_: bool) -> str:
    """Whether a saddle's transverse separatrix leaves or approaches the
    resolved point, in original flow time."""
    lam = eq.jacobian[0][0]
    s = value_sign(lam)
    if reversed_:
        s = -s
    if s == 0:
        raise NonHyperbolicDivisor(
            "saddle with zero transverse eigenvalue", (0.0, eq.w_float)
        )
    return "outflow" if s > 0 else "inflow"


def _axis_descriptor(sign: str, z_name: str, orientation: str) -> dict:
    return {
        "type": "axis",
        "direction": f"{sign}{z_name}",
        "orientation": orientation,
    }


def _eq_descriptor(eq: DivisorEquilibrium, orientation: str | None = None) -> dict:
    w_exact = eq.point.y_exact()
    out = {
        "type": "divisor equilibrium",
        "branch": eq.branch,
        "w": eq.w_float,
        "w_exact": str(w_exact) if w_exact is not None else None,
        "classification": str(eq.tag_flow),
    }
    if orientation is not None:
        out["orientation"] = orientation
    return out


def assemble_sectors(
    chart_sys: PlanarSystem,
    positive: BlowupChart,
    negative: BlowupChart,
    pos_eqs: list[DivisorEquilibrium],
    neg_eqs: list[DivisorEquilibrium],
) -> SectorStructure:
    """Assemble the sector decomposition from both branches' divisors.

    The circle of approach directions is walked counterclockwise as
    described in the module docstring. Saddle separatrices and the two
    half-axes delimit sectors; nodes fill them.

    Raises:
        NonHyperbolicDivisor: a divisor equilibrium is neither a node nor
            a saddle, or the boundary orientations of some sector are
            inconsistent with any nodal/saddle reading.
    """
    z_name = chart_sys.variables[1]
    plus_axis, minus_axis = _axis_orientations(chart_sys)
    for eq in pos_eqs + neg_eqs:
        if eq.tag_flow.category not in _NODE_CATEGORIES + ("saddle",):
            raise NonHyperbolicDivisor(
                f"divisor equilibrium at w={eq.w_float:.6g} ({eq.branch}) is "
                f"{eq.tag_flow.category}, not hyperbolic; a further blow-up would be needed",
                (0.0, eq.w_float),
            )

    # cyclic walk: pos branch w ascending, +z axis, neg branch w descending,
    # -z axis
    markers: list[tuple[str, object]] = []
    for eq in pos_eqs:
        markers.append(("eq", eq))
    markers.append(("axis", ("+", plus_axis)))
    for eq in reversed(neg_eqs):
        markers.append(("eq", eq))
    markers.append(("axis", ("-", minus_axis)))

    def is_delimiter(marker) -> bool:
        kind, data = marker
        return kind == "axis" or data.tag_flow.category == "saddle"

    def boundary_descriptor(marker) -> tuple[dict, str]:
        kind, data = marker
        if kind == "axis":
            sign, orientation = data
            return _axis_descriptor(sign, z_name, orientation), orientation
        chart = negative if data.branch == BRANCH_NEGATIVE else positive
        orientation = _transverse_orientation(data, chart.orientation_reversed)
        return _eq_descriptor(data, orientation), orientation

    delim_idx = [i for i, m in enumerate(markers) if is_delimiter(m)]
    n = len(markers)
    sectors: list[Sector] = []
    for pos_i, start_i in enumerate(delim_idx):
        end_i = delim_idx[(pos_i + 1) % len(delim_idx)]
        start_desc, start_orient = boundary_descriptor(markers[start_i])
        end_desc, end_orient = boundary_descriptor(markers[end_i])
        interior_markers = []
        j = (start_i + 1) % n
        while j != end_i:
            interior_markers.append(markers[j])
            j = (j + 1) % n
        nodes = [d for k, d in interior_markers if k == "eq"]
        if nodes:
            stabilities = {nd.tag_flow.stability for nd in nodes}
            if len(stabilities) != 1:
                raise NonHyperbolicDivisor(
                    "sector contains nodes of mixed stability", (0.0, nodes[0].w_float)
                )
            node_orient = "outflow" if stabilities == {"unstable"} else "inflow"
            if start_orient != node_orient or end_orient != node_orient:
                raise NonHyperbolicDivisor(
                    "sector boundaries disagree with the stability of its node",
                    (0.0, nodes[0].w_float),
                )
            sectors.append(
                Sector(
                    "nodal",
                    "repelling" if node_orient == "outflow" else "attracting",
                    start_desc,
                    end_desc,
                    [_eq_descriptor(nd) for nd in nodes],
                )
            )
        else:
            if start_orient == end_orient:
                raise NonHyperbolicDivisor(
                    "empty sector with aligned boundary orbits cannot be "
                    "classified as nodal or saddle",
                    (0.0, 0.0),
                )
            sectors.append(Sector("saddle", None, start_desc, end_desc, []))
    return SectorStructure(sectors)


def _flow_transverse_rate(chart: BlowupChart) -> UniPoly:
    """d(udot)/du restricted to the divisor, in original flow time."""
    jac_polys = chart.system.jacobian_polys()
    d = _restrict_to_divisor(jac_polys[0][0])
    if chart.orientation_reversed:
        d = tuple(-c for c in d)
    return d

def _is_semidefinite(g: UniPoly) -> int:
    """0 if g changes sign on the real line, else its definite sign.

    Sample points are taken strictly between consecutive root-isolating
    intervals (and beyond the extremes), where g cannot vanish, so every
    sample sign is meaningful.
    """
    if uis_zero(g):
        return 0
    bounds: list[tuple[Fraction, Fraction]] = []
    for root in isolate_real_roots(g):
        if isinstance(root, RealAlgebraic):
            bounds.append(root.interval)
        else:
            bounds.append((root, root))
    samples: list[Fraction] = []
    if bounds:
        samples.append(bounds[0][0] - 1)
        for (_, hi_left), (lo_right, _) in zip(bounds, bounds[1:]):
            samples.append((hi_left + lo_right) / 2)
        samples.append(bounds[-1][1] + 1)
    else:
        samples.append(Fraction(0))
    signs = {1 if ueval(g, pt) > 0 else -1 for pt in samples}
    if len(signs) != 1:
        return 0
    return signs.pop()


def _degenerate_structure(
    chart_sys: PlanarSystem,
    positive: BlowupChart,
    negative: BlowupChart,
    reason: str,
) -> SectorStructure:
    """Coarse fallback when the divisor carries no hyperbolic equilibria.

    If on each branch the transverse flow through the divisor is
    semidefinite (never changes sign), every orbit in that half-disk
    crosses the divisor the same way and the half-disk is a single nodal
    sector. Anything subtler is refused.
    """
    z_name = chart_sys.variables[1]
    plus_axis, minus_axis = _axis_orientations(chart_sys)
    sectors = []
    for chart, start, end in (
        (positive, ("-", minus_axis), ("+", plus_axis)),
        (negative, ("+", plus_axis), ("-", minus_axis)),
    ):
        s = _is_semidefinite(_flow_transverse_rate(chart))
        if s == 0:
            raise NonHyperbolicDivisor(
                f"no hyperbolic divisor equilibria and the transverse flow on "
                f"{chart.branch} changes sign; a further blow-up would be needed",
                (0.0, 0.0),
            )
        orientation = "repelling" if s > 0 else "attracting"
        expected = "outflow" if s > 0 else "inflow"
        for _sign, axis_orient in (start, end):
            if axis_orient != expected:
                raise NonHyperbolicDivisor(
                    "axis orbit direction disagrees with the transverse flow "
                    f"on {chart.branch}",
                    (0.0, 0.0),
                )
        sectors.append(
            Sector(
                "nodal",
                orientation,
                _axis_descriptor(start[0], z_name, start[1]),
                _axis_descriptor(end[0], z_name, end[1]),
                [],
            )
        )
    return SectorStructure(
        sectors,
        degenerate=True,
        note=(
            f"{reason}; sector counts come from the semidefinite transverse "
            "flow, not from a hyperbolic assembly"
        ),
    )


@dataclass
class OriginAnalysis:
    """Complete resolution of a linearly zero chart origin."""

    positive: BlowupChart
    negative: BlowupChart
    divisor_positive: list[DivisorEquilibrium]
    divisor_negative: list[DivisorEquilibrium]
    sectors: SectorStructure

    def describe(self) -> dict:
        return {
            "branches": {
                "u>0": self.positive.describe(),
                "u<0": self.negative.describe(),
            },
            "divisor_equilibria": {
                "u>0": [eq.describe() for eq in self.divisor_positive],
                "u<0": [eq.describe() for eq in self.divisor_negative],
            },
            "sectors": self.sectors.describe(),
        }


def resolve_origin(chart_sys: PlanarSystem) -> OriginAnalysis:
    """Blow up, rescale, classify the divisor, and assemble sectors.

    This is the one-call driver for a linearly zero chart origin.
    """
    positive = blow_up_branch(chart_sys, BRANCH_POSITIVE)
    negative = blow_up_branch(chart_sys, BRANCH_NEGATIVE)
    continuum = False
    try:
        pos_eqs = divisor_equilibria(positive)
    except PositiveDimensional:
        pos_eqs, continuum = [], True
    try:
        neg_eqs = divisor_equilibria(negative)
    except PositiveDimensional:
        neg_eqs, continuum = [], True
    hyperbolic = [
        eq
        for eq in pos_eqs + neg_eqs
        if eq.tag_flow.category in _NODE_CATEGORIES + ("saddle",)
    ]
    if continuum or not hyperbolic:
        if hyperbolic:
            raise NonHyperbolicDivisor(
                "one branch's divisor is a continuum of equilibria while the "
                "other carries hyperbolic points; mixed resolution is not supported",
                (0.0, hyperbolic[0].w_float),
            )
        reason = (
            "the exceptional divisor consists of equilibria"
            if continuum
            else "no divisor equilibrium is hyperbolic"
        )
        sectors = _degenerate_structure(chart_sys, positive, negative, reason)
    else:
        sectors = assemble_sectors(chart_sys, positive, negative, pos_eqs, neg_eqs)
    return OriginAnalysis(positive, negative, pos_eqs, neg_eqs, sectors)
