"""Assembly of the JSON analysis report.

The report gathers, for one system, everything the rest of the package
computes: finite equilibria with classification tags, equator equilibria
(classified in their chart when hyperbolic or semi-hyperbolic, resolved
through the half-power blow-up when the chart Jacobian vanishes), the
Darboux inventory with exact cofactors, the canonical first integral
with a rationality flag and exactly evaluated sample values, and, for
the p = 0 family member, the separatrix algebraicity probe.

Serialization is deterministic: `render_report` is `json.dumps` with
sorted keys and a fixed indent, so identical inputs give byte-identical
output. Two structural failures downgrade the report to a partial one
instead of crashing: the invariant-curve solver giving up on a residual
system it has no rule for, and a divisor equilibrium that is not
hyperbolic (a further blow-up would be needed). Both leave the affected
sections null, record the message under "problems", and set
status = "partial".
"""

from __future__ import annotations

import json
from dataclasses import asdict
from fractions import Fraction
from importlib import metadata, resources

from .compactify import chart_x, chart_y, equator_equilibria
from .classify import classify_equilibrium, classify_finite_equilibria
from .config import DEFAULT_CONFIG, Config
from .darboux import (
    FirstIntegral,
    canonical_first_integral,
    find_algebraic_invariants,
    find_exponential_factors,
    minimal_support_relation,
)
from .errors import (
    HalfPowerResidue,
    NonHyperbolicDivisor,
    PoleOrBranch,
    PositiveDimensional,
    RelationFails,
    ShapeError,
    SolverIncomplete,
)
from .blowup import resolve_origin
from .numeric import algebraicity_probe, probe_separation, sample_gamma
from .system import PlanarSystem, family_two

SCHEMA_VERSION = 1

# rational points where sample values of H are reported; chosen away from
# the family's invariant lines y = 0, y = +-x
_VALUE_POINTS = [(Fraction(2), Fraction(1)), (Fraction(3), Fraction(1))]


def tool_version() -> str:
    try:
        return metadata.version("darbouxcubic")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _chart_system(system: PlanarSystem, chart: str) -> PlanarSystem:
    return chart_x(system) if chart == "x" else chart_y(system)


def _sort_key(point) -> tuple[float, float]:
    return (point.x_float(), point.y_float())


def _integral_section(integral: FirstIntegral) -> dict:
    rational = integral.rational_form() is not None and integral.is_algebraic
    values = []
    for x, y in _VALUE_POINTS:
        entry: dict = {"point": [str(x), str(y)]}
        try:
            if rational and all(
                lam.denominator == 1 for _, lam in integral.curve_factors
            ):
                entry["value"] = str(integral.evaluate_exact(x, y))
                entry["exact"] = True
            else:
                entry["value"] = repr(integral.evaluate(float(x), float(y)))
                entry["exact"] = False
        except PoleOrBranch:
            continue
        values.append(entry)
    section = integral.describe()
    section["rational"] = rational
    section["sample_values"] = values
    return section


def build_report(
    system: PlanarSystem,
    *,
    p: Fraction | None = None,
    max_degree: int = 2,
    config: Config = DEFAULT_CONFIG,
) -> dict:
    """Run the full pipeline on one system and return the report dict.

    Args:
        system: the system to analyze.
        p: the family parameter when the system is family_two(p); enables
            the p = 0 separatrix probe section and is echoed in the
            header. None for a free-form system.
        max_degree: degree cap for the invariant-curve search.
        config: numeric settings; the digest is stamped into the header.
    """
    problems: list[str] = []

    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "tool": {
            "name": "darbouxcubic",
            "version": tool_version(),
            "config_digest": config.digest(),
        },
        "config": asdict(config),
        "system": {
            "variables": list(system.variables),
            "rates": [str(system.p_comp), str(system.q_comp)],
            "parameter_p": None if p is None else str(p),
        },
    }

    try:
        report["finite_equilibria"] = [
            eq.describe()
            for eq in sorted(
                classify_finite_equilibria(system), key=lambda e: _sort_key(e.point)
            )
        ]
    except PositiveDimensional as exc:
        problems.append(f"finite equilibria: {exc}")
        report["finite_equilibria"] = None

    equator = []
    resolutions = []
    try:
        equator_points = equator_equilibria(system)
    except (PositiveDimensional, ShapeError) as exc:
        problems.append(f"equator equilibria: {exc}")
        equator_points = []
        equator = None
    for pt in equator_points:
        entry = pt.describe()
        if pt.linearly_zero:
            entry["classification"] = None
            chart_sys = _chart_system(system, pt.chart)
            if (pt.point.x_float(), pt.point.y_float()) != (0.0, 0.0):
                problems.append(
                    f"linearly zero equator point away from the chart-{pt.chart} "
                    "origin; the blow-up handles chart origins only"
                )
            else:
                try:
                    analysis = resolve_origin(chart_sys)
                except (NonHyperbolicDivisor, HalfPowerResidue, ShapeError) as exc:
                    problems.append(f"blow-up resolution: {exc}")
                    resolutions.append(
                        {"chart": pt.chart, "analysis": None, "error": str(exc)}
                    )
                else:
                    resolutions.append(
                        {
                            "chart": pt.chart,
                            "analysis": analysis.describe(),
                            "error": None,
                        }
                    )
        else:
            chart_sys = _chart_system(system, pt.chart)
            entry["classification"] = classify_equilibrium(
                chart_sys, pt.point
            ).tag.describe()
        equator.append(entry)
    report["equator_equilibria"] = equator
    report["origin_resolutions"] = resolutions

    darboux_section: dict | None
    integral_section: dict | None
    try:
        curves = find_algebraic_invariants(system, max_degree)
    except SolverIncomplete as exc:
        problems.append(f"invariant-curve search: {exc}")
        darboux_section = None
        integral_section = None
    else:
        exp_factors = find_exponential_factors(system)
        cofactors = [c.cofactor for c in curves]
        relation = minimal_support_relation(cofactors)
        darboux_section = {
            "max_degree": max_degree,
            "invariant_curves": [c.describe() for c in curves],
            "exponential_factors": [e.describe() for e in exp_factors],
            "curve_exponent_relation": None
            if relation is None
            else [str(a) for a in relation],
        }
        try:
            integral = canonical_first_integral(system)
        except RelationFails as exc:
            problems.append(f"first integral: {exc}")
            integral_section = None
        else:
            integral_section = _integral_section(integral)
    report["darboux"] = darboux_section
    report["first_integral"] = integral_section

    if p == 0:
        gamma = sample_gamma(config.gamma_count, (config.gamma_y_min, config.gamma_y_max))
        probe = algebraicity_probe(gamma, config.probe_maxdeg)
        report["gamma_probe"] = probe
    else:
        report["gamma_probe"] = None

    report["problems"] = problems
    report["status"] = "partial" if _is_partial(report) else "complete"
    return report


def _is_partial(report: dict) -> bool:
    if report["darboux"] is None:
        return True
    if report["finite_equilibria"] is None or report["equator_equilibria"] is None:
        return True
    return any(r["analysis"] is None for r in report["origin_resolutions"])


def build_family_report(
    p: Fraction, *, max_degree: int = 2, config: Config = DEFAULT_CONFIG
) -> dict:
    return build_report(family_two(p), p=p, max_degree=max_degree, config=config)


def gamma_probe_report(
    count: int,
    y_range: tuple[float, float],
    maxdeg: int,
    *,
    control: bool = False,
    config: Config = DEFAULT_CONFIG,
) -> dict:
    """The standalone probe report for the separatrix sample.

    With control=True the same window is probed on the algebraic control
    x = y + 2/y (a branch of x*y - y^2 - 2 = 0) and the matched-degree
    separation is attached.
    """
    gamma = sample_gamma(count, y_range)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {
            "name": "darbouxcubic",
            "version": tool_version(),
            "config_digest": config.digest(),
        },
        "window": {"count": count, "y_min": y_range[0], "y_max": y_range[1]},
        "gamma": algebraicity_probe(gamma, maxdeg),
    }
    if control:
        y0, y1 = y_range
        pts = [
            (y + 2.0 / y, y)
            for y in (y0 + (y1 - y0) * i / (count - 1) for i in range(count))
        ]
        control_probe = algebraicity_probe(pts, min(maxdeg, 3))
        report["control"] = control_probe
        report["separation"] = probe_separation(
            report["gamma"], control_probe, config.probe_algebraic_ceiling
        )
    else:
        report["control"] = None
        report["separation"] = None
    return report


def render_report(report: dict) -> str:
    """Deterministic JSON text: sorted keys, fixed indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    """The published report schema shipped with the package."""
    text = (
        resources.files("darbouxcubic").joinpath("data/report.schema.json").read_text()
    )
    return json.loads(text)
