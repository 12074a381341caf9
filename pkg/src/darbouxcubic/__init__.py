"""Exact qualitative analysis of planar cubic systems with a star node.

The pipeline: Poincare compactification of the plane, half-power blow-up
of the linearly zero equator point, exact classification of every
equilibrium, the Darboux method (invariant algebraic curves, exponential
factors, exponent relations, first integrals), adaptive numeric
integration for conservation checks and separatrix traces, and a
least-squares probe for the algebraicity of a separatrix. A JSON report,
an SVG disk portrait, an HTTP service, and a CLI sit on top.
"""

from .classify import (
    ClassificationTag,
    Equilibrium,
    classify_equilibrium,
    classify_finite_equilibria,
    classify_linear,
    classify_semihyperbolic,
)
from .compactify import EquatorPoint, chart_x, chart_y, equator_equilibria
from .config import DEFAULT_CONFIG, Config, load_config
from .darboux import (
    ExponentialFactor,
    FirstIntegral,
    InvariantCurve,
    build_first_integral,
    canonical_first_integral,
    cofactor_of,
    find_algebraic_invariants,
    find_exponential_factors,
    minimal_support_relation,
    solve_exponent_relation,
)
from .blowup import (
    BRANCH_NEGATIVE,
    BRANCH_POSITIVE,
    BlowupChart,
    DivisorEquilibrium,
    OriginAnalysis,
    SectorStructure,
    assemble_sectors,
    blow_up_branch,
    divisor_equilibria,
    half_power_blowup,
    rescale_time,
    resolve_origin,
)
from .numeric import (
    GammaSample,
    Trajectory,
    algebraicity_probe,
    check_integral_constancy,
    integrate_trajectory,
    probe_separation,
    sample_gamma,
    trace_separatrix,
)
from .report import (
    SCHEMA_VERSION,
    build_family_report,
    build_report,
    gamma_probe_report,
    load_schema,
    render_report,
)
from .svg import render_portrait
from .system import PlanarSystem, family_two, finite_equilibria, system_from_strings

__all__ = [
    "BRANCH_NEGATIVE",
    "BRANCH_POSITIVE",
    "BlowupChart",
    "ClassificationTag",
    "Config",
    "DEFAULT_CONFIG",
    "DivisorEquilibrium",
    "EquatorPoint",
    "Equilibrium",
    "ExponentialFactor",
    "FirstIntegral",
    "GammaSample",
    "InvariantCurve",
    "OriginAnalysis",
    "PlanarSystem",
    "SCHEMA_VERSION",
    "SectorStructure",
    "Trajectory",
    "algebraicity_probe",
    "assemble_sectors",
    "blow_up_branch",
    "build_family_report",
    "build_first_integral",
    "build_report",
    "canonical_first_integral",
    "chart_x",
    "chart_y",
    "check_integral_constancy",
    "classify_equilibrium",
    "classify_finite_equilibria",
    "classify_linear",
    "classify_semihyperbolic",
    "cofactor_of",
    "divisor_equilibria",
    "equator_equilibria",
    "family_two",
    "find_algebraic_invariants",
    "find_exponential_factors",
    "finite_equilibria",
    "gamma_probe_report",
    "half_power_blowup",
    "integrate_trajectory",
    "load_config",
    "load_schema",
    "minimal_support_relation",
    "probe_separation",
    "render_portrait",
    "render_report",
    "rescale_time",
    "resolve_origin",
    "sample_gamma",
    "solve_exponent_relation",
    "system_from_strings",
    "trace_separatrix",
]
