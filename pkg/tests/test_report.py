"""Report assembly: content across the parameter regimes, schema
validity, byte determinism, and the partial-report downgrade paths."""

from fractions import Fraction

import jsonschema
import pytest

from darbouxcubic.report import (
    SCHEMA_VERSION,
    build_family_report,
    build_report,
    gamma_probe_report,
    load_schema,
    render_report,
)
from darbouxcubic.system import system_from_strings

F = Fraction


@pytest.fixture(scope="module")
def schema():
    return load_schema()


class TestSchema:
    def test_schema_is_well_formed(self, schema):
        jsonschema.Draft202012Validator.check_schema(schema)

    @pytest.mark.parametrize("p", [F(-2), F(-1), F(0), F(1), F(2), F(1, 2)])
    def test_family_reports_validate(self, p, schema):
        jsonschema.validate(build_family_report(p), schema)

    def test_partial_reports_validate(self, schema):
        jsonschema.validate(build_report(system_from_strings("x", "y")), schema)
        jsonschema.validate(
            build_report(system_from_strings("x^2 - y^2", "x^2 - y^2")), schema
        )

    def test_rejects_a_mangled_report(self, schema):
        report = build_family_report(F(1))
        report["status"] = "wonderful"
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(report, schema)


class TestContent:
    def test_header(self):
        report = build_family_report(F(1))
        assert report["schema_version"] == SCHEMA_VERSION
        assert report["tool"]["name"] == "darbouxcubic"
        assert len(report["tool"]["config_digest"]) == 16
        assert report["system"]["rates"] == [
            "-x^2*y + x*y^2 + y^3 + x",
            "y^3 + y",
        ]
        assert report["system"]["parameter_p"] == "1"
        assert report["status"] == "complete"
        assert report["problems"] == []

    def test_rational_integral_with_exact_values(self):
        integral = build_family_report(F(1))["first_integral"]
        assert integral["text"] == "(x - y)*(y^2 + 1)/(x + y)"
        assert integral["rational"] is True
        assert integral["algebraic"] is True
        by_point = {tuple(v["point"]): v for v in integral["sample_values"]}
        assert by_point[("2", "1")] == {
            "point": ["2", "1"],
            "value": "2/3",
            "exact": True,
        }

    def test_exponential_integral_not_rational(self):
        report = build_family_report(F(0))
        integral = report["first_integral"]
        assert integral["text"] == "(x - y)*(exp(y^2))/(x + y)"
        assert integral["rational"] is False
        assert integral["algebraic"] is False
        assert all(not v["exact"] for v in integral["sample_values"])

    def test_probe_only_at_p_zero(self):
        assert build_family_report(F(1))["gamma_probe"] is None
        probe = build_family_report(F(0))["gamma_probe"]
        assert probe["count"] == 200
        assert probe["residuals"]["1"] >= 1e-3
        assert probe["residuals"]["2"] >= 1e-3

    def test_finite_equilibria_inventory(self):
        rows = build_family_report(F(-1))["finite_equilibria"]
        inventory = {
            tuple(r["point"]["coords"]): (
                r["classification"]["category"],
                r["classification"]["stability"],
            )
            for r in rows
        }
        assert inventory == {
            ("0", "0"): ("star node", "unstable"),
            ("1", "1"): ("star node", "stable"),
            ("-1", "-1"): ("star node", "stable"),
            ("1", "-1"): ("saddle", None),
            ("-1", "1"): ("saddle", None),
        }
        assert [len(build_family_report(p)["finite_equilibria"]) for p in (F(0), F(1))] == [1, 1]

    def test_equator_classifications(self):
        rows = build_family_report(F(-1))["equator_equilibria"]
        tags = {
            r["point"]["coords"][0]: r["classification"]["category"]
            if r["classification"]
            else None
            for r in rows
        }
        assert tags == {"-1": "node", "0": None, "1": "saddle"}

    def test_semihyperbolic_equator_at_p_zero(self):
        rows = build_family_report(F(0))["equator_equilibria"]
        by_u = {r["point"]["coords"][0]: r["classification"] for r in rows}
        assert by_u["1"]["category"] == "node"
        assert by_u["1"]["stability"] == "stable"
        assert by_u["1"]["evidence"]["leading_order"] == 3
        assert by_u["-1"]["category"] == "saddle"

    @pytest.mark.parametrize("p", [F(-2), F(-1), F(0), F(1, 2), F(1), F(2)])
    def test_sector_counts(self, p):
        resolution = build_family_report(p)["origin_resolutions"][0]
        assert resolution["chart"] == "x"
        counts = resolution["analysis"]["sectors"]["counts"]
        assert counts == {"nodal": 2, "saddle": 2}

    def test_darboux_inventory_generic(self):
        section = build_family_report(F(2))["darboux"]
        assert [c["curve"] for c in section["invariant_curves"]] == [
            "x + y",
            "x - y",
            "y",
            "2*y^2 + 1",
        ]
        assert section["curve_exponent_relation"] == ["-2", "2", "0", "1"]
        factors = {e["factor"]: e for e in section["exponential_factors"]}
        assert factors["exp(y^2)"]["cofactor"] == "4*y^4 + 2*y^2"
        assert factors["exp(y^2)"]["note"] is not None


class TestDeterminism:
    def test_byte_identical_rendering(self):
        a = render_report(build_family_report(F(1)))
        b = render_report(build_family_report(F(1)))
        assert a == b
        assert a.endswith("\n")

    def test_partial_is_deterministic_too(self):
        sys_ = system_from_strings("x", "y")
        assert render_report(build_report(sys_)) == render_report(build_report(sys_))


class TestPartialPaths:
    def test_unresolvable_chart_origin(self):
        report = build_report(system_from_strings("x", "y"))
        assert report["status"] == "partial"
        assert report["origin_resolutions"][0]["analysis"] is None
        assert "further blow-up" in report["origin_resolutions"][0]["error"]
        assert any("blow-up" in msg for msg in report["problems"])

    def test_common_component_system(self):
        report = build_report(system_from_strings("x^2 - y^2", "x^2 - y^2"))
        assert report["status"] == "partial"
        assert report["finite_equilibria"] is None
        assert report["equator_equilibria"] is None
        assert len(report["problems"]) == 2

    def test_shape_restricted_equator_still_reports_darboux(self):
        report = build_report(system_from_strings("-y", "x"))
        assert report["status"] == "partial"
        assert report["equator_equilibria"] is None
        assert report["first_integral"]["text"] == "(x^2 + y^2)"
        tag = report["finite_equilibria"][0]["classification"]
        assert tag["category"] == "center (linear)"
        assert "focus" in tag["caveat"]


class TestGammaProbeReport:
    def test_plain(self):
        report = gamma_probe_report(120, (0.3, 2.5), 5)
        assert report["window"] == {"count": 120, "y_min": 0.3, "y_max": 2.5}
        assert report["gamma"]["maxdeg"] == 5
        assert report["control"] is None
        assert report["separation"] is None

    def test_with_control(self):
        report = gamma_probe_report(200, (0.2, 3.0), 8, control=True)
        sep = report["separation"]
        assert sep["degree"] == 2
        assert sep["ratio"] >= 1e6
        assert report["control"]["residuals"]["2"] <= 1e-10
