"""Floating-point layer: integrator, conservation, separatrices, the
separatrix-curve sample, and the algebraicity probe.

Oracles: on the invariant axis y = 0 the flow is x' = x, so x(t) = x0 e^t;
the first integrals are exactly conserved, so any measured drift is
integrator error and must shrink with the tolerance; the separatrix curve
obeys x = y (exp(y^2) + 1)/(exp(y^2) - 1), giving x(1) = (e+1)/(e-1) =
2.163953413..., x ~ 2/y as y -> 0+ and x/y -> 1 as y grows. The probe's
two controls: points on x = y + 2/y satisfy the conic x*y - y^2 - 2 = 0
exactly (residual at machine floor from degree 2 on), while the
separatrix sample resists degree-2 fits at the 2.5e-3 level.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxcubic.blowup import (
    BRANCH_POSITIVE,
    divisor_equilibria,
    half_power_blowup,
    rescale_time,
)
from darbouxcubic.compactify import chart_x
from darbouxcubic.darboux import FirstIntegral, canonical_first_integral
from darbouxcubic.errors import (
    IllConditioned,
    NotASaddle,
    StepUnderflow,
)
from darbouxcubic.numeric import (
    GammaSample,
    Trajectory,
    algebraicity_probe,
    check_integral_constancy,
    integrate_trajectory,
    probe_separation,
    returns_near_start,
    sample_gamma,
    saddle_directions,
    trace_separatrix,
    transform_samples,
)
from darbouxcubic.system import family_two, system_from_strings

F = Fraction


def drift_along(traj: Trajectory, integral: FirstIntegral, margin: float = 0.05):
    """Max relative drift of the integral over well-conditioned samples."""
    _t0, x0, y0 = traj.samples[0]
    reference = integral.evaluate(x0, y0)
    worst = 0.0
    for _t, x, y in traj.samples[1:]:
        if any(
            abs(curve.eval_float(x, y)) <= margin
            for curve, _ in integral.curve_factors
        ):
            continue
        value = integral.evaluate(x, y)
        worst = max(worst, abs(value - reference) / max(1.0, abs(reference)))
    return worst


class TestIntegrator:
    def test_exponential_flow_on_the_axis(self):
        traj = integrate_trajectory(family_two(F(0)), (1.0, 0.0), (0.0, 1.0), 1e-9)
        t, x, y = traj.final
        assert t == 1.0
        assert traj.termination == "time_limit"
        assert abs(x - math.e) < 1e-7
        assert y == 0.0

    def test_error_estimates_respect_the_tolerance(self):
        traj = integrate_trajectory(family_two(F(1)), (0.5, 0.3), (0.0, 2.0), 1e-9)
        assert traj.max_error_estimate <= 1.0
        assert traj.steps == len(traj.samples) - 1

    def test_backward_span(self):
        traj = integrate_trajectory(family_two(F(0)), (1.0, 0.0), (0.0, -1.0), 1e-9)
        t, x, _y = traj.final
        assert t == -1.0
        assert abs(x - 1.0 / math.e) < 1e-7

    def test_escape_termination(self):
        traj = integrate_trajectory(
            family_two(F(1)), (2.0, 2.0), (0.0, 1.0), 1e-9, escape_radius=1e3
        )
        assert traj.termination == "escape"
        assert math.hypot(traj.final[1], traj.final[2]) > 1e3

    def test_equilibrium_termination(self):
        # stable node at (1, 1); the speed floor is reachable once the
        # integrator tolerance sits below it
        traj = integrate_trajectory(family_two(F(-1)), (0.9, 0.9), (0.0, 40.0), 1e-13)
        assert traj.termination == "equilibrium"
        _t, x, y = traj.final
        assert abs(x - 1.0) < 1e-9
        assert abs(y - 1.0) < 1e-9

    def test_step_underflow_at_finite_time_blowup(self):
        with pytest.raises(StepUnderflow) as info:
            integrate_trajectory(
                system_from_strings("1 + x^2", "0"),
                (0.0, 0.0),
                (0.0, 3.0),
                1e-9,
                escape_radius=math.inf,
            )
        t, x, _y = info.value.location
        assert abs(t - math.pi / 2) < 1e-6
        assert x > 1e9

    def test_h_max_bounds_the_sample_spacing(self):
        traj = integrate_trajectory(
            family_two(F(0)), (1.0, 0.5), (0.0, 1.0), 1e-9, h_max=0.01
        )
        gaps = [
            traj.samples[i + 1][0] - traj.samples[i][0]
            for i in range(len(traj.samples) - 1)
        ]
        assert max(gaps) <= 0.01 + 1e-12

    def test_zero_span(self):
        traj = integrate_trajectory(family_two(F(1)), (1.0, 2.0), (0.0, 0.0), 1e-9)
        assert traj.samples == [(0.0, 1.0, 2.0)]
        assert traj.termination == "time_limit"

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="tol"):
            integrate_trajectory(family_two(F(1)), (1.0, 1.0), (0.0, 1.0), 0.0)
        with pytest.raises(ValueError, match="finite"):
            integrate_trajectory(
                family_two(F(1)), (math.nan, 1.0), (0.0, 1.0), 1e-9
            )

    def test_csv_export(self):
        traj = integrate_trajectory(family_two(F(0)), (1.0, 0.0), (0.0, 0.1), 1e-9)
        text = traj.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "t,x,y"
        assert lines[1] == "0.0,1.0,0.0"
        assert len(lines) == len(traj.samples) + 1

    def test_describe_fields(self):
        traj = integrate_trajectory(family_two(F(0)), (1.0, 0.0), (0.0, 0.1), 1e-9)
        info = traj.describe()
        assert info["termination"] == "time_limit"
        assert info["samples"] == len(traj.samples)


class TestInvariantLineConfinement:
    @pytest.mark.parametrize("p", [F(-1), F(0), F(2)])
    def test_horizontal_axis(self, p):
        traj = integrate_trajectory(family_two(p), (0.7, 0.0), (0.0, 2.0), 1e-10)
        assert all(y == 0.0 for _t, _x, y in traj.samples)

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_diagonals(self, sign):
        # on y = +-x the flow is x' = x + x^3, a finite-time blow-up;
        # start small enough that t = 1 stays clear of it
        traj = integrate_trajectory(
            family_two(F(1)), (0.3, sign * 0.3), (0.0, 1.0), 1e-10
        )
        assert all(
            abs(x - sign * y) < 1e-8 * max(1.0, abs(x))
            for _t, x, y in traj.samples
        )


class TestConservation:
    def test_reference_run_at_tight_tolerance(self):
        H = canonical_first_integral(family_two(F(1)))
        traj = integrate_trajectory(family_two(F(1)), (2.0, 0.5), (0.0, 1.0), 1e-12)
        assert drift_along(traj, H) <= 1e-8

    def test_drift_shrinks_with_the_tolerance(self):
        H = canonical_first_integral(family_two(F(1)))
        drifts = []
        for tol in (1e-5, 1e-7, 1e-9):
            traj = integrate_trajectory(
                family_two(F(1)), (1.5, -0.5), (0.0, 1.0), tol
            )
            drifts.append(drift_along(traj, H))
        assert drifts[0] > drifts[1] > drifts[2]

    @pytest.mark.parametrize("p", [F(-1), F(0), F(1)])
    def test_family_grid_passes(self, p):
        H = canonical_first_integral(family_two(p))
        report = check_integral_constancy(family_two(p), H, trials=10, tol=1e-6)
        assert report["passed"], report["max_drift"]
        assert report["max_drift"] <= 1e-6
        assert len(report["runs"]) == 10

    def test_corrupted_exponents_fail(self):
        H = canonical_first_integral(family_two(F(1)))
        curves = [poly for poly, _ in H.curve_factors]
        corrupted = FirstIntegral(
            [(curves[0], F(1)), (curves[1], F(-1)), (curves[2], F(2))]
        )
        report = check_integral_constancy(
            family_two(F(1)), corrupted, trials=10, tol=1e-6
        )
        assert not report["passed"]
        assert report["max_drift"] > 1e3

    def test_report_is_seed_deterministic(self):
        H = canonical_first_integral(family_two(F(1)))
        a = check_integral_constancy(family_two(F(1)), H, trials=3, seed=5)
        b = check_integral_constancy(family_two(F(1)), H, trials=3, seed=5)
        assert a == b
        c = check_integral_constancy(family_two(F(1)), H, trials=3, seed=6)
        assert [r["start"] for r in a["runs"]] != [r["start"] for r in c["runs"]]

    def test_no_return_monitor(self):
        center = integrate_trajectory(
            system_from_strings("-y", "x"), (1.0, 0.0), (0.0, 7.0), 1e-9
        )
        assert returns_near_start(center)  # genuine closed orbit
        family = integrate_trajectory(
            family_two(F(1)), (0.5, 0.2), (0.0, 5.0), 1e-9
        )
        assert not returns_near_start(family)


class TestSeparatrixTracing:
    def test_finite_saddle_directions(self):
        # at (1, -1) the linearization is [[2, 4], [0, -2]]
        (lam_minus, v_minus), (lam_plus, v_plus) = saddle_directions(
            family_two(F(-1)), (1.0, -1.0)
        )
        assert lam_minus == pytest.approx(-2.0)
        assert lam_plus == pytest.approx(2.0)
        assert abs(v_plus[1]) < 1e-12  # unstable direction along y = -1
        assert v_minus[0] == pytest.approx(-v_minus[1])  # stable along x + y = 0

    def test_unstable_trace_stays_on_the_invariant_line(self):
        # the seed sits eps = 1e-6 off the saddle; with eigenvalue 2 the
        # trace needs time ~ln(1e6)/2 before it visibly leaves
        traj = trace_separatrix(family_two(F(-1)), (1.0, -1.0), "unstable", 10.0)
        assert all(abs(y + 1.0) < 1e-8 for _t, _x, y in traj.samples)
        assert traj.final[1] > 2.0  # moved outward along y = -1

    def test_stable_trace_runs_into_the_past(self):
        traj = trace_separatrix(family_two(F(-1)), (1.0, -1.0), "stable", 3.0)
        assert traj.samples[-1][0] == -3.0
        assert all(abs(x + y) < 1e-8 for _t, x, y in traj.samples)

    def test_ray_picks_the_other_side(self):
        plus = trace_separatrix(family_two(F(-1)), (1.0, -1.0), "unstable", 1.0)
        minus = trace_separatrix(
            family_two(F(-1)), (1.0, -1.0), "unstable", 1.0, ray=-1
        )
        assert plus.samples[1][1] > 1.0 > minus.samples[1][1]

    def test_node_is_rejected(self):
        with pytest.raises(NotASaddle, match="det"):
            trace_separatrix(family_two(F(-1)), (1.0, 1.0))

    def test_non_equilibrium_is_rejected(self):
        with pytest.raises(ValueError, match="not an equilibrium"):
            trace_separatrix(family_two(F(-1)), (0.5, 0.2))

    def test_bad_arguments(self):
        with pytest.raises(ValueError, match="direction"):
            trace_separatrix(family_two(F(-1)), (1.0, -1.0), "sideways")
        with pytest.raises(ValueError, match="ray"):
            trace_separatrix(family_two(F(-1)), (1.0, -1.0), "stable", ray=0)


def build_equator_chart(p):
    return rescale_time(half_power_blowup(chart_x(family_two(p)), BRANCH_POSITIVE))


def gamma_x(y: float) -> float:
    z = math.exp(y * y)
    return y * (z + 1.0) / (z - 1.0)


class TestGammaTrace:
    def test_divisor_saddle_separatrix_matches_the_closed_form(self):
        chart = build_equator_chart(F(0))
        saddle = [
            e for e in divisor_equilibria(chart) if e.point.y_float() > 0.1
        ][0]
        traj = trace_separatrix(
            chart.system, saddle.point, "unstable", 20.0, tol=1e-10, h_max=0.01
        )

        def to_plane(u, w):
            u2, z = chart.blow_down(u, w)
            return 1.0 / z, u2 / z

        plane = transform_samples(traj, to_plane)
        in_window = [
            (x, y) for _t, x, y in plane.samples if 0.5 <= y <= 2.0
        ]
        assert len(in_window) > 100
        worst = max(abs(x - gamma_x(y)) for x, y in in_window)
        assert worst < 1e-4

    def test_transform_keeps_stats(self):
        traj = integrate_trajectory(family_two(F(0)), (1.0, 0.5), (0.0, 0.5), 1e-9)
        doubled = transform_samples(traj, lambda x, y: (2 * x, 2 * y))
        assert doubled.steps == traj.steps
        assert doubled.termination == traj.termination
        assert doubled.samples[0] == (0.0, 2.0, 1.0)


class TestGammaSample:
    def test_closed_form_value_at_one(self):
        sample = sample_gamma(3, (1.0, 3.0))
        x, y = sample.points[0]
        assert y == 1.0
        assert x == pytest.approx((math.e + 1) / (math.e - 1), abs=1e-14)

    def test_residual_invariant(self):
        sample = sample_gamma(200, (0.2, 3.0))
        assert len(sample.points) == 200
        assert sample.max_residual <= 1e-12
        for x, y in sample.points:
            assert y > 0
            assert abs((x - y) / (x + y) * math.exp(y * y) - 1.0) <= 1e-12

    def test_small_y_behaves_like_two_over_y(self):
        sample = sample_gamma(1, (0.01, 1.0))
        x, y = sample.points[0]
        assert abs(x - 2.0 / y) <= 0.01 * (2.0 / y)

    def test_large_y_hugs_the_diagonal(self):
        sample = sample_gamma(1, (3.0, 3.5))
        x, y = sample.points[0]
        assert 0.0 < x / y - 1.0 <= 3e-4

    def test_double_precision_ceiling(self):
        with pytest.raises(ValueError, match="3.2"):
            sample_gamma(5, (0.5, 4.0))

    def test_range_validation(self):
        with pytest.raises(ValueError, match="y_min"):
            sample_gamma(5, (0.0, 1.0))
        with pytest.raises(ValueError, match="y_min"):
            sample_gamma(5, (2.0, 1.0))
        with pytest.raises(ValueError, match="count"):
            sample_gamma(0, (0.5, 1.0))


def control_points(count: int = 200) -> list:
    """The algebraic control: x = y + 2/y, the positive branch of the
    conic x*y - y^2 - 2 = 0."""
    pts = []
    for i in range(count):
        y = 0.2 + (3.0 - 0.2) * i / (count - 1)
        pts.append((y + 2.0 / y, y))
    return pts


class TestAlgebraicityProbe:
    def test_control_curve_is_fitted_at_its_own_degree(self):
        report = algebraicity_probe(control_points(), 3)
        assert report["residuals"]["2"] <= 1e-10
        assert report["residuals"]["3"] <= 1e-10
        assert report["residuals"]["1"] > 1e-3

    def test_line_sample_gives_zero_residual(self):
        line = [(0.025 * i, 0.0) for i in range(200)]
        report = algebraicity_probe(line, 1)
        assert report["residuals"]["1"] == 0.0

    def test_gamma_resists_low_degree_fits(self):
        report = algebraicity_probe(sample_gamma(200, (0.2, 3.0)), 8)
        assert report["residuals"]["1"] >= 1e-3
        assert report["residuals"]["2"] >= 1e-3
        assert report["residuals"]["3"] >= 1e-8
        # on a bounded window high degrees approximate any smooth curve
        # to machine precision; the probe is a matched-degree instrument
        assert report["residuals"]["8"] < 1e-10

    def test_underdetermined_sample_is_rejected(self):
        with pytest.raises(IllConditioned, match="well-spread"):
            algebraicity_probe([(1.0, 1.0), (2.0, 2.0)], 1)

    def test_separation_against_the_control(self):
        gamma_report = algebraicity_probe(sample_gamma(200, (0.2, 3.0)), 8)
        control_report = algebraicity_probe(control_points(), 3)
        comparison = probe_separation(gamma_report, control_report)
        assert comparison["degree"] == 2
        assert comparison["ratio"] >= 1e6

    def test_separation_needs_an_algebraic_control(self):
        gamma_report = algebraicity_probe(sample_gamma(200, (0.2, 3.0)), 8)
        # capped at degree 4 the separatrix sample never reaches the
        # ceiling, so it cannot serve as a control
        low = algebraicity_probe(sample_gamma(200, (0.2, 3.0)), 4)
        with pytest.raises(ValueError, match="not algebraic"):
            probe_separation(gamma_report, low)

    def test_report_shape(self):
        report = algebraicity_probe(control_points(), 2)
        assert report["count"] == 200
        assert report["maxdeg"] == 2
        assert set(report["residuals"]) == {"1", "2"}
        assert report["min_degree"] == 2
        assert report["min_residual"] == report["residuals"]["2"]


@given(
    p=st.fractions(min_value=-3, max_value=3, max_denominator=4),
    scale=st.floats(min_value=0.1, max_value=1.5),
)
@settings(max_examples=15, deadline=None)
def test_diagonal_confinement_across_the_family(p, scale):
    # relative bound: runs that approach the finite-time blow-up on the
    # diagonal amplify the local error before the escape cutoff
    traj = integrate_trajectory(family_two(p), (scale, scale), (0.0, 1.0), 1e-10)
    assert all(abs(x - y) <= 1e-5 * max(1.0, abs(x)) for _t, x, y in traj.samples)
