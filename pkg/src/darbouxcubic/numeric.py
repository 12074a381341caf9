"""Floating-point verification layer.

Everything upstream is exact; this module checks those exact results
against actual floating-point dynamics: an adaptive Runge-Kutta
integrator with conserved-quantity drift tests, separatrix tracing from
saddle linearizations, sampling of the heteroclinic curve
(x - y)/(x + y) * exp(y^2) = 1, and a singular-value probe that measures
how well a point sample can be fitted by a low-degree algebraic curve.

The integrator is a Dormand-Prince 5(4) embedded pair. The error
estimate of every accepted step is kept in scaled units (estimate /
tolerance), so `max_error_estimate <= 1` is the accuracy contract of a
finished trajectory.
"""

import math
from dataclasses import dataclass
from random import Random
from typing import Callable, Sequence

import numpy

from .config import DEFAULT_CONFIG
from .darboux import FirstIntegral
from .errors import IllConditioned, NotASaddle, PoleOrBranch, StepUnderflow
from .poly import RationalPoly
from .system import PlanarSystem

TERMINATED_TIME = "time_limit"
TERMINATED_ESCAPE = "escape"
TERMINATED_EQUILIBRIUM = "equilibrium"
TERMINATED_STEPS = "step_limit"


@dataclass
class Trajectory:
    """An adaptively integrated orbit segment.

    samples are (t, x, y) at every accepted step, including the start;
    steps/rejected count accepted and rejected step attempts;
    max_error_estimate is the largest scaled local error of any accepted
    step (the step-acceptance rule keeps it at or below 1).
    """

    samples: list[tuple[float, float, float]]
    steps: int
    rejected: int
    max_error_estimate: float
    termination: str

    @property
    def final(self) -> tuple[float, float, float]:
        return self.samples[-1]

    def to_csv(self) -> str:
        lines = ["t,x,y"]
        for t, x, y in self.samples:
            lines.append(f"{t!r},{x!r},{y!r}")
        return "\n".join(lines) + "\n"

    def describe(self) -> dict:
        return {
            "samples": len(self.samples),
            "steps": self.steps,
            "rejected": self.rejected,
            "max_error_estimate": self.max_error_estimate,
            "termination": self.termination,
        }


def _compile(poly: RationalPoly) -> Callable[[float, float], float]:
    terms = [(float(c), i, j) for (i, j), c in poly.terms.items()]

    def evaluate(x: float, y: float) -> float:
        total = 0.0
        for c, i, j in terms:
            total += c * x**i * y**j
        return total

    return evaluate


# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# fifth-order weights minus the embedded fourth-order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def integrate_trajectory(
    system: PlanarSystem,
    start: tuple[float, float],
    t_span: tuple[float, float],
    tol: float = DEFAULT_CONFIG.integrator_tol,
    *,
    escape_radius: float = DEFAULT_CONFIG.escape_radius,
    speed_floor: float = DEFAULT_CONFIG.speed_floor,
    h_max: float = math.inf,
    max_steps: int = DEFAULT_CONFIG.max_steps,
) -> Trajectory:
    """Integrate the system from start over t_span.

    The trajectory ends at the far end of t_span ("time_limit"), or
    earlier when the state leaves the escape radius ("escape"), the speed
    drops under speed_floor ("equilibrium"), or max_steps accepted steps
    have been taken ("step_limit", a safety valve). Backward spans
    (t_end < t_start) integrate the reversed field.

    Raises:
        StepUnderflow: the error controller pushed the step size below
            the floating-point floor (stiffness or a singularity); the
            stall location is attached.
    """
    if not (tol > 0):
        raise ValueError("tol must be positive")
    x0, y0 = float(start[0]), float(start[1])
    if not (math.isfinite(x0) and math.isfinite(y0)):
        raise ValueError("start must be finite")
    t0, t_end = float(t_span[0]), float(t_span[1])
    duration = t_end - t0
    sign = 1.0 if duration >= 0 else -1.0

    p_fn = _compile(system.p_comp)
    q_fn = _compile(system.q_comp)

    def rhs(x: float, y: float) -> tuple[float, float]:
        return sign * p_fn(x, y), sign * q_fn(x, y)

    span = abs(duration)
    samples = [(t0, x0, y0)]
    if span == 0.0:
        return Trajectory(samples, 0, 0, 0.0, TERMINATED_TIME)

    # local clock s runs forward from 0 to span; reported t = t0 + sign*s
    s = 0.0
    x, y = x0, y0
    fx, fy = rhs(x, y)
    accepted = 0
    rejected = 0
    worst = 0.0

    def scaled_error(ex: float, ey: float, x1: float, y1: float) -> float:
        sx = tol + tol * max(abs(x), abs(x1))
        sy = tol + tol * max(abs(y), abs(y1))
        return math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))

    # initial step size from the field scale at the start
    state_scale = max(abs(x), abs(y), 1.0)
    rate_scale = max(abs(fx), abs(fy))
    if rate_scale > 0:
        h = min(span, h_max, 0.01 * state_scale / rate_scale)
    else:
        h = min(span, h_max, 1e-3)

    while True:
        if accepted >= max_steps:
            return Trajectory(samples, accepted, rejected, worst, TERMINATED_STEPS)
        h = min(h, span - s, h_max)
        if h < 1e-14 * max(1.0, abs(s)):
            raise StepUnderflow(
                f"step size underflowed at t={t0 + sign * s!r}",
                (t0 + sign * s, x, y),
            )

        kx = [fx, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        ky = [fy, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        for stage in range(1, 7):
            ax = x
            ay = y
            row = _A[stage]
            for idx, coeff in enumerate(row):
                ax += h * coeff * kx[idx]
                ay += h * coeff * ky[idx]
            kx[stage], ky[stage] = rhs(ax, ay)
        # stage 6 state is the fifth-order solution (the tableau's last
        # row of A equals B), so ax/ay already hold the proposal
        x1, y1 = ax, ay
        ex = h * sum(e * k for e, k in zip(_E, kx))
        ey = h * sum(e * k for e, k in zip(_E, ky))
        finite = math.isfinite(x1) and math.isfinite(y1)
        err = scaled_error(ex, ey, x1, y1) if finite else math.inf

        if err <= 1.0:
            accepted += 1
            worst = max(worst, err)
            s += h
            x, y = x1, y1
            fx, fy = kx[6], ky[6]  # first-same-as-last
            samples.append((t0 + sign * s, x, y))
            if math.hypot(x, y) > escape_radius:
                return Trajectory(
                    samples, accepted, rejected, worst, TERMINATED_ESCAPE
                )
            if math.hypot(fx, fy) < speed_floor:
                return Trajectory(
                    samples, accepted, rejected, worst, TERMINATED_EQUILIBRIUM
                )
            if s >= span:
                return Trajectory(samples, accepted, rejected, worst, TERMINATED_TIME)
            if err == 0.0:
                factor = 5.0
            else:
                factor = min(5.0, max(0.2, 0.9 * err ** (-0.2)))
            h *= factor
        else:
            rejected += 1
            if math.isfinite(err):
                h *= min(1.0, max(0.2, 0.9 * err ** (-0.2)))
            else:
                h *= 0.2


def transform_samples(
    trajectory: Trajectory,
    mapping: Callable[[float, float], tuple[float, float]],
) -> Trajectory:
    """The same trajectory with every sample pushed through a point map
    (used to carry blow-up chart traces back to plane coordinates)."""
    moved = []
    for t, x, y in trajectory.samples:
        nx, ny = mapping(x, y)
        moved.append((t, nx, ny))
    return Trajectory(
        moved,
        trajectory.steps,
        trajectory.rejected,
        trajectory.max_error_estimate,
        trajectory.termination,
    )


def _point_floats(point) -> tuple[float, float]:
    if hasattr(point, "x_float") and hasattr(point, "y_float"):
        return float(point.x_float()), float(point.y_float())
    x, y = point
    return float(x), float(y)


def saddle_directions(
    system: PlanarSystem, point: tuple[float, float]
) -> tuple[tuple[float, tuple[float, float]], tuple[float, tuple[float, float]]]:
    """((lambda_minus, v_minus), (lambda_plus, v_plus)) of the
    linearization at a saddle, eigenvectors unit length.

    Raises:
        NotASaddle: the eigenvalues are not real with opposite signs.
    """
    x0, y0 = _point_floats(point)
    x_name, y_name = system.variables
    a = system.p_comp.diff(x_name).eval_float(x0, y0)
    b = system.p_comp.diff(y_name).eval_float(x0, y0)
    c = system.q_comp.diff(x_name).eval_float(x0, y0)
    d = system.q_comp.diff(y_name).eval_float(x0, y0)
    det = a * d - b * c
    scale = max(1.0, a * a + b * b + c * c + d * d)
    if det >= -1e-12 * scale:
        raise NotASaddle(
            f"linearization at ({x0!r}, {y0!r}) has det {det!r} >= 0; "
            "a saddle needs real eigenvalues of opposite signs"
        )
    tr = a + d
    disc = math.sqrt(tr * tr - 4.0 * det)
    lam_minus = (tr - disc) / 2.0
    lam_plus = (tr + disc) / 2.0

    def eigenvector(lam: float) -> tuple[float, float]:
        v1 = (b, lam - a)
        v2 = (lam - d, c)
        vx, vy = v1 if math.hypot(*v1) >= math.hypot(*v2) else v2
        norm = math.hypot(vx, vy)
        return vx / norm, vy / norm

    return (lam_minus, eigenvector(lam_minus)), (lam_plus, eigenvector(lam_plus))


def trace_separatrix(
    system: PlanarSystem,
    saddle,
    direction: str = "unstable",
    length: float = DEFAULT_CONFIG.trace_length,
    *,
    ray: int = 1,
    eps: float = DEFAULT_CONFIG.seed_eps,
    tol: float = DEFAULT_CONFIG.integrator_tol,
    escape_radius: float = DEFAULT_CONFIG.escape_radius,
    h_max: float = math.inf,
) -> Trajectory:
    """Trace one separatrix of a saddle.

    The seed is saddle + eps * v with v the unit eigenvector of the
    chosen direction ("unstable": positive eigenvalue, forward time;
    "stable": negative eigenvalue, reversed time) and ray = +-1 picking
    the side. Stable traces carry decreasing sample times (the clock
    runs into the past, where the stable separatrix leaves the saddle).

    Raises:
        NotASaddle: the linearization is not a saddle.
        ValueError: the point is not an equilibrium, or bad arguments.
    """
    if direction not in ("stable", "unstable"):
        raise ValueError("direction must be 'stable' or 'unstable'")
    if ray not in (1, -1):
        raise ValueError("ray must be +1 or -1")
    x0, y0 = _point_floats(saddle)
    speed = math.hypot(
        system.p_comp.eval_float(x0, y0), system.q_comp.eval_float(x0, y0)
    )
    if speed > 1e-6 * (1.0 + math.hypot(x0, y0)):
        raise ValueError(
            f"({x0!r}, {y0!r}) is not an equilibrium (speed {speed!r})"
        )
    (lam_minus, v_minus), (lam_plus, v_plus) = saddle_directions(system, (x0, y0))
    vx, vy = v_plus if direction == "unstable" else v_minus
    seed = (x0 + ray * eps * vx, y0 + ray * eps * vy)
    span = (0.0, length) if direction == "unstable" else (0.0, -length)
    return integrate_trajectory(
        system,
        seed,
        span,
        tol,
        escape_radius=escape_radius,
        h_max=h_max,
    )


def check_integral_constancy(
    system: PlanarSystem,
    integral: FirstIntegral,
    trials: int = DEFAULT_CONFIG.constancy_trials,
    tol: float = DEFAULT_CONFIG.constancy_tol,
    *,
    seed: int = DEFAULT_CONFIG.orbit_seed,
    t_end: float = DEFAULT_CONFIG.constancy_t_end,
    box: float = 2.0,
    margin: float = 0.05,
    escape_radius: float = DEFAULT_CONFIG.constancy_escape_radius,
    integrator_tol: float | None = None,
) -> dict:
    """Drift of the integral along trials random trajectories.

    Starts are drawn uniformly from [-box, box]^2, rejecting points where
    any curve factor is within margin of its zero set (poles and branch
    cuts make float evaluation meaningless there). Each trajectory runs
    over [0, t_end] at integrator_tol (default tol * 1e-3, so integrator
    error does not masquerade as conservation failure); the reported
    drift is max |H - H_0| / max(1, |H_0|) over the samples. Samples are
    skipped and counted when a curve factor re-enters the margin (the
    integral's conditioning there exceeds any integrator accuracy: a
    factor like exp(y^2) can force x - y toward zero exponentially fast,
    so the quotient magnifies orbit error without bound) or when
    evaluation overflows or hits a pole.

    Failures are data: the report carries passed=False, no exception.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    inner_tol = tol * 1e-3 if integrator_tol is None else integrator_tol
    rng = Random(seed)
    runs = []
    skipped = 0
    for _ in range(trials):
        for _attempt in range(1000):
            x0 = rng.uniform(-box, box)
            y0 = rng.uniform(-box, box)
            if any(
                abs(curve.eval_float(x0, y0)) <= margin
                for curve, _ in integral.curve_factors
            ):
                continue
            try:
                reference = integral.evaluate(x0, y0)
            except (PoleOrBranch, OverflowError):
                continue
            if math.isfinite(reference):
                break
        else:
            raise ValueError(
                "could not draw a start away from the integral's poles; "
                "enlarge the box or lower the margin"
            )
        trajectory = integrate_trajectory(
            system,
            (x0, y0),
            (0.0, t_end),
            inner_tol,
            escape_radius=escape_radius,
        )
        drift = 0.0
        evaluated = 0
        floor = max(1.0, abs(reference))
        for _t, x, y in trajectory.samples[1:]:
            if any(
                abs(curve.eval_float(x, y)) <= margin
                for curve, _ in integral.curve_factors
            ):
                skipped += 1
                continue
            try:
                value = integral.evaluate(x, y)
            except (PoleOrBranch, OverflowError):
                skipped += 1
                continue
            if not math.isfinite(value):
                skipped += 1
                continue
            evaluated += 1
            drift = max(drift, abs(value - reference) / floor)
        runs.append(
            {
                "start": [x0, y0],
                "reference": reference,
                "drift": drift,
                "samples": len(trajectory.samples),
                "evaluated": evaluated,
                "termination": trajectory.termination,
            }
        )
    max_drift = max(run["drift"] for run in runs)
    return {
        "trials": trials,
        "tol": tol,
        "integrator_tol": inner_tol,
        "max_drift": max_drift,
        "passed": max_drift <= tol,
        "skipped_samples": skipped,
        "runs": runs,
    }


def returns_near_start(
    trajectory: Trajectory, radius: float = 1e-2
) -> bool:
    """Whether the orbit comes back into a radius-ball around its start
    after first leaving the 2*radius ball (a closed-orbit indicator;
    monitoring only, not a proof).

    Distance is measured from the start to the polyline segments between
    samples, so sparse adaptive steps cannot hop over the ball.
    """
    _t0, x0, y0 = trajectory.samples[0]

    def segment_distance(ax, ay, bx, by):
        dx, dy = bx - ax, by - ay
        length_sq = dx * dx + dy * dy
        if length_sq == 0.0:
            return math.hypot(ax - x0, ay - y0)
        s = ((x0 - ax) * dx + (y0 - ay) * dy) / length_sq
        s = min(1.0, max(0.0, s))
        return math.hypot(ax + s * dx - x0, ay + s * dy - y0)

    left = False
    previous = trajectory.samples[0]
    for sample in trajectory.samples[1:]:
        _t, x, y = sample
        if not left:
            if math.hypot(x - x0, y - y0) > 2 * radius:
                left = True
        elif segment_distance(previous[1], previous[2], x, y) < radius:
            return True
        previous = sample
    return False


@dataclass
class GammaSample:
    """Points on the curve (x - y)/(x + y) * exp(y^2) = 1, y > 0.

    Along the curve x = y (exp(y^2) + 1)/(exp(y^2) - 1); every stored
    point keeps the defining residual below the recorded bound.
    """

    points: list[tuple[float, float]]
    parametrization: str
    residual_bound: float
    max_residual: float

    def describe(self) -> dict:
        return {
            "count": len(self.points),
            "parametrization": self.parametrization,
            "residual_bound": self.residual_bound,
            "max_residual": self.max_residual,
        }


def _gamma_residual(x: float, y: float) -> float:
    return (x - y) / (x + y) * math.exp(y * y) - 1.0


def sample_gamma(
    count: int = DEFAULT_CONFIG.gamma_count,
    y_range: tuple[float, float] = (
        DEFAULT_CONFIG.gamma_y_min,
        DEFAULT_CONFIG.gamma_y_max,
    ),
    residual_bound: float = DEFAULT_CONFIG.gamma_residual_bound,
) -> GammaSample:
    """Sample the separatrix curve from its closed form.

    y values are equally spaced over y_range; each x is the closed-form
    value nudged by at most two ulps to the double that minimizes the
    defining residual.

    Raises:
        ValueError: bad range/count, or the residual bound is not
            reachable in double precision (cancellation grows with y;
            past y around 3.2 no representable x satisfies 1e-12).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    y_min, y_max = y_range
    if not (0.0 < y_min < y_max):
        raise ValueError("need 0 < y_min < y_max")
    points = []
    worst = 0.0
    for index in range(count):
        if count == 1:
            y = y_min
        else:
            y = y_min + (y_max - y_min) * index / (count - 1)
        z = math.exp(y * y)
        x = y * (z + 1.0) / (z - 1.0)
        candidates = [x]
        up = x
        down = x
        for _ in range(2):
            up = math.nextafter(up, math.inf)
            down = math.nextafter(down, -math.inf)
            candidates.append(up)
            candidates.append(down)
        best = min(candidates, key=lambda c: abs(_gamma_residual(c, y)))
        residual = abs(_gamma_residual(best, y))
        if residual > residual_bound:
            raise ValueError(
                f"residual {residual!r} at y={y!r} exceeds {residual_bound!r}; "
                "double precision cannot hold the curve this far out "
                "(keep y under about 3.2)"
            )
        worst = max(worst, residual)
        points.append((best, y))
    parametrization = (
        f"x = y*(exp(y^2)+1)/(exp(y^2)-1), {count} points, "
        f"y equally spaced in [{y_min!r}, {y_max!r}]"
    )
    return GammaSample(points, parametrization, residual_bound, worst)


def algebraicity_probe(
    points: GammaSample | Sequence[tuple[float, float]],
    maxdeg: int = DEFAULT_CONFIG.probe_maxdeg,
) -> dict:
    """How well a nontrivial low-degree polynomial can vanish on the
    sample.

    For each degree n <= maxdeg the statistic is the smallest singular
    value of the column-normalized Vandermonde matrix of all monomials
    x^i y^j with i + j <= n at the sample points. A value near machine
    epsilon means some degree-n curve interpolates the whole sample (the
    sample is algebraic to working precision); values far above it
    certify that no degree-n curve comes close.

    Raises:
        IllConditioned: fewer than 3 * (maxdeg+1)(maxdeg+2)/2 points.
    """
    if maxdeg < 1:
        raise ValueError("maxdeg must be at least 1")
    if isinstance(points, GammaSample):
        pairs = points.points
    else:
        pairs = list(points)
    needed = 3 * (maxdeg + 1) * (maxdeg + 2) // 2
    if len(pairs) < needed:
        raise IllConditioned(
            f"{len(pairs)} points cannot support degree {maxdeg}; need at "
            f"least {needed} well-spread points (widen the y range or "
            "raise the count)"
        )
    xs = numpy.array([p[0] for p in pairs], dtype=float)
    ys = numpy.array([p[1] for p in pairs], dtype=float)
    residuals: dict[str, float] = {}
    for degree in range(1, maxdeg + 1):
        columns = []
        for total in range(degree + 1):
            for i in range(total, -1, -1):
                columns.append(xs**i * ys ** (total - i))
        matrix = numpy.column_stack(columns)
        norms = numpy.linalg.norm(matrix, axis=0)
        safe = numpy.where(norms > 0.0, norms, 1.0)
        smallest = float(numpy.linalg.svd(matrix / safe, compute_uv=False)[-1])
        residuals[str(degree)] = smallest
    min_degree = min(residuals, key=lambda k: residuals[k])
    return {
        "count": len(pairs),
        "maxdeg": maxdeg,
        "residuals": residuals,
        "min_residual": residuals[min_degree],
        "min_degree": int(min_degree),
    }


def probe_separation(
    report: dict,
    control_report: dict,
    ceiling: float = DEFAULT_CONFIG.probe_algebraic_ceiling,
) -> dict:
    """Compare a probe report against an algebraic control at matched
    degree.

    The comparison degree is the smallest degree where the control's
    residual sits at or under the ceiling (the control really is fitted
    there); the ratio report[d] / control[d] then says how many orders
    of magnitude worse the probed sample resists the same fit. Matched
    degree matters: on a bounded window every smooth curve is
    approximable to machine precision once the degree is high enough, so
    raw minima across degrees compare approximation floors, not curves.

    Raises:
        ValueError: the control never reaches the ceiling, or the probed
            report does not cover the comparison degree.
    """
    control = control_report["residuals"]
    fitted = [int(d) for d, r in control.items() if r <= ceiling]
    if not fitted:
        raise ValueError(
            f"control sample has no degree with residual <= {ceiling!r}; "
            "it is not algebraic at the probed degrees"
        )
    degree = min(fitted)
    key = str(degree)
    if key not in report["residuals"]:
        raise ValueError(f"probe report does not cover degree {degree}")
    control_res = control[key]
    sample_res = report["residuals"][key]
    ratio = sample_res / control_res if control_res > 0 else math.inf
    return {
        "degree": degree,
        "sample_residual": sample_res,
        "control_residual": control_res,
        "ratio": ratio,
    }
