"""Deterministic SVG 1.1 portraits on the Poincaré disk.

The plane maps onto the open unit disk by central projection,
(x, y) -> (x, y) / sqrt(1 + x^2 + y^2), so equator points sit on the
unit circle. Everything emitted is computed from exact or seeded-random
data and every float is formatted to fixed precision, so one input
always yields byte-identical output.

Layers, back to front: background orbit grid (seeded starts, traced
both time directions, thinned), the invariant horizontal axis, finite
saddle separatrices, the transverse separatrices of the blown-up
equator point's divisor saddles (blown down and projected), equilibrium
markers shape-coded by classification, sector glyphs at the two ends of
the axis, and orientation arrows on every curve. Curves are emitted in
seed order; marker order follows the report inventory.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .blowup import BRANCH_POSITIVE, divisor_equilibria, half_power_blowup, rescale_time
from .compactify import chart_x
from .config import DEFAULT_CONFIG, Config
from .errors import StepUnderflow
from .numeric import integrate_trajectory, trace_separatrix, transform_samples
from .system import PlanarSystem

_STYLE = (
    "polyline{fill:none;stroke-linejoin:round;stroke-linecap:round}"
    ".orbit{stroke:#9aa0a6;stroke-width:0.004}"
    ".separatrix{stroke:#b3261e;stroke-width:0.007}"
    ".axis{stroke:#b3261e;stroke-width:0.007}"
    ".boundary{fill:none;stroke:#202124;stroke-width:0.01}"
    ".arrow{fill:#5f6368;stroke:none}"
    ".arrow-sep{fill:#b3261e;stroke:none}"
    ".marker{stroke:#202124;stroke-width:0.006}"
    ".sector-nodal{fill:#d2e3fc;stroke:#202124;stroke-width:0.003}"
    ".sector-saddle{fill:none;stroke:#202124;stroke-width:0.003}"
)


def _fmt(v: float) -> str:
    out = f"{v:.5f}"
    return "0.00000" if out == "-0.00000" else out


def _disk(x: float, y: float) -> tuple[float, float]:
    r = math.sqrt(1.0 + x * x + y * y)
    # SVG y grows downward; flip to keep the mathematical orientation
    return x / r, -y / r


def _thin(points: list[tuple[float, float]], step: float = 0.008) -> list[tuple[float, float]]:
    if len(points) <= 2:
        return points
    out = [points[0]]
    for pt in points[1:-1]:
        px, py = out[-1]
        if math.hypot(pt[0] - px, pt[1] - py) >= step:
            out.append(pt)
    out.append(points[-1])
    return out


def _polyline(points: list[tuple[float, float]], cls: str) -> str:
    text = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
    return f'<polyline class="{cls}" points="{text}"/>'


def _arrow_at(points: list[tuple[float, float]], cls: str) -> str:
    """A small triangle at the mid-arc sample, pointing along the curve."""
    if len(points) < 2:
        return ""
    mid = len(points) // 2
    ax, ay = points[mid - 1]
    bx, by = points[mid]
    dx, dy = bx - ax, by - ay
    norm = math.hypot(dx, dy)
    if norm < 1e-9:
        return ""
    dx, dy = dx / norm, dy / norm
    size = 0.018
    tipx, tipy = bx + dx * size, by + dy * size
    leftx, lefty = bx - dy * size * 0.6, by + dx * size * 0.6
    rightx, righty = bx + dy * size * 0.6, by - dx * size * 0.6
    return (
        f'<path class="{cls}" d="M {_fmt(tipx)} {_fmt(tipy)} '
        f"L {_fmt(leftx)} {_fmt(lefty)} L {_fmt(rightx)} {_fmt(righty)} Z\"/>"
    )


def _oriented_disk_points(traj, reversed_time: bool) -> list[tuple[float, float]]:
    pts = [_disk(x, y) for _t, x, y in traj.samples]
    return pts[::-1] if reversed_time else pts


def _marker(cx: float, cy: float, category: str, stability: str | None) -> str:
    """Shape code: star node -> 6-ray asterisk; node -> circle (filled when
    stable); saddle -> X cross; focus -> circle with center dot; center ->
    concentric circles; saddle-node -> half-filled circle; other -> square."""
    r = 0.022
    fill = "#202124" if stability == "stable" else "#ffffff"
    title = f"<title>{stability + ' ' if stability else ''}{category}</title>"
    if category == "star node":
        rays = []
        for k in range(6):
            ang = math.pi * k / 6.0
            dx, dy = math.cos(ang) * r * 1.3, math.sin(ang) * r * 1.3
            rays.append(
                f"M {_fmt(cx - dx)} {_fmt(cy - dy)} L {_fmt(cx + dx)} {_fmt(cy + dy)}"
            )
        return (
            f'<g class="marker" fill="none">{title}<path d="{" ".join(rays)}"/>'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r * 0.45)}" fill="{fill}"/></g>'
        )
    if category == "saddle":
        d = r * 1.1
        return (
            f'<g class="marker" fill="none">{title}'
            f'<path d="M {_fmt(cx - d)} {_fmt(cy - d)} L {_fmt(cx + d)} {_fmt(cy + d)} '
            f'M {_fmt(cx - d)} {_fmt(cy + d)} L {_fmt(cx + d)} {_fmt(cy - d)}"/></g>'
        )
    if category in ("node", "degenerate node"):
        return (
            f'<g class="marker">{title}'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}"/></g>'
        )
    if category == "focus":
        return (
            f'<g class="marker">{title}'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="none"/>'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r * 0.35)}" fill="{fill}" stroke="none"/></g>'
        )
    if category == "center":
        return (
            f'<g class="marker" fill="none">{title}'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}"/>'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r * 0.5)}"/></g>'
        )
    if category == "saddle-node":
        return (
            f'<g class="marker">{title}'
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="#ffffff"/>'
            f'<path d="M {_fmt(cx)} {_fmt(cy - r)} A {_fmt(r)} {_fmt(r)} 0 0 1 '
            f'{_fmt(cx)} {_fmt(cy + r)} Z" fill="#202124" stroke="none"/></g>'
        )
    d = r * 0.9
    return (
        f'<g class="marker">{title}'
        f'<rect x="{_fmt(cx - d)}" y="{_fmt(cy - d)}" width="{_fmt(2 * d)}" '
        f'height="{_fmt(2 * d)}" fill="{fill}"/></g>'
    )


def _sector_glyph(angle: float, sectors: list[str]) -> str:
    """A fan of wedges at the boundary point (cos a, sin a), facing inward,
    one wedge per sector in cyclic order; nodal wedges filled, saddle
    wedges open. A symbolic summary of the blow-up, not a metric plot."""
    cx, cy = math.cos(angle), -math.sin(angle)
    n = len(sectors)
    if n == 0:
        return ""
    radius = 0.09
    start = angle + math.pi / 2.0
    span = math.pi
    parts = []
    for i, kind in enumerate(sectors):
        a0 = start + span * i / n
        a1 = start + span * (i + 1) / n
        x0, y0 = cx + radius * math.cos(a0), cy - radius * math.sin(a0)
        x1, y1 = cx + radius * math.cos(a1), cy - radius * math.sin(a1)
        cls = "sector-nodal" if kind == "nodal" else "sector-saddle"
        parts.append(
            f'<path class="{cls}" d="M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} '
            f'A {_fmt(radius)} {_fmt(radius)} 0 0 1 {_fmt(x1)} {_fmt(y1)} Z">'
            f"<title>{kind} sector</title></path>"
        )
    return "".join(parts)


def _equator_directions(chart: str, u: float) -> list[float]:
    """Boundary angles (radians) of the antipodal pair for one chart point."""
    vec = (1.0, u) if chart == "x" else (u, 1.0)
    ang = math.atan2(vec[1], vec[0])
    return [ang, ang + math.pi]


def _orbit_layer(
    system: PlanarSystem, seed: int, count: int, config: Config
) -> list[str]:
    rng = random.Random(seed)
    parts = []
    for _ in range(count):
        disk_r = math.sqrt(rng.uniform(0.15**2, 0.85**2))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        rho = disk_r / math.sqrt(1.0 - disk_r * disk_r)
        x0, y0 = rho * math.cos(theta), rho * math.sin(theta)
        pieces: list[tuple[float, float]] = []
        for span in ((0.0, -40.0), (0.0, 40.0)):
            try:
                traj = integrate_trajectory(
                    system,
                    (x0, y0),
                    span,
                    1e-6,
                    escape_radius=50.0,
                    max_steps=20_000,
                )
            except StepUnderflow:
                continue
            pts = [_disk(x, y) for _t, x, y in traj.samples]
            if span[1] < 0:
                pieces = pts[::-1]
            else:
                pieces += pts[1:] if pieces else pts
        pts = _thin(pieces)
        if len(pts) < 2:
            continue
        parts.append(_polyline(pts, "orbit"))
        parts.append(_arrow_at(pts, "arrow"))
    return parts


def _finite_saddle_layer(
    system: PlanarSystem, report: dict, config: Config
) -> list[str]:
    parts = []
    for eq in report["finite_equilibria"]:
        if eq["classification"]["category"] != "saddle":
            continue
        x0, y0 = eq["point"]["approx"]
        for direction in ("stable", "unstable"):
            for ray in (1, -1):
                try:
                    traj = trace_separatrix(
                        system,
                        (x0, y0),
                        direction,
                        config.trace_length,
                        ray=ray,
                        tol=1e-8,
                        escape_radius=50.0,
                    )
                except StepUnderflow:
                    continue
                pts = _thin(_oriented_disk_points(traj, direction == "stable"))
                if len(pts) < 2:
                    continue
                parts.append(_polyline(pts, "separatrix"))
                parts.append(_arrow_at(pts, "arrow-sep"))
    return parts


def _divisor_saddle_layer(system: PlanarSystem, config: Config) -> list[str]:
    """Transverse separatrices of the divisor saddles on the u>0 branch of
    the blown-up horizontal chart, blown down and projected to the disk."""
    chart = rescale_time(half_power_blowup(chart_x(system), BRANCH_POSITIVE))
    parts = []
    reversed_time = chart.orientation_reversed
    for eq in divisor_equilibria(chart):
        if eq.tag_flow.category != "saddle":
            continue
        for ray in (1, -1):
            traj = trace_separatrix(
                chart.system,
                eq.point,
                "unstable",
                config.trace_length,
                ray=ray,
                tol=1e-8,
                escape_radius=50.0,
            )
            if not any(u > 1e-9 for _t, u, _w in traj.samples):
                continue  # the other ray leaves the branch's domain

            def to_plane(u: float, w: float):
                u2, z = chart.blow_down(u, w)
                if abs(z) < 1e-12:
                    return math.nan, math.nan
                return 1.0 / z, u2 / z

            plane = transform_samples(traj, to_plane)
            good = [
                (x, y)
                for _t, x, y in plane.samples
                if math.isfinite(x) and math.isfinite(y)
            ]
            pts = _thin([_disk(x, y) for x, y in good])
            if len(pts) < 2:
                continue
            if reversed_time:
                pts = pts[::-1]
            parts.append(_polyline(pts, "separatrix"))
            parts.append(_arrow_at(pts, "arrow-sep"))
    return parts


def _axis_layer() -> list[str]:
    """The invariant horizontal axis: two orbits leaving the origin."""
    right = [_disk(x, 0.0) for x in [0.0] + [0.001 * 1.35**k for k in range(60)]]
    left = [(-px, py) for px, py in right]
    return [
        _polyline(_thin(right), "axis"),
        _arrow_at(_thin(right), "arrow-sep"),
        _polyline(_thin(left), "axis"),
        _arrow_at(_thin(left), "arrow-sep"),
    ]


def render_portrait(
    system: PlanarSystem,
    report: dict,
    *,
    seed: int = DEFAULT_CONFIG.orbit_seed,
    orbit_count: int | None = None,
    config: Config = DEFAULT_CONFIG,
) -> str:
    """The disk portrait as an SVG 1.1 document string.

    The marker inventory comes from the report (so portrait and report
    can never disagree); traced curves come from the system itself.
    """
    count = config.orbit_count if orbit_count is None else orbit_count
    body: list[str] = []
    body.append('<rect x="-1.1" y="-1.1" width="2.2" height="2.2" fill="#ffffff"/>')
    body.extend(_orbit_layer(system, seed, count, config))
    body.extend(_axis_layer())
    body.extend(_finite_saddle_layer(system, report, config))
    if any(r["analysis"] is not None for r in report["origin_resolutions"]):
        body.extend(_divisor_saddle_layer(system, config))
    body.append('<circle class="boundary" cx="0" cy="0" r="1"/>')

    for eq in report["finite_equilibria"]:
        x, y = eq["point"]["approx"]
        cx, cy = _disk(x, y)
        tag = eq["classification"]
        body.append(_marker(cx, cy, tag["category"], tag["stability"]))

    for pt in report["equator_equilibria"]:
        u = pt["point"]["approx"][0]
        for ang in _equator_directions(pt["chart"], u):
            cx, cy = math.cos(ang), -math.sin(ang)
            if pt["linearly_zero"]:
                resolution = next(
                    (
                        r
                        for r in report["origin_resolutions"]
                        if r["chart"] == pt["chart"] and r["analysis"] is not None
                    ),
                    None,
                )
                if resolution is not None:
                    kinds = [
                        s["kind"]
                        for s in resolution["analysis"]["sectors"]["sectors"]
                    ]
                    body.append(_sector_glyph(ang, kinds))
                body.append(_marker(cx, cy, "blown-up point", None))
            else:
                tag = pt["classification"]
                body.append(_marker(cx, cy, tag["category"], tag["stability"]))

    return (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'viewBox="-1.1 -1.1 2.2 2.2" width="640" height="640">'
        f"<style>{_STYLE}</style>{''.join(body)}</svg>\n"
    )
