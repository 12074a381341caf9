"""Runtime configuration: numeric tolerances and probe thresholds.

Every tolerance the floating-point layer uses lives here, so a report can
carry a single hash identifying the exact numeric contract it was produced
under. The two probe thresholds are calibration constants: at the degrees
where the algebraic control curve is exactly fitted (residual near 1e-16),
the separatrix sample resists the same fit by eleven or more orders of
magnitude (residual 2.5e-3 at degree 2, 1.5e-5 at degree 3 for the
default sample). The ceiling certifies "fitted at working precision",
the floor certifies "no fit at this degree"; residuals between them are
inconclusive. Both sit inside the measured gap with headroom on each
side. High degrees are different: on a bounded window every smooth curve
is approximable to machine precision eventually (from degree 6 on for
the default sample), so per-degree labels describe the sample at working
precision and cross-curve conclusions always come from matched-degree
comparison against a control.
"""

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import tomli


@dataclass(frozen=True)
class Config:
    """Tolerances and defaults for the numeric layer and the CLI."""

    # adaptive integrator
    integrator_tol: float = 1e-9
    escape_radius: float = 1e6
    speed_floor: float = 1e-12
    max_steps: int = 1_000_000

    # separatrix tracing
    seed_eps: float = 1e-6
    trace_length: float = 15.0

    # conservation check
    constancy_trials: int = 10
    constancy_tol: float = 1e-6
    constancy_t_end: float = 1.0
    constancy_escape_radius: float = 1e3

    # separatrix sampling and the algebraicity probe
    gamma_count: int = 200
    gamma_y_min: float = 0.2
    gamma_y_max: float = 3.0
    gamma_residual_bound: float = 1e-12
    probe_maxdeg: int = 8
    probe_nonalgebraic_floor: float = 1e-3
    probe_algebraic_ceiling: float = 1e-10

    # portrait
    orbit_seed: int = 0
    orbit_count: int = 24

    def digest(self) -> str:
        """Stable hash of the configuration contents."""
        payload = json.dumps(dataclasses.asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


DEFAULT_CONFIG = Config()

_FIELD_NAMES = {f.name for f in dataclasses.fields(Config)}
_INT_FIELDS = {f.name for f in dataclasses.fields(Config) if f.type in (int, "int")}


def _coerce_value(name: str, value: object) -> object:
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"config key {name!r} must be an integer")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"config key {name!r} must be a number")
    return float(value)


def config_from_mapping(data: dict) -> Config:
    """Build a Config from a flat key-value mapping.

    Unknown keys are rejected so a typo cannot silently fall back to a
    default tolerance.
    """
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    values = {name: _coerce_value(name, value) for name, value in data.items()}
    return Config(**values)


def load_config(path: str | Path) -> Config:
    """Read a TOML or JSON config file; missing keys keep their defaults."""
    path = Path(path)
    if path.suffix == ".toml":
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    elif path.suffix == ".json":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        raise ValueError(f"config file must be .toml or .json, got {path.name!r}")
    if not isinstance(data, dict):
        raise ValueError("config file must hold a table of key-value pairs")
    return config_from_mapping(data)
