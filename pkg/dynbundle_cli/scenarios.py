"""Scenario files, scenario runs and their CSV traces.

A scenario file is YAML with four sections::

    scenario:
      name: orbit
      preset: gravity-circular
    params:
      dt: 0.001
      t_end: 6.283185307179586
    field: "(x1, -1.0 * (x0))"      # custom preset only
    initial_state: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]

Omitted params take the preset defaults from ``constants.PRESETS``.
``print_config`` writes the canonical form with every default filled in,
and ``parse_config(print_config(c)) == c``.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import yaml

from dynbundle_cli.calculus.dynamics import (
    Clock,
    Trajectory,
    VectorField,
    check_trajectory,
    clock_field,
    integrate_picard,
    integrate_rk4,
    whole_space_field,
)
from dynbundle_cli.calculus.newton import (
    ConfigState,
    GravityParams,
    angular_momentum,
    lagrangian_field,
    total_energy,
    total_momentum,
    two_body_energy,
    two_body_field,
)
from dynbundle_cli.calculus.notation import NotationError, parse_expression
from dynbundle_cli.calculus.smoothmap import differential, fd_oracle
from dynbundle_cli.calculus.errors import DomainError
from dynbundle_cli.calculus.vecspace import norm
from dynbundle_cli.constants import (
    COMMON_PARAMS,
    CUSTOM_REQUIRED_PARAMS,
    INTEGER_PARAMS,
    MECHANICAL_PRESETS,
    METHODS,
    PRESET_ALIASES,
    PRESET_NAMES,
    PRESETS,
    STRING_PARAMS,
)
from dynbundle_cli.errors import ConfigError, OutputError
from dynbundle_cli.validation import resolve_name, suggest


SECTIONS = ("scenario", "params", "field", "initial_state")

# Trajectory states sampled by the seeded AD-vs-FD spot check.
SPOT_CHECKS = 8


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    preset: str
    params: dict[str, Any]
    initial_state: tuple[float, ...]
    custom_field: Optional[str] = None

    @property
    def dim(self) -> int:
        return len(self.initial_state)

    @property
    def dt(self) -> float:
        return self.params["dt"]

    @property
    def t_end(self) -> float:
        return self.params["t_end"]

    @property
    def method(self) -> str:
        return self.params["method"]

    def gravity(self) -> GravityParams:
        p = self.params
        return GravityParams(p["G"], p["m1"], p["m2"], p["rho_min"])


# ---------------------------------------------------------------------------
# parsing


def _line_index(text: str) -> dict[str, int]:
    """Map dotted key paths to 1-based line numbers."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    index: dict[str, int] = {}

    def visit(node: Any, path: str) -> None:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key = f"{path}.{key_node.value}" if path else str(key_node.value)
                index[key] = key_node.start_mark.line + 1
                visit(value_node, key)

    if root is not None:
        visit(root, "")
    return index


class _Reader:
    """Validation helpers that know where each key sits in the file."""

    def __init__(self, text: str):
        self.lines = _line_index(text)

    def error(self, message: str, field: str) -> ConfigError:
        line = self.lines.get(field)
        if line is None:
            line = self.lines.get(field.split(".")[0])
        return ConfigError(message, field=field, line=line)

    def number(self, value: Any, field: str) -> float:
        if isinstance(value, bool):
            raise self.error(f"expected a number, got {value!r}", field)
        if isinstance(value, str):
            # YAML 1.1 reads exponent forms without a dot ("1e-3") as strings.
            try:
                value = float(value)
            except ValueError:
                raise self.error(f"expected a number, got {value!r}", field)
        if not isinstance(value, (int, float)):
            raise self.error(f"expected a number, got {value!r}", field)
        value = float(value)
        if not math.isfinite(value):
            raise self.error(f"expected a finite number, got {value!r}", field)
        return value

    def integer(self, value: Any, field: str) -> int:
        number = self.number(value, field)
        if number != int(number):
            raise self.error(f"expected an integer, got {value!r}", field)
        return int(number)


def _resolve_preset(reader: _Reader, raw: Any) -> str:
    if not isinstance(raw, str) or not raw.strip():
        raise reader.error("preset is required", "scenario.preset")
    resolved = resolve_name(raw, PRESET_NAMES, PRESET_ALIASES, "scenario.preset")
    if resolved is None:
        message = f"unknown preset {raw!r}"
        suggestions = suggest(raw, PRESET_NAMES)
        if suggestions:
            message += f"; did you mean: {', '.join(suggestions)}?"
        raise reader.error(message, "scenario.preset")
    return resolved


def _parse_params(reader: _Reader, preset: str, raw: Any) -> dict[str, Any]:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise reader.error("params must be a mapping", "params")

    defaults = {**COMMON_PARAMS, **PRESETS[preset]["params"]}
    if preset == "custom":
        defaults["t_end"] = None
        for key in CUSTOM_REQUIRED_PARAMS:
            if key not in raw:
                raise reader.error(f"custom scenarios must set {key}", f"params.{key}")

    params: dict[str, Any] = {}
    for key, value in raw.items():
        key = str(key)
        where = f"params.{key}"
        if key not in defaults:
            message = f"unknown parameter {key!r} for preset {preset}"
            suggestions = suggest(key, defaults)
            if suggestions:
                message += f"; did you mean: {', '.join(suggestions)}?"
            raise reader.error(message, where)
        if key in STRING_PARAMS:
            text = str(value).strip().lower()
            if text not in METHODS:
                raise reader.error(f"method must be one of {sorted(METHODS)}, got {value!r}", where)
            params[key] = text
        elif key in INTEGER_PARAMS:
            params[key] = reader.integer(value, where)
        else:
            params[key] = reader.number(value, where)

    merged = {**defaults, **params}

    if not merged["dt"] > 0:
        raise reader.error(f"dt must be positive, got {merged['dt']}", "params.dt")
    if not merged["t_end"] >= merged["dt"]:
        raise reader.error(
            f"t_end must be at least dt, got t_end={merged['t_end']}, dt={merged['dt']}",
            "params.t_end",
        )
    if merged["grid"] < 2:
        raise reader.error(f"grid needs at least 2 nodes, got {merged['grid']}", "params.grid")
    if preset in MECHANICAL_PRESETS:
        if merged["G"] < 0:
            raise reader.error(f"G must be >= 0, got {merged['G']}", "params.G")
        for key in ("m1", "m2", "rho_min"):
            if not merged[key] > 0:
                raise reader.error(f"{key} must be positive, got {merged[key]}", f"params.{key}")
    if preset == "clock" and not merged["window"] > 0:
        raise reader.error(f"window must be positive, got {merged['window']}", "params.window")
    return merged


def _parse_state(reader: _Reader, preset: str, raw: Any) -> tuple[float, ...]:
    if raw is None:
        default = PRESETS[preset]["initial_state"]
        if default is None:
            raise reader.error("custom scenarios must set initial_state", "initial_state")
        return tuple(float(v) for v in default)
    if not isinstance(raw, list) or not raw:
        raise reader.error("initial_state must be a non-empty list of numbers", "initial_state")
    state = tuple(reader.number(v, "initial_state") for v in raw)
    expected = PRESETS[preset]["initial_state"]
    if preset in MECHANICAL_PRESETS or preset == "clock":
        if len(state) != len(expected):
            raise reader.error(
                f"preset {preset} needs {len(expected)} state coordinates, got {len(state)}",
                "initial_state",
            )
    return state


def _check_admissible(reader: _Reader, cfg: ScenarioConfig) -> None:
    """Reject initial states that start on a singularity or outside the clock window."""
    x = np.array(cfg.initial_state)
    if cfg.preset in ("gravity-circular", "gravity-elliptic"):
        if norm(x[:3]) <= cfg.params["rho_min"]:
            raise reader.error("initial position lies within rho_min of the source", "initial_state")
    elif cfg.preset == "two-body":
        if norm(x[6:9] - x[0:3]) <= cfg.params["rho_min"]:
            raise reader.error("initial positions lie within rho_min of each other", "initial_state")
    elif cfg.preset == "clock":
        if not abs(x[0]) < cfg.params["window"]:
            raise reader.error("initial time lies outside the clock window", "initial_state")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate scenario text.

    Raises:
        ConfigError: Naming the offending field and, where known, its line.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"malformed YAML: {problem}", line=mark.line + 1 if mark else None)

    reader = _Reader(text)
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must be a mapping of sections", line=1)
    for key in raw:
        if key not in SECTIONS:
            raise reader.error(f"unknown section {key!r}; expected one of {', '.join(SECTIONS)}", str(key))

    head = raw.get("scenario")
    if not isinstance(head, dict):
        raise reader.error("missing 'scenario' section with a preset", "scenario")
    preset = _resolve_preset(reader, head.get("preset"))
    unknown = set(head) - {"name", "preset"}
    if unknown:
        raise reader.error(f"unknown key(s) {sorted(unknown)}", f"scenario.{sorted(unknown)[0]}")
    name = str(head.get("name") or preset)

    params = _parse_params(reader, preset, raw.get("params"))
    state = _parse_state(reader, preset, raw.get("initial_state"))

    custom_field = raw.get("field")
    if preset == "custom":
        if not isinstance(custom_field, str) or not custom_field.strip():
            raise reader.error("custom scenarios need a field expression", "field")
        custom_field = custom_field.strip()
        try:
            f = parse_expression(custom_field, len(state))
        except NotationError as exc:
            raise reader.error(f"malformed expression: {exc.message}", "field")
        if f.codomain_dim != len(state):
            raise reader.error(
                f"field lands in R^{f.codomain_dim} but the state lives in R^{len(state)}",
                "field",
            )
    elif custom_field is not None:
        raise reader.error("field only applies to the custom preset", "field")

    cfg = ScenarioConfig(name, preset, params, state, custom_field)
    _check_admissible(reader, cfg)
    return cfg


def load_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc.strerror}", field=path)
    return parse_config(text)


def print_config(cfg: ScenarioConfig) -> str:
    """Canonical YAML text for ``cfg``."""
    doc: dict[str, Any] = {
        "scenario": {"name": cfg.name, "preset": cfg.preset},
        "params": dict(cfg.params),
    }
    if cfg.custom_field is not None:
        doc["field"] = cfg.custom_field
    doc["initial_state"] = list(cfg.initial_state)
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


# ---------------------------------------------------------------------------
# running


@dataclass
class RunArtifact:
    config: ScenarioConfig
    trajectory: Trajectory
    energy: np.ndarray
    lz: np.ndarray
    residual: np.ndarray
    summary: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        count = len(self.trajectory)
        for name in ("energy", "lz", "residual"):
            if getattr(self, name).shape[0] != count:
                raise ValueError(f"{name} has {getattr(self, name).shape[0]} rows for {count} states")


def build_field(cfg: ScenarioConfig) -> VectorField:
    """The vector field a scenario integrates."""
    if cfg.preset in ("gravity-circular", "gravity-elliptic"):
        return lagrangian_field(cfg.gravity())
    if cfg.preset == "two-body":
        p = cfg.params
        return two_body_field(p["G"], p["m1"], p["m2"], p["rho_min"])
    if cfg.preset == "clock":
        return clock_field(Clock(cfg.params["window"]))
    if cfg.preset == "linear-field":
        return whole_space_field(parse_expression("x", cfg.dim))
    return whole_space_field(parse_expression(cfg.custom_field, cfg.dim))


def _mechanics(cfg: ScenarioConfig, tr: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    count = len(tr)
    energy = np.full(count, np.nan)
    lz = np.full(count, np.nan)
    if cfg.preset in ("gravity-circular", "gravity-elliptic"):
        gp = cfg.gravity()
        for k, s in enumerate(tr.states):
            cs = ConfigState.from_flat(s)
            energy[k] = total_energy(gp, cs)
            lz[k] = angular_momentum(cs, gp.m2)[2]
    elif cfg.preset == "two-body":
        p = cfg.params
        for k, s in enumerate(tr.states):
            energy[k] = two_body_energy(p["G"], p["m1"], p["m2"], s)
            lz[k] = (
                p["m1"] * np.cross(s[0:3], s[3:6])[2]
                + p["m2"] * np.cross(s[6:9], s[9:12])[2]
            )
    return energy, lz


def _spot_check(X: VectorField, tr: Trajectory, seed: int) -> float:
    """Largest AD-vs-central-difference gap of the field at seeded trajectory states."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(tr), size=min(SPOT_CHECKS, len(tr)))
    worst = 0.0
    for k in picks:
        x = tr.states[int(k)]
        e = rng.standard_normal(X.dim)
        try:
            ad = differential(X.field, x, e).coords
            fd = fd_oracle(X.field, x, e).coords
        except DomainError:
            continue
        worst = max(worst, norm(ad - fd) / max(1.0, norm(ad)))
    return worst


def _drift(series: np.ndarray, relative: bool) -> Optional[float]:
    if np.all(np.isnan(series)):
        return None
    gap = float(np.max(np.abs(series - series[0])))
    if relative and series[0] != 0:
        gap /= abs(float(series[0]))
    return gap


def run_scenario(cfg: ScenarioConfig) -> RunArtifact:
    """Integrate a scenario and compute its per-step diagnostics.

    Raises:
        SingularityError: A stage left the guarded region.
        NonContractionError: Picard iteration failed to settle.
    """
    X = build_field(cfg)
    q0 = np.array(cfg.initial_state)
    if cfg.method == "picard":
        tr = integrate_picard(X, q0, cfg.t_end, grid=cfg.params["grid"])
    else:
        tr = integrate_rk4(X, q0, cfg.t_end, cfg.dt)

    report = check_trajectory(X, tr)
    energy, lz = _mechanics(cfg, tr)

    summary: dict[str, Any] = {
        "name": cfg.name,
        "preset": cfg.preset,
        "method": tr.method,
        "steps": len(tr) - 1,
        "dt": tr.dt,
        "t_final": float(tr.times[-1]),
        "final_state": tr.states[-1].tolist(),
        "max_residual": report.max_residual,
        "energy_drift": _drift(energy, relative=True),
        "lz_drift": _drift(lz, relative=False),
        "field_fd_deviation": _spot_check(X, tr, cfg.params["seed"]),
    }
    if cfg.preset in ("gravity-circular", "gravity-elliptic"):
        summary["return_distance"] = norm(tr.states[-1][:3] - q0[:3])
    if cfg.preset == "two-body":
        p = cfg.params
        p0 = total_momentum(p["m1"], p["m2"], tr.states[0]).coords
        summary["momentum_drift"] = max(
            norm(total_momentum(p["m1"], p["m2"], s).coords - p0) for s in tr.states
        )
    return RunArtifact(cfg, tr, energy, lz, report.profile, summary)


# ---------------------------------------------------------------------------
# CSV trace


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def render_csv(ra: RunArtifact) -> str:
    """Header ``t,state_0,...,state_{n-1},energy,Lz,residual``, one row per state."""
    tr = ra.trajectory
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    n = tr.states.shape[1]
    writer.writerow(["t", *(f"state_{i}" for i in range(n)), "energy", "Lz", "residual"])
    for k in range(len(tr)):
        row = [tr.times[k], *tr.states[k], ra.energy[k], ra.lz[k], ra.residual[k]]
        writer.writerow([_fmt(v) for v in row])
    return buffer.getvalue()


def emit_csv(ra: RunArtifact, path: str) -> None:
    """Write the trace to ``path``.

    Raises:
        OutputError: If the file cannot be written.
    """
    text = render_csv(ra)
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write trace: {exc.strerror or exc}", path=path) from exc
