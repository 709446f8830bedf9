"""Run configuration: strict parsing of TOML (or JSON sidecar) files.

Every field has a documented default; unknown keys are rejected so that a
typo never silently falls back to a default.  The same dictionary form is
written into the metadata sidecar of every run, which can be fed back as a
config to reproduce the run exactly.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import BathSpec, BathTerm, Geometry, System

__all__ = [
    "ConfigError",
    "ModelConfig",
    "BathConfig",
    "NumericsConfig",
    "SweepConfig",
    "OutputConfig",
    "RunConfig",
    "load_config",
    "parse_config_dict",
    "apply_overrides",
    "config_to_dict",
    "config_to_toml",
]


class ConfigError(ValueError):
    """Invalid, unknown or ill-typed configuration content."""


@dataclass
class ModelConfig:
    n: int = 1
    geometry: str = "linear"
    coupling: float = 1.0          # nearest-neighbour dipole coupling V
    angle: float = 0.0             # angle between dipoles; enters via V cos(angle)
    site_energies: list = None     # defaults to all zero
    dipoles: list = None           # defaults to all one


@dataclass
class BathConfig:
    g: float = 1.0
    gamma: float = 1.0
    omega: float = 1.0
    terms: list = None             # optional multi-term list of {g, gamma, omega}


@dataclass
class NumericsConfig:
    e_max: int = 12
    epsilon: float = 0.01
    omega_min: float = -4.0
    omega_max: float = 6.0
    omega_points: int = 2001
    residual_tol: float = 1e-10
    direct_limit: int = 200_000
    max_unknowns: int = 5_000_000
    workers: int = 1


@dataclass
class SweepConfig:
    axis: str = None               # one of gamma, g, V
    values: list = None


@dataclass
class OutputConfig:
    stem: str = "spectrum"
    directory: str = "."


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    bath: BathConfig = field(default_factory=BathConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = {
    "model": ModelConfig,
    "bath": BathConfig,
    "numerics": NumericsConfig,
    "sweep": SweepConfig,
    "output": OutputConfig,
}

def parse_config_dict(raw: dict, source: str = "<config>") -> RunConfig:
    """Build a RunConfig from a nested dict, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a table of sections")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(
            f"{source}: unknown section(s) {sorted(unknown)}; "
            f"expected {sorted(_SECTIONS)}"
        )
    sections = {}
    for name, cls in _SECTIONS.items():
        content = raw.get(name, {})
        if not isinstance(content, dict):
            raise ConfigError(f"{source}: section [{name}] must be a table")
        valid = {f.name for f in dataclasses.fields(cls)}
        bad = set(content) - valid
        if bad:
            raise ConfigError(
                f"{source}: unknown key(s) in [{name}]: "
                + ", ".join(f"{name}.{k}" for k in sorted(bad))
                + f"; valid keys: {sorted(valid)}"
            )
        coerced = {k: _coerce(name, k, v, cls) for k, v in content.items()}
        sections[name] = cls(**coerced)
    cfg = RunConfig(**sections)
    _validate(cfg, source)
    return cfg


def _coerce(section, key, value, cls):
    hints = {f.name: f.type for f in dataclasses.fields(cls)}
    hint = hints[key]
    if hint in ("float", float) and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if hint in ("int", int):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
        return int(value)
    return value


def _validate(cfg: RunConfig, source: str):
    m, b, n, sw = cfg.model, cfg.bath, cfg.numerics, cfg.sweep
    try:
        Geometry.parse(m.geometry)
    except ValueError as exc:
        raise ConfigError(f"{source}: model.geometry: {exc}") from None
    if m.n < 1:
        raise ConfigError(f"{source}: model.n must be >= 1")
    if n.omega_points < 2:
        raise ConfigError(f"{source}: numerics.omega_points must be >= 2")
    if not n.omega_min < n.omega_max:
        raise ConfigError(f"{source}: numerics.omega_min must be < omega_max")
    if n.epsilon <= 0:
        raise ConfigError(f"{source}: numerics.epsilon must be > 0")
    if n.e_max < 0:
        raise ConfigError(f"{source}: numerics.e_max must be >= 0")
    if n.workers < 1:
        raise ConfigError(f"{source}: numerics.workers must be >= 1")
    if b.gamma < 0:
        raise ConfigError(f"{source}: bath.gamma must be >= 0")
    if b.g < 0:
        raise ConfigError(f"{source}: bath.g must be >= 0")
    if b.terms is not None:
        if not isinstance(b.terms, list) or not b.terms:
            raise ConfigError(f"{source}: bath.terms must be a non-empty list of tables")
        for i, term in enumerate(b.terms):
            if not isinstance(term, dict) or set(term) - {"g", "gamma", "omega"}:
                raise ConfigError(
                    f"{source}: bath.terms[{i}] must be a table with keys g, gamma, omega"
                )
    if (sw.axis is None) != (sw.values is None):
        raise ConfigError(f"{source}: sweep.axis and sweep.values must be set together")
    if sw.axis is not None:
        if sw.axis not in ("gamma", "g", "V"):
            raise ConfigError(
                f"{source}: sweep.axis must be one of gamma, g, V; got {sw.axis!r}"
            )
        if not isinstance(sw.values, list) or len(sw.values) == 0:
            raise ConfigError(f"{source}: sweep.values must be a non-empty list")


def load_config(path) -> RunConfig:
    """Load a TOML config, or a JSON config / metadata sidecar."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        with open(path, "rb") as fh:
            raw = json.load(fh)
        if isinstance(raw, dict) and "config" in raw:
            raw = raw["config"]  # metadata sidecar round-trip
    else:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return parse_config_dict(raw, source=str(path))


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply `section.key=value` override strings onto a raw config dict."""
    out = json.loads(json.dumps(raw))  # deep copy, JSON types only
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, text = item.split("=", 1)
        parts = dotted.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key {dotted!r} must be section.key")
        section, key = parts
        try:
            value = tomllib.loads(f"v = {text}")["v"]
        except tomllib.TOMLDecodeError:
            value = text  # bare string
        out.setdefault(section, {})[key] = value
    return out


def config_to_dict(cfg: RunConfig) -> dict:
    """Nested plain-dict form, omitting unset optional fields."""
    out = {}
    for name in _SECTIONS:
        section = dataclasses.asdict(getattr(cfg, name))
        out[name] = {k: v for k, v in section.items() if v is not None}
    return out


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k} = {_toml_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot render {type(v)} as TOML")


def config_to_toml(cfg: RunConfig) -> str:
    lines = []
    for name, content in config_to_dict(cfg).items():
        lines.append(f"[{name}]")
        for k, v in content.items():
            lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")
    return "\n".join(lines)


def build_system(cfg: RunConfig) -> System:
    """Instantiate the model objects described by a config."""
    m, b = cfg.model, cfg.bath
    if b.terms is not None:
        terms = [
            BathTerm.lorentzian(
                float(t.get("g", b.g)),
                float(t.get("gamma", b.gamma)),
                float(t.get("omega", b.omega)),
            )
            for t in b.terms
        ]
        bath = BathSpec.from_terms(m.n, terms)
    else:
        bath = BathSpec.uniform(m.n, b.g, b.gamma, b.omega)
    try:
        return System(
            aggregate=_aggregate_from(m),
            bath=bath,
        )
    except (ValueError, NotImplementedError) as exc:
        raise ConfigError(str(exc)) from None


def _aggregate_from(m: ModelConfig):
    from .model import AggregateSpec

    return AggregateSpec(
        n_monomers=m.n,
        geometry=m.geometry,
        site_energies=m.site_energies,
        dipole_coupling=m.coupling,
        dipole_angle=m.angle,
        dipole_magnitudes=m.dipoles,
    )
