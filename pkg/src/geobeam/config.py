"""Run configuration: INI sections, strict key checking and named presets.

Example::

    [material]
    E = 1.0
    [grid]
    n_nodes = 101
    [bc]
    end0 = clamped
    endL = free
    [time]
    cfl = 0.5
    t_end = 1.0
    [init]
    kind = bending_pluck
    amplitude = 0.1

Vectors are written as three comma-separated reals. Keys are case-sensitive
and any key or section outside the schema is rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import BoundarySpec, End
from .material import MaterialParams
from .state import SCHEMES, ConfigurationError

INIT_KINDS = ("zero", "bending_pluck", "axial_pulse", "twist_pulse", "rigid_spin", "static_inject")
SUBSPACES = ("full", "longitudinal", "planar13", "planar23", "rigid")
OUTPUT_FORMATS = ("trajectory", "ledger", "closure")
STRING_FLOOR = 1e-8


@dataclass(frozen=True)
class GridSection:
    n_nodes: int = 101
    scheme: str = "sbp42"


@dataclass(frozen=True)
class TimeSection:
    """Exactly one of ``dt`` and ``cfl`` sets the step; ``cfl`` alone defaults to 0.5."""

    t_end: float = 1.0
    dt: float | None = None
    cfl: float | None = None
    output_stride: int = 1


@dataclass(frozen=True)
class InitSection:
    kind: str = "zero"
    amplitude: float = 0.0
    mode: int = 1
    axis: int = 2
    omega0: tuple = (0.0, 0.0, 0.0)
    eps0: tuple = (0.0, 0.0, 0.0)
    kappa0: tuple = (0.0, 0.0, 0.0)
    noise: float = 0.0


@dataclass(frozen=True)
class ModelSection:
    subspace: str = "full"
    string: bool = False


@dataclass(frozen=True)
class StaticSection:
    mode: str = "ivp"
    eps0: tuple = (0.0, 0.0, 0.0)
    kappa0: tuple = (0.0, 0.0, 0.0)
    tip_N: tuple = (0.0, 0.0, 0.0)
    tip_M: tuple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    formats: tuple = OUTPUT_FORMATS


@dataclass(frozen=True)
class SimConfig:
    material: MaterialParams = field(default_factory=MaterialParams)
    grid: GridSection = field(default_factory=GridSection)
    bc: BoundarySpec = field(default_factory=BoundarySpec)
    time: TimeSection = field(default_factory=TimeSection)
    init: InitSection = field(default_factory=InitSection)
    model: ModelSection = field(default_factory=ModelSection)
    static: StaticSection = field(default_factory=StaticSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        validate(self)

    def replace(self, **sections):
        """Copy with whole sections swapped or with ``section={key: value}`` updates."""
        out = {}
        for name, value in sections.items():
            cur = getattr(self, name)
            out[name] = dataclasses.replace(cur, **value) if isinstance(value, dict) else value
        return dataclasses.replace(self, **out)


SECTIONS = {
    "material": MaterialParams,
    "grid": GridSection,
    "bc": BoundarySpec,
    "time": TimeSection,
    "init": InitSection,
    "model": ModelSection,
    "static": StaticSection,
    "output": OutputSection,
}


def _vec3(text):
    parts = [p for p in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise ValueError(f"expected three reals, got {text!r}")
    return tuple(float(p) for p in parts)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parser_for(cls, key):
    if cls is BoundarySpec:
        return lambda s: End(s.strip().lower())
    f = next(f for f in dataclasses.fields(cls) if f.name == key)
    default = f.default
    if key == "formats":
        return lambda s: tuple(p for p in s.replace(",", " ").split())
    if isinstance(default, bool):
        return _bool
    if isinstance(default, tuple):
        return _vec3
    if isinstance(default, int):
        return lambda s: int(s.strip())
    if isinstance(default, str):
        return lambda s: s.strip()
    return lambda s: float(s)


def parse_config(text, source="<string>"):
    """Build a :class:`SimConfig` from INI text; unknown sections or keys are errors."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from None
    sections = {}
    for name in cp.sections():
        if name not in SECTIONS:
            raise ConfigurationError(f"{source}: unknown section [{name}]")
        cls = SECTIONS[name]
        known = {f.name for f in dataclasses.fields(cls)}
        values = {}
        for key, raw in cp.items(name):
            if key not in known:
                raise ConfigurationError(f"{source}: unknown key {name}.{key}")
            try:
                values[key] = _parser_for(cls, key)(raw)
            except ValueError as exc:
                raise ConfigurationError(f"{source}: bad value for {name}.{key}: {exc}") from None
        try:
            sections[name] = cls(**values)
        except (ValueError, TypeError) as exc:
            raise ConfigurationError(f"{source}: [{name}] {exc}") from None
    return SimConfig(**sections)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))


def _fmt(value):
    if isinstance(value, End):
        return value.value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_ini(cfg: SimConfig):
    """INI text that :func:`parse_config` maps back to ``cfg``."""
    lines = []
    for name in SECTIONS:
        sec = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in dataclasses.fields(sec):
            value = getattr(sec, f.name)
            if value is not None:
                lines.append(f"{f.name} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def validate(cfg: SimConfig):
    g, t, i = cfg.grid, cfg.time, cfg.init
    if g.scheme not in SCHEMES:
        raise ConfigurationError(f"grid.scheme must be one of {SCHEMES}, got {g.scheme!r}")
    if g.n_nodes < (8 if g.scheme == "sbp42" else 3):
        raise ConfigurationError(f"grid.n_nodes={g.n_nodes} is too small for scheme {g.scheme!r}")
    if not t.t_end > 0:
        raise ConfigurationError(f"time.t_end must be > 0, got {t.t_end!r}")
    if t.dt is not None and t.cfl is not None:
        raise ConfigurationError("set only one of time.dt and time.cfl")
    if t.dt is not None and not t.dt > 0:
        raise ConfigurationError(f"time.dt must be > 0, got {t.dt!r}")
    if t.cfl is not None and not 0 < t.cfl <= 0.5:
        raise ConfigurationError(f"time.cfl must lie in (0, 0.5], got {t.cfl!r}")
    if t.output_stride < 1:
        raise ConfigurationError(f"time.output_stride must be >= 1, got {t.output_stride}")
    if i.kind not in INIT_KINDS:
        raise ConfigurationError(f"init.kind must be one of {INIT_KINDS}, got {i.kind!r}")
    if i.mode < 1:
        raise ConfigurationError(f"init.mode must be >= 1, got {i.mode}")
    if i.axis not in (1, 2, 3):
        raise ConfigurationError(f"init.axis must be 1, 2 or 3, got {i.axis}")
    if i.noise < 0:
        raise ConfigurationError(f"init.noise must be >= 0, got {i.noise!r}")
    if cfg.model.subspace not in SUBSPACES:
        raise ConfigurationError(f"model.subspace must be one of {SUBSPACES}, got {cfg.model.subspace!r}")
    if cfg.static.mode not in ("ivp", "shoot"):
        raise ConfigurationError(f"static.mode must be 'ivp' or 'shoot', got {cfg.static.mode!r}")
    bad = [f for f in cfg.output.formats if f not in OUTPUT_FORMATS]
    if bad:
        raise ConfigurationError(f"output.formats: unknown entries {bad}, expected a subset of {OUTPUT_FORMATS}")


def active_mask(subspace):
    """Boolean mask over the 12 field components (v, omega, eps, kappa) left free to evolve."""
    active = {
        "full": range(12),
        "longitudinal": (2, 5, 8, 11),
        "planar13": (0, 2, 4, 6, 8, 10),
        "planar23": (1, 2, 3, 7, 8, 9),
        "rigid": range(6),
    }[subspace]
    mask = np.zeros(12, dtype=bool)
    mask[list(active)] = True
    return mask


def preset(name) -> SimConfig:
    """Config template for one of the special cases of the model."""
    quarter = 0.5 * np.pi
    presets = {
        "longitudinal": SimConfig(
            grid=GridSection(n_nodes=201),
            time=TimeSection(t_end=82.0, cfl=0.5, output_stride=4),
            init=InitSection(kind="axial_pulse", amplitude=1e-6, mode=1),
            model=ModelSection(subspace="longitudinal"),
            output=OutputSection(formats=("ledger", "closure")),
        ),
        "planar13": SimConfig(
            init=InitSection(kind="bending_pluck", amplitude=0.1, mode=1, axis=2),
            model=ModelSection(subspace="planar13"),
        ),
        "planar23": SimConfig(
            init=InitSection(kind="bending_pluck", amplitude=0.1, mode=1, axis=1),
            model=ModelSection(subspace="planar23"),
        ),
        "static": SimConfig(static=StaticSection(mode="ivp", kappa0=(0.0, quarter, 0.0))),
        "rigid": SimConfig(
            grid=GridSection(n_nodes=8),
            bc=BoundarySpec(End.FREE, End.FREE),
            time=TimeSection(t_end=1.0, dt=1e-3),
            init=InitSection(kind="rigid_spin", omega0=(0.3, 0.0, 1.0)),
            model=ModelSection(subspace="rigid"),
        ),
        "string": SimConfig(
            bc=BoundarySpec(End.CLAMPED, End.CLAMPED),
            init=InitSection(kind="axial_pulse", amplitude=1e-3, mode=1, noise=1e-4),
            model=ModelSection(string=True),
        ),
    }
    if name not in presets:
        raise ConfigurationError(f"unknown preset {name!r}, expected one of {sorted(presets)}")
    return presets[name]


PRESETS = ("longitudinal", "planar13", "planar23", "static", "rigid", "string")
