"""Key-value run configurations.

A config file holds ``key = value`` lines; ``#`` starts a comment.  Keys are the
long CLI flag names with dashes or underscores (``theta_deg``, ``warp``,
``grid``...), so every flag has a file equivalent.  Flags given on the command
line override file values.  Angles are in degrees here and radians in the API.
"""

from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .errors import ConfigError
from .generators import FAMILIES, GeneratorSpec

_GRID_MIN = 2


def read_config(path):
    """Parse a key-value file into a dict of strings."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{n}: empty key")
        out[key] = value.strip()
    return out


def parse_grid(text):
    try:
        parts = [int(p) for p in str(text).lower().replace("*", "x").split("x")]
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; use e.g. 64x64") from None
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2 or min(parts) < _GRID_MIN:
        raise ConfigError(f"grid must be NUxNV with both at least {_GRID_MIN}, got {text!r}")
    return tuple(parts)


def parse_floats(text, n=None, what="value"):
    try:
        vals = [float(p) for p in str(text).replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{what} needs {n} numbers, got {text!r}")
    return vals


def parse_constants(items):
    """``name=value`` pairs (a list, or one comma/space separated string)."""
    if items is None:
        return {}
    if isinstance(items, str):
        items = items.replace(",", " ").split()
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip().isidentifier():
            raise ConfigError(f"bad constant {item!r}; use name=value")
        out[name.strip()] = parse_floats(value, 1, "constant")[0]
    return out


def parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"bad boolean {text!r}")


@dataclass
class RunConfig:
    """Everything one CLI command needs, after merging file and flags."""

    command: str
    family: Optional[str] = None
    warp: str = "constant:1"
    theta_deg: Optional[float] = None
    alpha: Optional[str] = None
    t0: Optional[float] = None
    m: Optional[float] = None
    radius: float = 1.0
    gamma: Optional[tuple] = None
    domain: Optional[tuple] = None
    base_t: Optional[float] = None
    base_v: float = 0.0
    adapted: bool = False
    grid: tuple = (32, 32)
    mode: str = "auto"
    model: str = "raw"
    suite: str = "all"
    output: Optional[str] = None
    records: Optional[str] = None
    report: Optional[str] = None
    expr: Optional[str] = None
    const: dict = field(default_factory=dict)
    samples: Optional[str] = None
    tolerances: dict = field(default_factory=dict)
    point: Optional[tuple] = None

    def generator_spec(self):
        if self.family is None:
            raise ConfigError("no surface given: set family (or expr / samples for classify)")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        theta = np.pi / 4 if self.theta_deg is None else float(np.radians(self.theta_deg))
        if self.theta_deg == 90:
            theta = np.pi / 2
        kw = dict(family=self.family, warping=self.warp, theta=theta, domain=self.domain,
                  base_t=self.base_t, base_v=self.base_v, adapted=self.adapted)
        if self.family == "type_i":
            kw.update(alpha=self.alpha, gamma=self.gamma)
        elif self.alpha is not None:
            raise ConfigError("alpha only applies to type_i")
        if self.family == "type_iii":
            kw["t0"] = self.t0
        if self.family == "minimal_power":
            kw["m"] = self.m
        if self.family == "rotational":
            kw["radius"] = self.radius
        return GeneratorSpec(**kw)


_CONVERT = {
    "theta_deg": lambda s: parse_floats(s, 1, "theta_deg")[0],
    "t0": lambda s: parse_floats(s, 1, "t0")[0],
    "m": lambda s: parse_floats(s, 1, "m")[0],
    "radius": lambda s: parse_floats(s, 1, "radius")[0],
    "base_t": lambda s: parse_floats(s, 1, "base_t")[0],
    "base_v": lambda s: parse_floats(s, 1, "base_v")[0],
    "domain": lambda s: tuple(parse_floats(s, 4, "domain")),
    "point": lambda s: tuple(parse_floats(s, 2, "point")),
    "gamma": lambda s: tuple(p.strip() for p in str(s).split(";")),
    "grid": parse_grid,
    "adapted": parse_bool,
    "const": parse_constants,
}

KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "command")


def build_config(command, file_values=None, flag_values=None):
    """Merge file values and flag values (flags win) into a validated RunConfig."""
    merged = {}
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key.startswith("tol_") or key.startswith("tol."):
                merged.setdefault("tolerances", {})[key[4:]] = parse_floats(value, 1, key)[0]
                continue
            if key not in KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "gamma" and isinstance(value, (list, tuple)):
                merged[key] = tuple(value)
            elif key in _CONVERT and isinstance(value, str):
                merged[key] = _CONVERT[key](value)
            elif key == "const" and isinstance(value, list):
                merged[key] = {**merged.get(key, {}), **parse_constants(value)}
            else:
                merged[key] = value
    if merged.get("mode", "auto") not in ("auto", "analytic", "fd"):
        raise ConfigError(f"unknown derivative mode {merged['mode']!r}")
    if merged.get("gamma") is not None and len(merged["gamma"]) != 2:
        raise ConfigError("gamma needs two expressions separated by ';'")
    return RunConfig(command=command, **merged)
