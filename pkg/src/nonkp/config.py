"""INI-style scenario configuration.

A config file has sections of ``key = value`` lines.  Every key is optional
except ``[grid] Nx`` and ``Ny`` for scenarios that evolve the 2D system;
unknown sections or keys are rejected.  ``overrides`` (``section.key=value``)
take precedence over the file.  Lengths accept plain numbers or multiples of
``pi`` such as ``2pi`` or ``0.5*pi``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .integrate import SCHEMES, RunConfig
from .spectral import Grid2D

__all__ = ["SCENARIOS", "ConfigError", "Scenario", "parse_config", "SCHEMA"]

SCENARIOS = ("simulate", "dispersion-table", "mass-wave", "bourgain-scaling", "dn-verify", "conservation")
GRID_FREE = {"dn-verify"}
INITIAL_KINDS = ("random", "plane-wave", "mass-wave")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_PI = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


def _real(text: str) -> float:
    m = _PI.match(text)
    if m:
        coef = m.group(1)
        return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
    return float(text)


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean")


def _reals(text: str) -> tuple[float, ...]:
    return tuple(_real(p) for p in text.replace(";", ",").split(",") if p.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(_int(p) for p in text.replace(";", ",").split(",") if p.strip())


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _all_positive(v):
    return len(v) > 0 and all(x > 0 for x in v)


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any
    check: Callable[[Any], bool] | None = None
    constraint: str = ""


SCHEMA: dict[str, dict[str, Key]] = {
    "grid": {
        "Nx": Key(_int, None, lambda n: n >= 4 and n % 2 == 0, "an even integer >= 4"),
        "Ny": Key(_int, None, lambda n: n >= 4 and n % 2 == 0, "an even integer >= 4"),
        "Lx": Key(_real, 2 * math.pi, _positive, "positive"),
        "Ly": Key(_real, 2 * math.pi, _positive, "positive"),
    },
    "run": {
        "t_end": Key(_real, None, _nonneg, "non-negative"),
        "dt": Key(_real, None, _positive, "positive"),
        "scheme": Key(str, None, lambda s: s in SCHEMES, f"one of {', '.join(SCHEMES)}"),
        "snapshot_stride": Key(_int, 1, lambda n: n >= 1, ">= 1"),
        "diagnostics_stride": Key(_int, 1, lambda n: n >= 1, ">= 1"),
    },
    "initial": {
        "kind": Key(str, "random", lambda s: s in INITIAL_KINDS, f"one of {', '.join(INITIAL_KINDS)}"),
        "amplitude": Key(_real, 0.05, _nonneg, "non-negative"),
        "kmax": Key(_int, 4, lambda n: n >= 1, ">= 1"),
        "j": Key(_int, 1, None),
        "k": Key(_int, 1, None),
        "branch": Key(_int, 1, lambda b: b in (1, 2), "1 or 2"),
    },
    "check": {
        "drift_tol": Key(_real, 1e-6, _positive, "positive"),
        "fit_tol": Key(_real, 1e-10, _positive, "positive"),
        "residual_tol": Key(_real, 1e-4, _positive, "positive"),
        "slope_tol": Key(_real, 0.3, _positive, "positive"),
    },
    "dispersion": {
        "mode_max": Key(_int, 10, lambda n: n >= 0, ">= 0"),
    },
    "mass": {
        "eps": Key(_reals, (0.01, 0.02, 0.04), _all_positive, "a list of positive numbers"),
        "nonlinear_t_end": Key(_real, 1.0, _positive, "positive"),
    },
    "bourgain": {
        "b": Key(_real, 0.6, None),
        "s": Key(_real, 1.0, None),
        "eps": Key(_real, 0.1, lambda e: 0 < e < 0.25, "in (0, 1/4)"),
        "samples": Key(_int, 100, lambda n: n >= 1, ">= 1"),
        "cutoff_T_min": Key(_real, 1e-3, _positive, "positive"),
        "cutoff_T_max": Key(_real, 0.1, _positive, "positive"),
        "cutoff_slope_tol": Key(_real, 0.05, _positive, "positive"),
        "T_min": Key(_real, 0.05, _positive, "positive"),
        "T_max": Key(_real, 5.0, _positive, "positive"),
        "n_T": Key(_int, 9, lambda n: n >= 2, ">= 2"),
        "spread_tol": Key(_real, 0.05, _positive, "positive"),
        "Lt": Key(_real, 8.0, _positive, "positive"),
        "Nt": Key(_int, 256, lambda n: n >= 4 and n % 2 == 0, "an even integer >= 4"),
    },
    "dn": {
        "N": Key(_int, 64, lambda n: n >= 4 and n % 2 == 0, "an even integer >= 4"),
        "L": Key(_real, 2 * math.pi, _positive, "positive"),
        "h0": Key(_real, 1.0, _positive, "positive"),
        "k": Key(_int, 1, lambda n: n != 0, "nonzero"),
        "orders": Key(_ints, (1, 2, 3), lambda v: len(v) > 0 and all(j >= 1 for j in v), "a list of integers >= 1"),
        "amplitudes": Key(_reals, (0.01, 0.02, 0.04), _all_positive, "a list of positive numbers"),
    },
}

# per-scenario run defaults (t_end, dt, scheme); None means the integrator default
RUN_DEFAULTS = {
    "simulate": (10.0, None, "diagonal-IFRK4"),
    "conservation": (10.0, None, "diagonal-IFRK4"),
    "dispersion-table": (2.0, 0.1, "linear-exact"),
    "mass-wave": (2 * math.pi, 0.01, "linear-exact"),
    "bourgain-scaling": (0.0, None, "linear-exact"),
}


@dataclass(frozen=True)
class Scenario:
    kind: str
    params: dict[str, dict[str, Any]]
    grid: Grid2D | None = None
    run: RunConfig | None = None
    seed: int = 0
    threads: int = 1
    sources: dict[str, str] = field(default_factory=dict)

    def section(self, name: str) -> dict[str, Any]:
        return self.params[name]


def _read(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    return cp


def _apply_overrides(cp: configparser.ConfigParser, overrides: Sequence[str]):
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())


def parse_config(kind: str, path: str | None = None, overrides: Sequence[str] = (), *,
                 seed: int = 0, threads: int = 1) -> Scenario:
    """Read, validate and default a scenario configuration."""
    if kind not in SCENARIOS:
        raise ConfigError(f"unknown scenario {kind!r}; expected one of {', '.join(SCENARIOS)}")
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    cp = _read(path)
    _apply_overrides(cp, overrides)

    params: dict[str, dict[str, Any]] = {}
    sources: dict[str, str] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; expected one of {', '.join(SCHEMA)}")
        for name in cp[section]:
            if name not in SCHEMA[section]:
                raise ConfigError(f"unknown key {name!r} in [{section}]")
    for section, keys in SCHEMA.items():
        values = {}
        for name, rule in keys.items():
            raw = cp.get(section, name, fallback=None)
            if raw is None or raw == "":
                values[name] = rule.default
                continue
            try:
                value = rule.parse(raw)
            except ValueError:
                raise ConfigError(f"{name} in [{section}] could not be parsed from {raw!r}") from None
            if rule.check is not None and not rule.check(value):
                raise ConfigError(f"{name} in [{section}] must be {rule.constraint}, got {raw!r}")
            values[name] = value
            sources[f"{section}.{name}"] = raw
        params[section] = values

    if kind in GRID_FREE:
        return Scenario(kind, params, seed=seed, threads=threads, sources=sources)

    g = params["grid"]
    for name in ("Nx", "Ny"):
        if g[name] is None:
            raise ConfigError(f"missing required key {name} in [grid]")
    grid = Grid2D(g["Nx"], g["Ny"], float(g["Lx"]), float(g["Ly"]))

    r = params["run"]
    t_end, dt, scheme = RUN_DEFAULTS[kind]
    r["t_end"] = t_end if r["t_end"] is None else r["t_end"]
    r["dt"] = dt if r["dt"] is None else r["dt"]
    r["scheme"] = scheme if r["scheme"] is None else r["scheme"]
    try:
        run = RunConfig(grid, r["t_end"], r["dt"], r["scheme"], r["snapshot_stride"], r["diagnostics_stride"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    r["dt"] = run.dt
    return Scenario(kind, params, grid, run, seed, threads, sources)
