"""Run configuration: TOML loading, defaults, validation, overrides.

A config file is TOML with the sections below; an empty file gives the
defaults (4 K, gamma = 1/0.2 ns, InGaAs/GaAs material).  Unknown keys are
rejected with their section path.  Pulse areas may be given as plain
numbers (radians) or as pi expressions such as "pi/8" or "3*pi/4".

[material]   mass_density (kg/m^3), sound_speed (m/s),
             deform_e, deform_h (eV), cutoff_e, cutoff_h (ps^-1)
[bath]       temperature (K), gamma (ps^-1)
[pulse]      area (rad or pi expression), fwhm (ps),
             center (ps, optional; default 3 sigma), drive_renorm (bool)
[grid]       t_max (ps), n_points
[numerics.quadrature]  rel_tol, abs_tol, omega_max (ps^-1, optional),
                       max_subdivisions
[numerics.integrator]  method (rk45-adaptive | rk4-fixed), rel_tol,
                       abs_tol, max_step (ps, optional)
[output]     directory, formats (subset of ["csv", "json"])
"""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .bath import QuadratureConfig, SpectralDensityParams
from .engine import IntegratorConfig, PulseEnvelope

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_area", "config_hash"]


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending location."""


DEFAULTS = {
    "material": {
        "mass_density": 5370.0,
        "sound_speed": 5110.0,
        "deform_e": 7.0,
        "deform_h": -3.5,
        "cutoff_e": 1.807,
        "cutoff_h": 2.078,
    },
    "bath": {
        "temperature": 4.0,
        "gamma": 0.005,  # 1 / 0.2 ns
    },
    "pulse": {
        "area": "pi/8",
        "fwhm": 20.0,
        "center": None,
        "drive_renorm": True,
    },
    "grid": {
        "t_max": 2000.0,
        "n_points": 1001,
    },
    "numerics": {
        "quadrature": {
            "rel_tol": 1e-10,
            "abs_tol": 1e-13,
            "omega_max": None,
            "max_subdivisions": 300,
        },
        "integrator": {
            "method": "rk45-adaptive",
            "rel_tol": 1e-9,
            "abs_tol": 1e-12,
            "max_step": None,
        },
    },
    "output": {
        "directory": "out",
        "formats": ["csv", "json"],
    },
}

# keys whose value may be None (absent means "use the derived default")
_OPTIONAL = {
    "pulse.center",
    "numerics.quadrature.omega_max",
    "numerics.integrator.max_step",
}

_PI_PATTERN = re.compile(r"^([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)?\*?pi(?:/([0-9]*\.?[0-9]+))?$")


def parse_area(value) -> float:
    """Pulse area in radians from a number or a pi expression like "pi/8"."""
    if isinstance(value, bool):
        raise ConfigError(f"pulse.area: expected a number or pi expression, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip().lower().replace(" ", "")
    if "pi" not in s:
        try:
            return float(s)
        except ValueError:
            raise ConfigError(f"pulse.area: cannot parse {value!r}") from None
    m = _PI_PATTERN.match(s)
    if not m:
        raise ConfigError(f"pulse.area: cannot parse pi expression {value!r}")
    num = float(m.group(1)) if m.group(1) else 1.0
    den = float(m.group(2)) if m.group(2) else 1.0
    return num * math.pi / den


def _merge(base: dict, overlay: dict, path="") -> dict:
    """Recursively overlay user values on defaults, rejecting unknown keys."""
    out = copy.deepcopy(base)
    for key, value in overlay.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{where}' must be a section, got {value!r}")
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def _as_float(resolved, where, minimum=None, strict=False, optional=False):
    value = _dig(resolved, where)
    if value is None:
        if optional or where in _OPTIONAL:
            return None
        raise ConfigError(f"'{where}' is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}' must be a number, got {value!r}")
    value = float(value)
    if minimum is not None:
        if strict and value <= minimum:
            raise ConfigError(f"'{where}' must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise ConfigError(f"'{where}' must be >= {minimum}, got {value}")
    return value


def _dig(d, dotted):
    for part in dotted.split("."):
        d = d[part]
    return d


def _set_dotted(d, dotted, value):
    parts = dotted.split(".")
    for part in parts[:-1]:
        if part not in d or not isinstance(d[part], dict):
            raise ConfigError(f"unknown config key '{dotted}'")
        d = d[part]
    if parts[-1] not in d:
        raise ConfigError(f"unknown config key '{dotted}'")
    d[parts[-1]] = value


def _parse_override_value(text: str):
    """Best-effort typed parse of a --set value (TOML scalar rules)."""
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if text.lower() in ("none", "null", ""):
        return None
    if "," in text:
        return [_parse_override_value(part) for part in text.split(",")]
    return text


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; ``resolved`` is the canonical dict."""

    resolved: dict

    # -- typed accessors -------------------------------------------------
    @property
    def material(self) -> SpectralDensityParams:
        m = self.resolved["material"]
        return SpectralDensityParams(
            mass_density=m["mass_density"],
            sound_speed=m["sound_speed"],
            deform_e=m["deform_e"],
            deform_h=m["deform_h"],
            cutoff_e=m["cutoff_e"],
            cutoff_h=m["cutoff_h"],
        )

    @property
    def temperature(self) -> float:
        return self.resolved["bath"]["temperature"]

    @property
    def gamma(self) -> float:
        return self.resolved["bath"]["gamma"]

    @property
    def pulse_area(self) -> float:
        return parse_area(self.resolved["pulse"]["area"])

    @property
    def drive_renorm(self) -> bool:
        return bool(self.resolved["pulse"]["drive_renorm"])

    def pulse(self, area=None, fwhm=None) -> PulseEnvelope:
        p = self.resolved["pulse"]
        return PulseEnvelope.from_fwhm(
            area=self.pulse_area if area is None else area,
            fwhm=p["fwhm"] if fwhm is None else fwhm,
            center=p["center"],
        )

    @property
    def t_max(self) -> float:
        return self.resolved["grid"]["t_max"]

    @property
    def n_points(self) -> int:
        return int(self.resolved["grid"]["n_points"])

    @property
    def quadrature(self) -> QuadratureConfig:
        q = self.resolved["numerics"]["quadrature"]
        return QuadratureConfig(
            rel_tol=q["rel_tol"],
            abs_tol=q["abs_tol"],
            omega_max=q["omega_max"],
            max_subdivisions=int(q["max_subdivisions"]),
        )

    @property
    def integrator(self) -> IntegratorConfig:
        i = self.resolved["numerics"]["integrator"]
        return IntegratorConfig(
            method=i["method"],
            rel_tol=i["rel_tol"],
            abs_tol=i["abs_tol"],
            max_step=i["max_step"],
        )

    @property
    def out_dir(self) -> str:
        return self.resolved["output"]["directory"]

    @property
    def formats(self) -> list:
        return list(self.resolved["output"]["formats"])

    @property
    def hash(self) -> str:
        return config_hash(self.resolved)


def config_hash(resolved: dict) -> str:
    """Stable short hash of the canonical JSON form of a resolved config."""
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _validate(resolved: dict) -> None:
    _as_float(resolved, "material.mass_density", minimum=0.0, strict=True)
    _as_float(resolved, "material.sound_speed", minimum=0.0, strict=True)
    _as_float(resolved, "material.deform_e")
    _as_float(resolved, "material.deform_h")
    _as_float(resolved, "material.cutoff_e", minimum=0.0, strict=True)
    _as_float(resolved, "material.cutoff_h", minimum=0.0, strict=True)
    _as_float(resolved, "bath.temperature", minimum=0.0)
    _as_float(resolved, "bath.gamma", minimum=0.0, strict=True)
    parse_area(resolved["pulse"]["area"])
    _as_float(resolved, "pulse.fwhm", minimum=0.0, strict=True)
    _as_float(resolved, "pulse.center", minimum=0.0, optional=True)
    if not isinstance(resolved["pulse"]["drive_renorm"], bool):
        raise ConfigError("'pulse.drive_renorm' must be a boolean")
    _as_float(resolved, "grid.t_max", minimum=0.0, strict=True)
    n_points = resolved["grid"]["n_points"]
    if not isinstance(n_points, int) or n_points < 2:
        raise ConfigError(f"'grid.n_points' must be an integer >= 2, got {n_points!r}")
    _as_float(resolved, "numerics.quadrature.rel_tol", minimum=0.0, strict=True)
    _as_float(resolved, "numerics.quadrature.abs_tol", minimum=0.0, strict=True)
    _as_float(resolved, "numerics.quadrature.omega_max", minimum=0.0, strict=True, optional=True)
    _as_float(resolved, "numerics.integrator.rel_tol", minimum=0.0, strict=True)
    _as_float(resolved, "numerics.integrator.abs_tol", minimum=0.0, strict=True)
    _as_float(resolved, "numerics.integrator.max_step", minimum=0.0, strict=True, optional=True)
    method = resolved["numerics"]["integrator"]["method"]
    if method not in ("rk45-adaptive", "rk4-fixed"):
        raise ConfigError("'numerics.integrator.method' must be rk45-adaptive or rk4-fixed")
    formats = resolved["output"]["formats"]
    if not isinstance(formats, list) or not set(formats) <= {"csv", "json"}:
        raise ConfigError("'output.formats' must be a list drawn from ['csv', 'json']")
    if not isinstance(resolved["output"]["directory"], str):
        raise ConfigError("'output.directory' must be a string")
    # cross-checks
    wmax = resolved["numerics"]["quadrature"]["omega_max"]
    if wmax is not None and wmax <= max(
        resolved["material"]["cutoff_e"], resolved["material"]["cutoff_h"]
    ):
        raise ConfigError("'numerics.quadrature.omega_max' must exceed both cutoffs")


def load_config(
    path=None,
    overrides=(),
    scenario_defaults: dict | None = None,
    echo: bool = False,
) -> RunConfig:
    """Load, merge and validate a run configuration.

    ``path`` may be None (pure defaults).  ``scenario_defaults`` is a
    nested dict of per-command defaults applied before the user file, so a
    user value always wins.  ``overrides`` are "dotted.key=value" strings
    applied last.  With ``echo`` the resolved values go to stderr.
    """
    base = DEFAULTS
    if scenario_defaults:
        base = _merge(base, scenario_defaults)
    user = {}
    if path is not None:
        raw = Path(path).read_bytes()
        try:
            user = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    resolved = _merge(base, user)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, text = item.partition("=")
        _set_dotted(resolved, key.strip(), _parse_override_value(text.strip()))
    _validate(resolved)
    if echo:
        _echo(resolved)
    return RunConfig(resolved=resolved)


def _echo(resolved: dict, stream=None) -> None:
    stream = stream or sys.stderr
    buf = io.StringIO()
    for key, value in _flatten(resolved):
        buf.write(f"config {key} = {value!r}\n")
    stream.write(buf.getvalue())


def _flatten(d, prefix=""):
    for key in sorted(d):
        where = f"{prefix}.{key}" if prefix else key
        if isinstance(d[key], dict):
            yield from _flatten(d[key], where)
        else:
            yield where, d[key]
