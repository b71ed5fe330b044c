"""Named parameter sets and experiment configurations.

Experiment configurations can be built from a preset name, a JSON document,
or a preset overlaid with a partial JSON document. Unknown keys are
rejected with the dotted path of the offending field.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .copulas import CopulaSpec
from .cyber import CyberParams
from .dynamic import DynamicParams
from .errors import DomainError
from .joint import JointScenario, default_grid
from .safety import LifecyclePhase, SafetyParams, phase_params

__all__ = [
    "ConfigError",
    "CYBER_PRESETS",
    "EXPERIMENT_PRESETS",
    "ExperimentConfig",
    "cyber_preset",
    "load_config",
    "config_from_dict",
    "preset_config",
]


class ConfigError(DomainError):
    """Invalid experiment configuration; the message names the field path."""


CYBER_PRESETS: dict[str, CyberParams] = {
    "example1": CyberParams(
        alpha1=1.2, beta1=1.1, p0=3e-5, gamma=0.1, n_threshold=10000.0, mu=0.018, mu2=0.018, t_patch=48.0
    ),
    "results200": CyberParams(
        alpha1=1.2, beta1=1.1, p0=3e-5, gamma=0.1, n_threshold=10000.0, mu=0.018, mu2=0.018, t_patch=60.0
    ),
}


def cyber_preset(name: str) -> CyberParams:
    try:
        return CYBER_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown cyber preset {name!r}; expected one of {', '.join(CYBER_PRESETS)}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a CLI command needs to evaluate curves."""

    cyber: CyberParams
    safety: SafetyParams
    copula: CopulaSpec
    dynamic: Optional[DynamicParams] = None
    t_max: float = 200.0
    n_points: int = 401
    output_path: Optional[str] = None
    output_format: str = "csv"
    phase: Optional[str] = None
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def scenario(self) -> JointScenario:
        return JointScenario(self.copula, self.safety, self.cyber, default_grid(self.t_max, self.n_points))


# Presets are stored as plain documents so that a user config can overlay
# any subset of fields before validation.
_CYBER_FIELDS = ("alpha1", "beta1", "p0", "gamma", "n_threshold", "mu", "mu2", "t_patch")


def _cyber_doc(name: str) -> dict:
    params = CYBER_PRESETS[name]
    return {f: getattr(params, f) for f in _CYBER_FIELDS}


def _doc(cyber: str, phase: str, f0: float, copula: dict, dynamic: Optional[dict] = None) -> dict:
    out = {
        "cyber": _cyber_doc(cyber),
        "safety": {"phase": phase, "f0_offset": f0},
        "copula": copula,
        "grid": {"t_max": 200.0, "n_points": 401},
    }
    if dynamic is not None:
        out["dynamic"] = dynamic
    return out


# The dynamic presets use o1 = 2, the value for which every SFDF cell of the
# published dynamic tables is reproduced (o1 = 1 is 0.02 to 0.06 low).
_DYN = {"o1": 2.0, "o2": 0.5, "omega": 2.0, "t_cut": None, "n1": 1.0, "mode": "delta_freeze"}

EXPERIMENT_PRESETS: dict[str, dict] = {
    "example1": _doc("example1", "infant", 0.0, {"family": "normal", "rho": 0.27}),
    "results200": _doc("results200", "infant", 0.0, {"family": "normal", "rho": 0.27}),
    "normal-200": _doc("results200", "infant", 0.0, {"family": "normal", "rho": 0.27}),
    "gumbel-200": _doc("results200", "infant", 0.0, {"family": "gumbel", "theta": 1.5}),
    "frank-200": _doc("results200", "infant", 0.0, {"family": "frank", "theta": 1.0}),
    "clayton-200": _doc("results200", "infant", 0.0, {"family": "clayton", "theta": 1.0}),
    "t-copula": _doc("results200", "infant", 0.1, {"family": "student_t", "rho": 0.27, "nu": 4.0}),
    "frank-prop1": _doc("example1", "infant", 0.2, {"family": "frank", "theta": 1.0}),
    "normal-dyn": _doc("example1", "random", 0.2, {"family": "normal", "rho": 0.27}, dict(_DYN)),
    "gumbel-dyn": _doc("example1", "random", 0.2, {"family": "gumbel", "theta": 1.5}, dict(_DYN)),
    "frank-dyn": _doc("example1", "random", 0.2, {"family": "frank", "theta": 1.0}, dict(_DYN, omega=3.0)),
}

_ALLOWED = {
    "": {"preset", "cyber", "safety", "copula", "dynamic", "grid", "output"},
    "cyber": set(_CYBER_FIELDS) | {"preset"},
    "safety": {"phase", "shape_k", "scale_lambda", "f0_offset"},
    "copula": {"family", "rho", "nu", "theta"},
    "dynamic": {"o1", "o2", "omega", "t_cut", "n1", "mode"},
    "grid": {"t_max", "n_points"},
    "output": {"path", "format"},
}


def _check_keys(doc: Any, section: str) -> None:
    where = section or "config"
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    for key in doc:
        if key not in _ALLOWED[section]:
            path = f"{section}.{key}" if section else key
            raise ConfigError(f"{path}: unknown key")


def _overlay(base: dict, update: dict) -> dict:
    merged = copy.deepcopy(base)
    for section, body in update.items():
        if section == "preset":
            continue
        if section == "copula" and "family" in body:
            # A new family replaces the old parameters wholesale.
            merged["copula"] = dict(body)
        elif section == "cyber" and "preset" in body:
            merged["cyber"] = dict(_cyber_doc_checked(body["preset"]), **{k: v for k, v in body.items() if k != "preset"})
        elif section == "safety" and {"phase", "shape_k", "scale_lambda"} & set(body):
            # A phase and explicit Weibull parameters are alternatives, so
            # either one replaces the other; the offset carries over.
            merged["safety"] = dict(body)
            merged["safety"].setdefault("f0_offset", base.get("safety", {}).get("f0_offset", 0.0))
        elif isinstance(body, dict):
            merged.setdefault(section, {})
            merged[section] = dict(merged[section] or {}, **body)
        else:
            merged[section] = body
    return merged


def _cyber_doc_checked(name: str) -> dict:
    cyber_preset(name)
    return _cyber_doc(name)


def _build(section: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Validate a configuration document, overlaying its ``preset`` if given."""
    _check_keys(doc, "")
    for section in ("cyber", "safety", "copula", "dynamic", "grid", "output"):
        if section in doc and doc[section] is not None:
            _check_keys(doc[section], section)
    base: dict = {}
    if "preset" in doc:
        name = doc["preset"]
        if name not in EXPERIMENT_PRESETS:
            raise ConfigError(f"preset: unknown preset {name!r}; expected one of {', '.join(EXPERIMENT_PRESETS)}")
        base = EXPERIMENT_PRESETS[name]
    merged = _overlay(base, doc)
    for section in ("cyber", "safety", "copula"):
        if section not in merged:
            raise ConfigError(f"{section}: missing (give it or name a preset)")

    cyber_doc = dict(merged["cyber"])
    if "preset" in cyber_doc:
        cyber_doc = dict(_cyber_doc_checked(cyber_doc.pop("preset")), **cyber_doc)
    missing = [f for f in _CYBER_FIELDS if f not in cyber_doc]
    if missing:
        raise ConfigError(f"cyber.{missing[0]}: missing")
    if cyber_doc.get("n_threshold") is None:
        cyber_doc["n_threshold"] = math.inf
    cyber = _build("cyber", CyberParams, **cyber_doc)

    safety_doc = dict(merged["safety"])
    phase = safety_doc.pop("phase", None)
    if phase is not None:
        if "shape_k" in safety_doc or "scale_lambda" in safety_doc:
            raise ConfigError("safety: give either phase or shape_k/scale_lambda, not both")
        safety = _build("safety.phase", phase_params, phase, safety_doc.get("f0_offset", 0.0))
        phase = LifecyclePhase(phase).value
    else:
        for key in ("shape_k", "scale_lambda"):
            if key not in safety_doc:
                raise ConfigError(f"safety.{key}: missing")
        safety = _build("safety", SafetyParams, **safety_doc)

    copula = _build("copula", CopulaSpec, **merged["copula"])

    dynamic = None
    if merged.get("dynamic") is not None:
        dyn_doc = dict(merged["dynamic"])
        if dyn_doc.get("t_cut", 0) is None:
            dyn_doc["t_cut"] = math.inf
        dynamic = _build("dynamic", DynamicParams, **dyn_doc)

    grid = merged.get("grid") or {}
    t_max = grid.get("t_max", 200.0)
    n_points = grid.get("n_points", 401)
    if not isinstance(n_points, int) or isinstance(n_points, bool) or n_points < 1:
        raise ConfigError(f"grid.n_points: must be a positive integer, got {n_points!r}")
    if not isinstance(t_max, (int, float)) or not t_max >= 0 or not math.isfinite(t_max):
        raise ConfigError(f"grid.t_max: must be a finite non-negative number, got {t_max!r}")
    if n_points > 1 and t_max == 0:
        raise ConfigError("grid.t_max: must be positive when n_points > 1")

    output = merged.get("output") or {}
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format: must be 'csv' or 'json', got {fmt!r}")

    return ExperimentConfig(
        cyber=cyber,
        safety=safety,
        copula=copula,
        dynamic=dynamic,
        t_max=float(t_max),
        n_points=n_points,
        output_path=output.get("path"),
        output_format=fmt,
        phase=phase,
        source=merged,
    )


def preset_config(name: str) -> ExperimentConfig:
    """Validated configuration for a named experiment preset."""
    return config_from_dict({"preset": name})


def load_config(path: str | Path, preset: Optional[str] = None) -> ExperimentConfig:
    """Read a JSON configuration file, optionally on top of a named preset."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at top level")
    if preset is not None and "preset" not in doc:
        doc = dict(doc, preset=preset)
    return config_from_dict(doc)
