"""Joint safety-security failure probability over time.

P_j(t) = C(F_safety(t), F_cyber(t)): the probability that both a functional
failure and a security failure have occurred by time t.
"""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .copulas import CopulaSpec, copula_cdf
from .cyber import CyberParams, cyber_cdf
from .errors import DomainError
from .safety import SafetyParams, weibull_cdf

__all__ = [
    "DEFAULT_GRID",
    "JointScenario",
    "ProbabilityCurve",
    "default_grid",
    "worker_count",
    "joint_failure_prob",
    "joint_curve",
    "marginal_curves",
    "sweep_dependence",
    "sweep_patch_time",
]


def default_grid(t_max: float = 200.0, n_points: int = 401) -> tuple[float, ...]:
    """Uniform evaluation grid on [0, t_max]."""
    if n_points < 1:
        raise DomainError(f"grid needs at least one point, got {n_points}")
    if not t_max >= 0:
        raise DomainError(f"t_max must be non-negative, got {t_max}")
    return tuple(float(x) for x in np.linspace(0.0, t_max, n_points))


DEFAULT_GRID = default_grid()


def worker_count() -> int:
    """Thread cap from the COPULA_RISK_THREADS environment variable (default 1)."""
    raw = os.environ.get("COPULA_RISK_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"COPULA_RISK_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError(f"COPULA_RISK_THREADS must be a positive integer, got {raw!r}")
    return n


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class JointScenario:
    """Copula, both marginals and the evaluation grid."""

    copula: CopulaSpec
    safety: SafetyParams
    cyber: CyberParams
    grid: tuple[float, ...] = DEFAULT_GRID

    def __post_init__(self):
        grid = tuple(float(x) for x in self.grid)
        if len(grid) == 0:
            raise DomainError("grid must contain at least one time")
        if grid[0] < 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("grid must be strictly increasing and non-negative")
        object.__setattr__(self, "grid", grid)

    def with_copula(self, copula: CopulaSpec) -> "JointScenario":
        return replace(self, copula=copula)

    def with_patch_time(self, t_patch: float) -> "JointScenario":
        return replace(self, cyber=self.cyber.with_patch_time(t_patch))


@dataclass
class ProbabilityCurve:
    """Probabilities on a time grid with a descriptive label.

    ``stderr`` holds per-point standard errors for Monte Carlo curves and
    ``meta`` carries free-form diagnostics (evaluation paths, clamp counts).
    """

    times: np.ndarray
    values: np.ndarray
    label: str
    stderr: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise DomainError("times and values must be 1-D arrays of equal length")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise DomainError("curve values must lie in [0, 1]")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
            if self.stderr.shape != self.times.shape:
                raise DomainError("stderr must match times in length")

    def value_at(self, t: float) -> float:
        idx = np.flatnonzero(self.times == t)
        if idx.size == 0:
            raise DomainError(f"time {t} is not on the curve grid")
        return float(self.values[idx[0]])

    def to_csv(self) -> str:
        """CSV text with header ``t,value`` (plus ``stderr`` when present)."""
        buf = io.StringIO()
        header = "t,value,stderr" if self.stderr is not None else "t,value"
        buf.write(header + "\n")
        for i, (t, v) in enumerate(zip(self.times, self.values)):
            row = f"{float(t)!r},{float(v)!r}"
            if self.stderr is not None:
                row += f",{float(self.stderr[i])!r}"
            buf.write(row + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = {
            "label": self.label,
            "times": [float(t) for t in self.times],
            "values": [float(v) for v in self.values],
        }
        if self.stderr is not None:
            out["stderr"] = [float(s) for s in self.stderr]
        if self.meta:
            out["meta"] = self.meta
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def joint_failure_prob(t, scenario: JointScenario):
    """P(T_safety <= t, T_cyber <= t) = C(F_safety(t), F_cyber(t))."""
    f_safety = weibull_cdf(t, scenario.safety)
    f_cyber = cyber_cdf(t, scenario.cyber)
    return copula_cdf(scenario.copula, f_safety, f_cyber)


def marginal_curves(scenario: JointScenario) -> tuple[np.ndarray, np.ndarray]:
    """Safety and cyber CDF values on the scenario grid."""
    times = np.asarray(scenario.grid)
    return np.asarray(weibull_cdf(times, scenario.safety)), np.asarray(cyber_cdf(times, scenario.cyber))


def joint_curve(scenario: JointScenario, label: Optional[str] = None) -> ProbabilityCurve:
    """Joint failure probability at every grid time."""
    times = np.asarray(scenario.grid)
    f_safety, f_cyber = marginal_curves(scenario)
    values = np.asarray(copula_cdf(scenario.copula, f_safety, f_cyber))
    return ProbabilityCurve(times, values, label or f"joint {scenario.copula.label()}")


def sweep_dependence(scenario: JointScenario, param_values: Sequence[float]) -> list[ProbabilityCurve]:
    """One joint curve per dependence-parameter value (marginals shared)."""
    times = np.asarray(scenario.grid)
    f_safety, f_cyber = marginal_curves(scenario)
    specs = [scenario.copula.with_dependence(v) for v in param_values]

    def one(spec):
        return ProbabilityCurve(times, np.asarray(copula_cdf(spec, f_safety, f_cyber)), f"joint {spec.label()}")

    return _parallel_map(one, specs)


def sweep_patch_time(scenario: JointScenario, patch_times: Sequence[float]) -> list[ProbabilityCurve]:
    """One joint curve per patch time (copula and safety marginal shared)."""
    patch_times = [float(x) for x in patch_times]
    if any(x < 0 for x in patch_times) or any(b <= a for a, b in zip(patch_times, patch_times[1:])):
        raise DomainError("patch times must be non-negative and strictly increasing")

    def one(tp):
        curve = joint_curve(scenario.with_patch_time(tp))
        curve.label = f"{curve.label} t_patch={tp:g}"
        return curve

    return _parallel_map(one, patch_times)
