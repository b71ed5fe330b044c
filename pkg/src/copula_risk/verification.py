"""Independent checks: Monte Carlo joint CDF, closed form vs quadrature,
and the closed-form-versus-quadrature timing benchmark."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .copulas import copula_cdf, sample_pairs
from .cyber import (
    CyberParams,
    cumulative_hazard_grid,
    cyber_cdf,
    cyber_cdf_closed_form,
    cyber_cdf_quadrature,
    cyber_supremum,
)
from .errors import DomainError
from .joint import JointScenario, ProbabilityCurve
from .safety import safety_quantile, weibull_cdf

__all__ = [
    "McConfig",
    "BenchReport",
    "sample_failure_times",
    "mc_joint_cdf",
    "closed_form_equivalence",
    "random_cyber_params",
    "closed_form_fuzz",
    "run_benchmark",
]


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo sample size, seed and evaluation times."""

    n_samples: int
    seed: int
    times: tuple[float, ...]

    def __post_init__(self):
        if int(self.n_samples) < 1000:
            raise DomainError(f"n_samples must be >= 1000, got {self.n_samples}")
        times = tuple(float(t) for t in self.times)
        if not times or min(times) < 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("times must be non-empty, non-negative and strictly increasing")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "times", times)


# Resolution of the cyber CDF table used for bulk inverse-transform sampling.
_INVERSION_NODES = 20001


def _cyber_inverse_table(params: CyberParams, horizon: float, extra_times: Sequence[float]):
    grid = np.unique(np.concatenate([np.linspace(0.0, horizon, _INVERSION_NODES), extra_times]))
    cdf = -np.expm1(-cumulative_hazard_grid(grid, params))
    return grid, np.maximum.accumulate(cdf)


def sample_failure_times(scenario: JointScenario, cfg: McConfig) -> tuple[np.ndarray, np.ndarray, dict]:
    """Draw safety and cyber failure times by copula sampling and inverse transform.

    Safety draws below the initial offset land on the atom at t = 0. Cyber
    times come from inverting a tabulated CDF (piecewise-linear in t between
    nodes that include every evaluation time). Draws above the CDF at the
    last evaluation time are set to ``inf``; those also above the long-run
    supremum are counted as censored.
    """
    uv = sample_pairs(scenario.copula, cfg.n_samples, cfg.seed)
    u, v = uv[:, 0], uv[:, 1]

    f0 = scenario.safety.f0_offset
    t_safety = np.zeros_like(u)
    above = u >= f0
    t_safety[above] = safety_quantile(u[above], scenario.safety)

    horizon = max(cfg.times)
    grid, cdf = _cyber_inverse_table(scenario.cyber, horizon, cfg.times)
    t_cyber = np.full_like(v, np.inf)
    inside = v <= cdf[-1]
    idx = np.clip(np.searchsorted(cdf, v[inside], side="left"), 1, grid.size - 1)
    lo_f, hi_f = cdf[idx - 1], cdf[idx]
    span = np.where(hi_f > lo_f, hi_f - lo_f, 1.0)
    frac = np.clip((v[inside] - lo_f) / span, 0.0, 1.0)
    t_cyber[inside] = grid[idx - 1] + frac * (grid[idx] - grid[idx - 1])

    sup = cyber_supremum(scenario.cyber)
    info = {
        "n_samples": cfg.n_samples,
        "seed": cfg.seed,
        "censored": int(np.count_nonzero(v >= sup)),
        "beyond_horizon": int(np.count_nonzero((v > cdf[-1]) & (v < sup))),
        "safety_atoms": int(np.count_nonzero(~above)),
    }
    return t_safety, t_cyber, info


def mc_joint_cdf(scenario: JointScenario, cfg: McConfig) -> ProbabilityCurve:
    """Monte Carlo estimate of P(T_safety < t, T_cyber < t) with standard errors."""
    t_safety, t_cyber, info = sample_failure_times(scenario, cfg)
    times = np.asarray(cfg.times)
    est = np.array([np.count_nonzero((t_safety < t) & (t_cyber < t)) for t in times]) / cfg.n_samples
    stderr = np.sqrt(est * (1.0 - est) / cfg.n_samples)
    return ProbabilityCurve(times, est, f"mc joint {scenario.copula.label()}", stderr=stderr, meta=info)


def closed_form_equivalence(cyber: CyberParams, grid: Sequence[float]) -> float:
    """Largest absolute gap between closed-form and quadrature cyber CDFs."""
    if cyber.cap_enabled:
        raise DomainError("closed-form comparison requires the attempt cap to be disabled")
    grid = np.asarray(grid, dtype=float)
    gap = np.abs(np.asarray(cyber_cdf_closed_form(grid, cyber)) - np.asarray(cyber_cdf_quadrature(grid, cyber)))
    return float(gap.max()) if gap.size else 0.0


def random_cyber_params(rng: np.random.Generator) -> CyberParams:
    """Random uncapped parameter set with success probabilities well below 1."""
    return CyberParams(
        alpha1=float(rng.uniform(0.5, 2.0)),
        beta1=float(rng.uniform(0.5, 1.5)),
        p0=float(10 ** rng.uniform(-6.0, -4.0)),
        gamma=float(rng.uniform(0.05, 0.5)),
        n_threshold=math.inf,
        mu=float(10 ** rng.uniform(math.log10(0.005), -1.0)),
        mu2=float(10 ** rng.uniform(math.log10(0.005), -1.0)),
        t_patch=float(rng.uniform(5.0, 150.0)),
    )


def closed_form_fuzz(n_cases: int = 100, seed: int = 0, points_per_case: int = 20) -> list[dict]:
    """Closed form vs quadrature over random parameter sets and times."""
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(n_cases):
        params = random_cyber_params(rng)
        times = np.sort(rng.uniform(0.0, 200.0, points_per_case))
        results.append({"params": asdict(params), "max_abs_deviation": closed_form_equivalence(params, times)})
    return results


@dataclass
class BenchReport:
    """Timing summary; all times are seconds per single CDF evaluation."""

    mean_time_closed: float
    mean_time_quadrature: float
    speed_ratio: float
    groups: list = field(default_factory=list)
    n_candidates: int = 1000
    n_groups: int = 10
    points_per_group: int = 100
    repetitions: int = 100
    seed: int = 0
    total_runtime: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _time_pass(fn: Callable[[float], float], points: Sequence[float]) -> int:
    start = time.perf_counter_ns()
    for t in points:
        fn(t)
    return time.perf_counter_ns() - start


def run_benchmark(
    cyber: CyberParams,
    seed: int = 0,
    n_candidates: int = 1000,
    n_groups: int = 10,
    points_per_group: int = 100,
    repetitions: int = 100,
) -> BenchReport:
    """Time closed-form against quadrature evaluation of the cyber CDF.

    ``n_candidates`` times are drawn uniformly on [0, 200]; each group draws
    ``points_per_group`` of them without replacement and evaluates all of
    them ``repetitions`` times with each method, after one untimed warm-up
    pass. Group means are per-evaluation averages; the overall means average
    the groups.
    """
    if cyber.cap_enabled:
        raise DomainError("benchmark requires the attempt cap to be disabled")
    if points_per_group > n_candidates:
        raise DomainError("points_per_group cannot exceed n_candidates")
    wall = time.perf_counter()
    rng = np.random.default_rng(seed)
    candidates = rng.uniform(0.0, 200.0, n_candidates)

    def closed(t):
        return cyber_cdf_closed_form(t, cyber)

    def quadrature(t):
        return cyber_cdf_quadrature(t, cyber)

    groups = []
    for g in range(n_groups):
        points = [float(x) for x in rng.choice(candidates, size=points_per_group, replace=False)]
        _time_pass(closed, points)
        _time_pass(quadrature, points)
        closed_ns = [_time_pass(closed, points) for _ in range(repetitions)]
        quad_ns = [_time_pass(quadrature, points) for _ in range(repetitions)]
        mean_closed = float(np.mean(closed_ns)) / points_per_group * 1e-9
        mean_quad = float(np.mean(quad_ns)) / points_per_group * 1e-9
        groups.append(
            {
                "group": g,
                "mean_time_closed": mean_closed,
                "mean_time_quadrature": mean_quad,
                "speed_ratio": mean_quad / mean_closed,
                "points_checksum": float(np.sum(points)),
            }
        )
    mean_closed = float(np.mean([grp["mean_time_closed"] for grp in groups]))
    mean_quad = float(np.mean([grp["mean_time_quadrature"] for grp in groups]))
    return BenchReport(
        mean_time_closed=mean_closed,
        mean_time_quadrature=mean_quad,
        speed_ratio=mean_quad / mean_closed,
        groups=groups,
        n_candidates=n_candidates,
        n_groups=n_groups,
        points_per_group=points_per_group,
        repetitions=repetitions,
        seed=seed,
        total_runtime=time.perf_counter() - wall,
    )


def analytic_joint(scenario: JointScenario, times: Sequence[float]) -> np.ndarray:
    """Analytic joint CDF at arbitrary times (reference for Monte Carlo)."""
    times = np.asarray(times, dtype=float)
    return np.asarray(
        copula_cdf(scenario.copula, weibull_cdf(times, scenario.safety), cyber_cdf(times, scenario.cyber))
    )
