"""Dynamic failure model: each marginal perturbed by the other domain.

The security CDF under functional faults (SFDF) scales the cyber CDF by
the copula's conditional sensitivity to the safety marginal; the safety CDF
under cyberattacks (SFDC) does the reverse, weighted by an attack-intensity
factor. After the intrusion time ``t_cut`` the attack influence on safety is
frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .copulas import partial_wrt_u, partial_wrt_v
from .cyber import CyberParams, cumulative_attempts, cyber_cdf
from .errors import DomainError
from .joint import JointScenario, ProbabilityCurve, _parallel_map
from .safety import weibull_cdf

__all__ = [
    "MODES",
    "DynamicParams",
    "attack_intensity_n2",
    "sfdf",
    "sfdc",
    "sfdf_curve",
    "sfdc_curve",
    "sweep_patch_time_sfdc",
]

MODES = ("delta_freeze", "literal")


@dataclass(frozen=True)
class DynamicParams:
    """Coupling strengths of the dynamic failure model.

    Attributes
    ----------
    o1 : float
        Intensity factor on the security side (SFDF).
    o2 : float
        Intensity factor on the safety side (SFDC).
    omega : float
        Exponent of the attack-intensity weight (N(t) / n_threshold)^omega.
    t_cut : float
        Intrusion time after which the SFDC perturbation is frozen;
        ``math.inf`` means no intrusion within the horizon.
    n1 : float
        Dynamic failure intensity on the security side, normally 1.
    mode : str
        Post-``t_cut`` continuation, ``"delta_freeze"`` or ``"literal"``.
    """

    o1: float = 1.0
    o2: float = 0.5
    omega: float = 2.0
    t_cut: float = math.inf
    n1: float = 1.0
    mode: str = "delta_freeze"

    def __post_init__(self):
        for name in ("o1", "o2", "omega", "t_cut", "n1"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.o1 >= 0 and self.o2 >= 0 and self.n1 >= 0):
            raise DomainError("o1, o2 and n1 must be non-negative")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if not self.t_cut > 0:
            raise DomainError(f"t_cut must be positive, got {self.t_cut!r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")

    def with_t_cut(self, t_cut: float) -> "DynamicParams":
        return replace(self, t_cut=float(t_cut))


def _out(result, t):
    if np.ndim(t) == 0:
        return float(np.asarray(result).reshape(()))
    return result


def attack_intensity_n2(t, cyber: CyberParams, omega: float):
    """Attack-intensity weight (min(N(t), n_threshold) / n_threshold)^omega."""
    if not cyber.cap_enabled:
        raise DomainError("attack intensity needs a finite n_threshold")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    n = np.minimum(np.asarray(cumulative_attempts(t, cyber)), cyber.n_threshold)
    return _out(np.power(n / cyber.n_threshold, omega), t)


def _clamp(values: np.ndarray) -> tuple[np.ndarray, int]:
    outside = int(np.count_nonzero((values < 0.0) | (values > 1.0)))
    return np.clip(values, 0.0, 1.0), outside


def _sfdf_values(t, scenario: JointScenario, dyn: DynamicParams) -> tuple[np.ndarray, int]:
    t_arr = np.asarray(t, dtype=float)
    f_safety = np.asarray(weibull_cdf(t_arr, scenario.safety))
    f_cyber = np.asarray(cyber_cdf(t_arr, scenario.cyber))
    sensitivity = np.asarray(partial_wrt_u(scenario.copula, f_safety, f_cyber))
    raw = f_cyber * (1.0 + dyn.o1 * dyn.n1 * (sensitivity - f_cyber))
    return _clamp(raw)


def _sfdc_pre_cut(t_arr, scenario: JointScenario, dyn: DynamicParams):
    f_safety = np.asarray(weibull_cdf(t_arr, scenario.safety))
    f_cyber = np.asarray(cyber_cdf(t_arr, scenario.cyber))
    n2 = np.asarray(attack_intensity_n2(t_arr, scenario.cyber, dyn.omega))
    sensitivity = np.asarray(partial_wrt_v(scenario.copula, f_safety, f_cyber))
    return f_safety * (1.0 + dyn.o2 * n2 * (sensitivity - f_safety))


def _sfdc_values(t, scenario: JointScenario, dyn: DynamicParams) -> tuple[np.ndarray, int]:
    t_arr = np.asarray(t, dtype=float)
    before = t_arr < dyn.t_cut
    out = np.empty(t_arr.shape)
    clamps = 0
    if np.any(before):
        out[before], n = _clamp(_sfdc_pre_cut(t_arr[before], scenario, dyn))
        clamps += n
    after = ~before
    if np.any(after):
        f_after = np.asarray(weibull_cdf(t_arr[after], scenario.safety))
        if dyn.mode == "delta_freeze":
            at_cut, n = _clamp(_sfdc_pre_cut(np.array([dyn.t_cut]), scenario, dyn))
            clamps += n
            shift = at_cut[0] - float(weibull_cdf(dyn.t_cut, scenario.safety))
            raw = f_after + shift
        else:
            raw = f_after + _sfdc_pre_cut(np.array([dyn.t_cut]), scenario, dyn)[0]
        out[after], n = _clamp(raw)
        clamps += n
    return out, clamps


def sfdf(t, scenario: JointScenario, dyn: DynamicParams):
    """Security failure CDF under the impact of functional faults.

    F_c (1 + o1 n1 (dC/du (F_s, F_c) - F_c)), clamped to [0, 1].
    """
    return _out(_sfdf_values(t, scenario, dyn)[0], t)


def sfdc(t, scenario: JointScenario, dyn: DynamicParams):
    """Safety failure CDF under the impact of cyberattacks.

    Before ``t_cut``: F_s (1 + o2 N2(t) (dC/dv (F_s, F_c) - F_s)), clamped.
    From ``t_cut`` on, ``delta_freeze`` keeps the offset reached at
    ``t_cut`` and follows F_s in parallel; ``literal`` adds the full value
    reached at ``t_cut`` to F_s(t).
    """
    return _out(_sfdc_values(t, scenario, dyn)[0], t)


def _sensitivity_reversals(values: np.ndarray) -> int:
    steps = np.diff(values)
    signs = np.sign(steps[np.abs(steps) > 1e-15])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def sfdf_curve(scenario: JointScenario, dyn: DynamicParams, label: Optional[str] = None) -> ProbabilityCurve:
    """SFDF on the scenario grid, with clamp count and sensitivity diagnostics."""
    times = np.asarray(scenario.grid)
    values, clamps = _sfdf_values(times, scenario, dyn)
    f_safety = np.asarray(weibull_cdf(times, scenario.safety))
    f_cyber = np.asarray(cyber_cdf(times, scenario.cyber))
    sens = np.asarray(partial_wrt_u(scenario.copula, f_safety, f_cyber))
    meta = {"clamped_points": clamps, "sensitivity_direction_changes": _sensitivity_reversals(sens)}
    return ProbabilityCurve(times, values, label or f"sfdf {scenario.copula.label()}", meta=meta)


def sfdc_curve(scenario: JointScenario, dyn: DynamicParams, label: Optional[str] = None) -> ProbabilityCurve:
    """SFDC on the scenario grid, with clamp count and sensitivity diagnostics."""
    times = np.asarray(scenario.grid)
    values, clamps = _sfdc_values(times, scenario, dyn)
    f_safety = np.asarray(weibull_cdf(times, scenario.safety))
    f_cyber = np.asarray(cyber_cdf(times, scenario.cyber))
    sens = np.asarray(partial_wrt_v(scenario.copula, f_safety, f_cyber))
    meta = {
        "clamped_points": clamps,
        "mode": dyn.mode,
        "t_cut": dyn.t_cut if math.isfinite(dyn.t_cut) else None,
        "sensitivity_direction_changes": _sensitivity_reversals(sens),
    }
    return ProbabilityCurve(times, values, label or f"sfdc {scenario.copula.label()}", meta=meta)


def sweep_patch_time_sfdc(
    scenario: JointScenario, dyn: DynamicParams, patch_times: Sequence[float]
) -> list[ProbabilityCurve]:
    """One SFDC curve per patch time."""
    patch_times = [float(x) for x in patch_times]
    if any(x < 0 for x in patch_times) or any(b <= a for a, b in zip(patch_times, patch_times[1:])):
        raise DomainError("patch times must be non-negative and strictly increasing")

    def one(tp):
        return sfdc_curve(scenario.with_patch_time(tp), dyn, f"sfdc {scenario.copula.label()} t_patch={tp:g}")

    return _parallel_map(one, patch_times)
