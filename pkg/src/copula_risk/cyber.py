"""Security-failure marginal driven by a time-varying cyberattack hazard.

Attack attempts arrive at a power-law rate until the patch time and decay
exponentially afterwards. Each attempt succeeds with a probability that grows
with the number of attempts so far (up to a cap) and also decays after the
patch. The failure-time CDF is one minus the exponential of the cumulative
hazard, evaluated either by adaptive quadrature or by a closed form built on
the Gauss hypergeometric function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PlausibilityWarning, UnreachableQuantileError
from .quadrature import cumulative_gauss_legendre, integrate
from .special import Accuracy, gauss_2f1

__all__ = [
    "CyberParams",
    "ClosedFormConstants",
    "closed_form_constants",
    "attack_rate",
    "cumulative_attempts",
    "cap_crossing_time",
    "success_prob",
    "hazard",
    "cumulative_hazard_quadrature",
    "cumulative_hazard_closed_form",
    "cumulative_hazard_grid",
    "cyber_cdf_quadrature",
    "cyber_cdf_closed_form",
    "cyber_cdf",
    "cyber_cdf_with_path",
    "cyber_supremum",
    "cyber_quantile",
]

# Series stopping rule for the closed form. The argument of the
# hypergeometric series can approach 1 for short patch times with slow
# decay, so the term budget is generous.
CLOSED_FORM_ACCURACY = Accuracy(abs_tol=1e-13, max_terms=200_000)
QUADRATURE_REL_TOL = 1e-10


@dataclass(frozen=True)
class CyberParams:
    """Attacker and defender parameters of the cyber hazard.

    Attributes
    ----------
    alpha1 : float
        Scale of the pre-patch power-law attack rate.
    beta1 : float
        Exponent of the pre-patch attack rate.
    p0 : float
        Baseline per-attempt success probability.
    gamma : float
        Growth exponent of success probability in the attempt count, in (0, 1).
    n_threshold : float
        Attempt count beyond which the success probability stops growing.
        ``math.inf`` disables the cap.
    mu : float
        Post-patch decay rate of the attack rate (1/hour).
    mu2 : float
        Post-patch decay rate of the success probability (1/hour).
    t_patch : float
        Patch activation time (hours).
    """

    alpha1: float
    beta1: float
    p0: float
    gamma: float
    n_threshold: float
    mu: float
    mu2: float
    t_patch: float

    def __post_init__(self):
        for name in ("alpha1", "beta1", "p0", "gamma", "n_threshold", "mu", "mu2", "t_patch"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("alpha1", "beta1", "mu", "mu2", "n_threshold"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}")
            if name != "n_threshold" and not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not 0.0 < self.p0 < 1.0:
            raise DomainError(f"p0 must lie in (0, 1), got {self.p0!r}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if not (math.isfinite(self.t_patch) and self.t_patch >= 0.0):
            raise DomainError(f"t_patch must be finite and >= 0, got {self.t_patch!r}")

    @property
    def cap_enabled(self) -> bool:
        return math.isfinite(self.n_threshold)

    def without_cap(self) -> "CyberParams":
        return replace(self, n_threshold=math.inf)

    def with_patch_time(self, t_patch: float) -> "CyberParams":
        return replace(self, t_patch=float(t_patch))


@dataclass(frozen=True)
class ClosedFormConstants:
    """Time-independent pieces of the post-patch closed form.

    ``tau`` is the elapsed time since the patch for the query time the
    constants were requested for (0 when no time was given).
    """

    lambda_sum: float
    P_const: float
    R_const: float
    b_const: float
    k_const: float
    tau: float = 0.0
    pre_patch_integral: float = field(default=0.0, repr=False)
    series_at_patch: float = field(default=1.0, repr=False)


def _check_time(t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    return t_arr


def _is_plain_scalar(t) -> bool:
    return type(t) is float or type(t) is int


def _scalar_time(t) -> float:
    # Plain Python numbers skip the array round trip: the CDFs are evaluated
    # point by point in hot loops (benchmark, quantile search).
    if _is_plain_scalar(t):
        if not t >= 0:
            raise DomainError("time must be non-negative")
        return float(t)
    return float(_check_time(t))


def _out(result, t):
    if np.ndim(t) == 0:
        return float(np.asarray(result).reshape(()))
    return result


def _pre_patch_integral(t: float, params: CyberParams) -> float:
    """Cumulative hazard on [0, t] for t <= t_patch with the cap inactive."""
    if t <= 0.0:
        return 0.0
    a, b, g, p0 = params.alpha1, params.beta1, params.gamma, params.p0
    e1 = b + 1.0
    e2 = g * b + b + g + 1.0
    c1 = a * p0 / e1
    c2 = a ** (g + 1.0) * p0 / (e1**g * e2)
    return c1 * t**e1 + c2 * t**e2


@lru_cache(maxsize=256)
def _base_constants(params: CyberParams) -> ClosedFormConstants:
    a, b, mu, mu2, tp = params.alpha1, params.beta1, params.mu, params.mu2, params.t_patch
    lam = mu + mu2
    rate_at_patch = a * tp**b
    P = a * tp ** (b + 1.0) / (b + 1.0) + rate_at_patch / mu
    R = -rate_at_patch / mu
    if P > 0:
        b_const = R / P
    else:
        # t_patch = 0: no attempts before the patch, P = R = 0.
        b_const = -0.0
    if not -1.0 < b_const <= 0.0:
        raise DomainError(f"closed-form constant b={b_const} outside (-1, 0]")
    k = params.p0 * rate_at_patch
    ratio = lam / mu
    series = gauss_2f1(-params.gamma, ratio, ratio + 1.0, -b_const, CLOSED_FORM_ACCURACY)
    return ClosedFormConstants(
        lambda_sum=lam,
        P_const=P,
        R_const=R,
        b_const=b_const,
        k_const=k,
        pre_patch_integral=_pre_patch_integral(tp, params),
        series_at_patch=series,
    )


def closed_form_constants(params: CyberParams, t: float | None = None) -> ClosedFormConstants:
    """Constants of the post-patch closed form, with ``tau`` set for time ``t``."""
    base = _base_constants(params)
    if t is None:
        return base
    return replace(base, tau=max(float(t) - params.t_patch, 0.0))


def attack_rate(t, params: CyberParams):
    """Attack attempts per hour at time ``t``."""
    t_arr = _check_time(t)
    a, b, tp = params.alpha1, params.beta1, params.t_patch
    pre = a * np.power(np.minimum(t_arr, tp), b)
    post = a * tp**b * np.exp(-params.mu * np.maximum(t_arr - tp, 0.0))
    return _out(np.where(t_arr < tp, pre, post), t)


def cumulative_attempts(t, params: CyberParams):
    """Expected number of attack attempts on [0, t]."""
    t_arr = _check_time(t)
    a, b, tp, mu = params.alpha1, params.beta1, params.t_patch, params.mu
    pre = a * np.power(np.minimum(t_arr, tp), b + 1.0) / (b + 1.0)
    post = a * tp**b / mu * -np.expm1(-mu * np.maximum(t_arr - tp, 0.0))
    return _out(pre + post, t)


def cap_crossing_time(params: CyberParams) -> float:
    """First time the attempt count reaches the cap, or ``inf`` if never."""
    if not params.cap_enabled:
        return math.inf
    a, b, tp, mu, n = params.alpha1, params.beta1, params.t_patch, params.mu, params.n_threshold
    n_at_patch = a * tp ** (b + 1.0) / (b + 1.0)
    if n <= n_at_patch:
        return (n * (b + 1.0) / a) ** (1.0 / (b + 1.0))
    remaining = (n - n_at_patch) * mu / (a * tp**b) if tp > 0 else math.inf
    if remaining >= 1.0:
        return math.inf
    return tp - math.log1p(-remaining) / mu


def success_prob(t, params: CyberParams):
    """Per-attempt success probability at time ``t``.

    Emits :class:`PlausibilityWarning` when the value reaches 1.
    """
    t_arr = _check_time(t)
    n = np.minimum(cumulative_attempts(t_arr, params), params.n_threshold)
    p = params.p0 * (1.0 + np.power(n, params.gamma))
    p = p * np.exp(-params.mu2 * np.maximum(t_arr - params.t_patch, 0.0))
    if np.any(p >= 1.0):
        warnings.warn("success probability reached 1; parameters are implausible", PlausibilityWarning)
    return _out(p, t)


def _hazard_array(t: np.ndarray, params: CyberParams) -> np.ndarray:
    a, b, tp, g = params.alpha1, params.beta1, params.t_patch, params.gamma
    elapsed = np.maximum(t - tp, 0.0)
    before = np.minimum(t, tp)
    n = a * np.power(before, b + 1.0) / (b + 1.0) + a * tp**b / params.mu * -np.expm1(-params.mu * elapsed)
    n = np.minimum(n, params.n_threshold)
    rate = np.where(t < tp, a * np.power(before, b), a * tp**b * np.exp(-params.mu * elapsed))
    prob = params.p0 * (1.0 + np.power(n, g)) * np.exp(-params.mu2 * elapsed)
    return rate * prob


def hazard(t, params: CyberParams):
    """Instantaneous security-failure rate: attack rate times success probability."""
    t_arr = _check_time(t)
    return _out(_hazard_array(t_arr, params), t)


def _breakpoints(params: CyberParams):
    return (params.t_patch, cap_crossing_time(params))


def cumulative_hazard_quadrature(t: float, params: CyberParams) -> float:
    """Integral of the hazard on [0, t] by adaptive Gauss-Kronrod quadrature."""
    t = _scalar_time(t)
    result = integrate(
        lambda x: _hazard_array(x, params),
        0.0,
        t,
        breakpoints=_breakpoints(params),
        rel_tol=QUADRATURE_REL_TOL,
    )
    return result.value


def cyber_cdf_quadrature(t, params: CyberParams):
    """Security failure-time CDF via adaptive quadrature of the hazard."""
    if _is_plain_scalar(t):
        return -math.expm1(-cumulative_hazard_quadrature(t, params))
    t_arr = _check_time(t)
    values = np.array([-math.expm1(-cumulative_hazard_quadrature(x, params)) for x in np.ravel(t_arr)])
    return _out(values.reshape(t_arr.shape), t)


def _cap_binds(t: float, params: CyberParams) -> bool:
    return params.cap_enabled and float(cumulative_attempts(t, params)) > params.n_threshold


def cumulative_hazard_closed_form(t: float, params: CyberParams) -> float:
    """Integral of the hazard on [0, t] from the hypergeometric closed form.

    Raises
    ------
    DomainError
        If the attempt cap is reached before ``t`` (the closed form assumes
        uncapped growth of the success probability).
    """
    t = _scalar_time(t)
    if _cap_binds(t, params):
        raise DomainError("attempt cap is active before t; closed form does not apply")
    tp = params.t_patch
    if t <= tp:
        return _pre_patch_integral(t, params)
    c = _base_constants(params)
    tau = t - tp
    lam = c.lambda_sum
    decay = math.exp(-lam * tau)
    ratio = lam / params.mu
    lead = c.k_const / lam
    if c.P_const > 0:
        tail_series = gauss_2f1(
            -params.gamma, ratio, ratio + 1.0, -c.b_const * math.exp(-params.mu * tau), CLOSED_FORM_ACCURACY
        )
        growth = lead * c.P_const**params.gamma * (c.series_at_patch - decay * tail_series)
    else:
        growth = 0.0
    return c.pre_patch_integral + lead * -math.expm1(-lam * tau) + growth


def cyber_cdf_closed_form(t, params: CyberParams):
    """Security failure-time CDF from the closed-form cumulative hazard."""
    if _is_plain_scalar(t):
        return -math.expm1(-cumulative_hazard_closed_form(t, params))
    t_arr = _check_time(t)
    values = np.array([-math.expm1(-cumulative_hazard_closed_form(x, params)) for x in np.ravel(t_arr)])
    return _out(values.reshape(t_arr.shape), t)


def cyber_cdf_with_path(t: float, params: CyberParams) -> tuple[float, str]:
    """CDF at a single time together with the evaluation path used.

    The closed form is used whenever the attempt cap has not been reached by
    ``t``; otherwise the value comes from quadrature.
    """
    t = _scalar_time(t)
    if _cap_binds(t, params):
        return -math.expm1(-cumulative_hazard_quadrature(t, params)), "quadrature"
    return -math.expm1(-cumulative_hazard_closed_form(t, params)), "closed_form"


def cyber_cdf(t, params: CyberParams):
    """Security failure-time CDF, closed form when valid, quadrature otherwise."""
    if _is_plain_scalar(t):
        return cyber_cdf_with_path(t, params)[0]
    t_arr = _check_time(t)
    values = np.array([cyber_cdf_with_path(x, params)[0] for x in np.ravel(t_arr)])
    return _out(values.reshape(t_arr.shape), t)


def cyber_supremum(params: CyberParams) -> float:
    """Limit of the security CDF as t grows without bound.

    The cumulative hazard converges because both the attack rate and the
    success probability decay after the patch, so the CDF saturates below 1.
    """
    t_cross = cap_crossing_time(params)
    if not math.isfinite(t_cross):
        c = _base_constants(params)
        lead = c.k_const / c.lambda_sum
        total = c.pre_patch_integral + lead + lead * c.P_const**params.gamma * c.series_at_patch
        return -math.expm1(-total)
    # After both the cap and the patch, hazard = A exp(-(mu+mu2) tau) exactly.
    tp = params.t_patch
    t_end = max(tp, t_cross)
    lam = params.mu + params.mu2
    capped_rate = params.alpha1 * tp**params.beta1 * params.p0 * (1.0 + params.n_threshold**params.gamma)
    tail = capped_rate * math.exp(-lam * (t_end - tp)) / lam
    return -math.expm1(-(cumulative_hazard_quadrature(t_end, params) + tail))


def cyber_quantile(p: float, params: CyberParams) -> float:
    """Time at which the security CDF reaches ``p``.

    Raises
    ------
    UnreachableQuantileError
        If ``p`` is at or above the long-run supremum of the CDF.
    """
    p = float(p)
    if not p >= 0.0:
        raise DomainError(f"probability must be non-negative, got {p}")
    if p == 0.0:
        return 0.0
    sup = cyber_supremum(params)
    if p >= sup:
        raise UnreachableQuantileError(f"p={p} is not below the CDF supremum {sup:.12g}")
    hi = max(params.t_patch, 1.0)
    while cyber_cdf(hi, params) < p:
        hi *= 2.0
    return brentq(lambda x: cyber_cdf(x, params) - p, 0.0, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def cumulative_hazard_grid(times, params: CyberParams, panels_per_unit: float = 20.0) -> np.ndarray:
    """Cumulative hazard at many sorted times in one vectorised pass.

    Fixed 10-point Gauss-Legendre panels of width at most
    ``1 / panels_per_unit`` hours, with the patch and cap-crossing times as
    panel edges. Used for bulk inverse-transform sampling.
    """
    times = _check_time(times)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise DomainError("times must be a sorted 1-D array")
    t_max = float(times[-1]) if times.size else 0.0
    n_panels = max(int(math.ceil(t_max * panels_per_unit)), 1)
    extra = [x for x in _breakpoints(params) if 0.0 < x < t_max]
    edges = np.unique(np.concatenate([np.linspace(0.0, t_max, n_panels + 1), times, extra]))
    running = cumulative_gauss_legendre(lambda x: _hazard_array(x, params), edges)
    return running[np.searchsorted(edges, times)]
