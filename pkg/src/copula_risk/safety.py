"""Functional-safety marginal: Weibull failure times with an initial offset.

The offset ``f0_offset`` is added to the Weibull CDF and the sum is clamped
at 1, so it behaves like a probability atom at t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UnreachableQuantileError
from .special import gamma_fn

__all__ = [
    "SafetyParams",
    "LifecyclePhase",
    "phase_params",
    "weibull_cdf",
    "weibull_pdf",
    "weibull_hazard",
    "scale_from_mttf",
    "safety_quantile",
]


@dataclass(frozen=True)
class SafetyParams:
    """Weibull shape and scale plus an additive initial failure probability."""

    shape_k: float
    scale_lambda: float
    f0_offset: float = 0.0

    def __post_init__(self):
        for name in ("shape_k", "scale_lambda", "f0_offset"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.shape_k > 0 and math.isfinite(self.shape_k)):
            raise DomainError(f"shape_k must be positive, got {self.shape_k!r}")
        if not (self.scale_lambda > 0 and math.isfinite(self.scale_lambda)):
            raise DomainError(f"scale_lambda must be positive, got {self.scale_lambda!r}")
        if not 0.0 <= self.f0_offset < 1.0:
            raise DomainError(f"f0_offset must lie in [0, 1), got {self.f0_offset!r}")


class LifecyclePhase(str, Enum):
    """Bathtub-curve phases with their (shape, scale) presets."""

    INFANT_MORTALITY = "infant"
    RANDOM_FAILURE = "random"
    WEAR_OUT = "wearout"

    @property
    def shape_scale(self) -> tuple[float, float]:
        return _PHASE_SHAPE_SCALE[self]


_PHASE_SHAPE_SCALE = {
    LifecyclePhase.INFANT_MORTALITY: (0.5, 54750.0),
    LifecyclePhase.RANDOM_FAILURE: (1.0, 109500.0),
    LifecyclePhase.WEAR_OUT: (3.0, 122600.0),
}


def phase_params(phase: LifecyclePhase | str, f0_offset: float = 0.0) -> SafetyParams:
    """SafetyParams for a named lifecycle phase ("infant", "random", "wearout")."""
    try:
        phase = LifecyclePhase(phase)
    except ValueError:
        names = ", ".join(p.value for p in LifecyclePhase)
        raise DomainError(f"unknown lifecycle phase {phase!r}; expected one of {names}") from None
    k, lam = phase.shape_scale
    return SafetyParams(k, lam, f0_offset)


def _check_time(t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    return t_arr


def _out(result, t):
    if np.ndim(t) == 0:
        return float(np.asarray(result).reshape(()))
    return result


def _weibull_part(t, params):
    return -np.expm1(-np.power(t / params.scale_lambda, params.shape_k))


def weibull_cdf(t, params: SafetyParams):
    """Safety failure-time CDF: offset plus Weibull CDF, clamped at 1."""
    t_arr = _check_time(t)
    return _out(np.minimum(params.f0_offset + _weibull_part(t_arr, params), 1.0), t)


def _check_density_time(t_arr, params):
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    if params.shape_k < 1.0 and np.any(t_arr == 0):
        raise DomainError("density is singular at t = 0 for shape_k < 1")


def weibull_pdf(t, params: SafetyParams):
    """Density of the continuous part; zero once the clamped CDF reaches 1."""
    t_arr = np.asarray(t, dtype=float)
    _check_density_time(t_arr, params)
    k, lam = params.shape_k, params.scale_lambda
    z = t_arr / lam
    dens = (k / lam) * np.power(z, k - 1.0) * np.exp(-np.power(z, k))
    dens = np.where(params.f0_offset + _weibull_part(t_arr, params) < 1.0, dens, 0.0)
    return _out(dens, t)


def weibull_hazard(t, params: SafetyParams):
    """Failure rate pdf / (1 - cdf); equals (K/lambda)(t/lambda)^(K-1) when F0 = 0."""
    t_arr = np.asarray(t, dtype=float)
    _check_density_time(t_arr, params)
    k, lam = params.shape_k, params.scale_lambda
    base = (k / lam) * np.power(t_arr / lam, k - 1.0)
    if params.f0_offset == 0.0:
        return _out(base, t)
    survival = 1.0 - np.asarray(weibull_cdf(t_arr, params))
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(survival > 0, np.asarray(weibull_pdf(t_arr, params)) / survival, np.inf)
    return _out(rate, t)


def scale_from_mttf(mttf: float, shape_k: float) -> float:
    """Weibull scale giving mean time to failure ``mttf`` at shape ``shape_k``."""
    if not mttf > 0:
        raise DomainError(f"mttf must be positive, got {mttf!r}")
    if not shape_k > 0:
        raise DomainError(f"shape_k must be positive, got {shape_k!r}")
    return mttf / gamma_fn(1.0 + 1.0 / shape_k)


def safety_quantile(p, params: SafetyParams):
    """Inverse of :func:`weibull_cdf` on [f0_offset, 1).

    Raises
    ------
    UnreachableQuantileError
        For p below the offset; that mass is an atom at t = 0.
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr >= 1.0):
        raise DomainError("safety_quantile requires p < 1")
    if np.any(p_arr < params.f0_offset):
        raise UnreachableQuantileError(
            f"p below the initial offset {params.f0_offset} corresponds to the atom at t = 0"
        )
    excess = p_arr - params.f0_offset
    t = params.scale_lambda * np.power(-np.log1p(-excess), 1.0 / params.shape_k)
    return _out(t, p)
