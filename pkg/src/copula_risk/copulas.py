"""Bivariate copulas: Normal, Student-t, Gumbel, Frank, Clayton, independence.

All evaluation functions broadcast ``u`` and ``v`` and return floats for
scalar input. Every family is exchangeable, so derivatives with respect to
the second argument reuse the first-argument formula with swapped inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError
from .special import bivariate_normal_cdf, bivariate_normal_pdf, bivariate_t_cdf, student_t_cdf, student_t_quantile

__all__ = [
    "FAMILIES",
    "CopulaSpec",
    "copula_cdf",
    "partial_wrt_u",
    "partial_wrt_v",
    "normal_rho_derivative",
    "sample_pairs",
]

FAMILIES = ("normal", "student_t", "gumbel", "frank", "clayton", "independence")
_ALIASES = {"t": "student_t", "gaussian": "normal", "independent": "independence"}
# Inputs below this level are raised to it inside the t-copula only; the
# integration otherwise loses relative accuracy deep in the tail.
T_COPULA_FLOOR = 1e-9
# Boundary arguments of the conditional partials are evaluated as one-sided
# limits by moving them this far inside the unit interval.
_NUDGE = 1e-300
_ONE_BELOW = 1.0 - np.finfo(float).epsneg


@dataclass(frozen=True)
class CopulaSpec:
    """A copula family with its dependence parameter(s).

    Attributes
    ----------
    family : str
        One of ``FAMILIES`` (``"t"`` is accepted for ``"student_t"``).
    rho : float, optional
        Correlation for the elliptical families, in (-1, 1).
    nu : float, optional
        Degrees of freedom of the t-copula, positive.
    theta : float, optional
        Archimedean parameter: Gumbel >= 1, Clayton > 0, Frank any real
        (0 means independence).
    """

    family: str
    rho: Optional[float] = None
    nu: Optional[float] = None
    theta: Optional[float] = None

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        if family not in FAMILIES:
            raise DomainError(f"unknown copula family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        object.__setattr__(self, "family", family)
        for name in ("rho", "nu", "theta"):
            value = getattr(self, name)
            if value is not None:
                value = float(value)
                if not math.isfinite(value):
                    raise DomainError(f"{name} must be finite, got {value!r}")
                object.__setattr__(self, name, value)

        def require(name, ok, rule):
            value = getattr(self, name)
            if value is None:
                raise DomainError(f"{family} copula requires {name}")
            if not ok(value):
                raise DomainError(f"{family} copula requires {name} {rule}, got {value!r}")

        def forbid(*names):
            for name in names:
                if getattr(self, name) is not None:
                    raise DomainError(f"{family} copula does not take {name}")

        if family in ("normal", "student_t"):
            require("rho", lambda r: -1.0 < r < 1.0, "in (-1, 1)")
            forbid("theta")
            if family == "student_t":
                require("nu", lambda n: n > 0, "> 0")
            else:
                forbid("nu")
        elif family == "gumbel":
            require("theta", lambda t: t >= 1.0, ">= 1")
            forbid("rho", "nu")
        elif family == "clayton":
            require("theta", lambda t: t > 0.0, "> 0")
            forbid("rho", "nu")
        elif family == "frank":
            require("theta", lambda t: True, "")
            forbid("rho", "nu")
        else:
            forbid("rho", "nu", "theta")

    @property
    def parameter_name(self) -> Optional[str]:
        """Name of the scalar dependence parameter ("rho" or "theta")."""
        if self.family in ("normal", "student_t"):
            return "rho"
        if self.family == "independence":
            return None
        return "theta"

    @property
    def dependence(self) -> Optional[float]:
        name = self.parameter_name
        return None if name is None else getattr(self, name)

    def with_dependence(self, value: float) -> "CopulaSpec":
        """Copy with the dependence parameter replaced."""
        name = self.parameter_name
        if name is None:
            raise DomainError("the independence copula has no dependence parameter")
        return replace(self, **{name: value})

    @property
    def is_independence(self) -> bool:
        return (
            self.family == "independence"
            or (self.family == "gumbel" and self.theta == 1.0)
            or (self.family == "frank" and self.theta == 0.0)
            or (self.family == "normal" and self.rho == 0.0)
        )

    def label(self) -> str:
        name = self.parameter_name
        if name is None:
            return self.family
        text = f"{self.family} {name}={self.dependence:g}"
        if self.family == "student_t":
            text += f" nu={self.nu:g}"
        return text


def _unit_arrays(u, v):
    u_arr, v_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if np.any(np.isnan(u_arr)) or np.any(np.isnan(v_arr)):
        raise DomainError("copula arguments must not be NaN")
    if np.any((u_arr < 0) | (u_arr > 1) | (v_arr < 0) | (v_arr > 1)):
        raise DomainError("copula arguments must lie in [0, 1]")
    return u_arr, v_arr


def _out(result, u, v):
    if np.ndim(u) == 0 and np.ndim(v) == 0:
        return float(np.asarray(result).reshape(()))
    return result


def _clayton_log_sum(u, v, theta):
    """log(u^-theta + v^-theta - 1) without overflow or cancellation."""
    x = -theta * np.log(u)
    y = -theta * np.log(v)
    big = np.maximum(x, y)
    small = np.minimum(x, y)
    return big + np.log1p(np.exp(-big) * np.expm1(small))


def _interior_cdf(spec: CopulaSpec, u, v):
    """Copula CDF for u, v strictly inside (0, 1)."""
    if spec.is_independence:
        return u * v
    fam = spec.family
    if fam == "normal":
        return bivariate_normal_cdf(ndtri(u), ndtri(v), spec.rho)
    if fam == "student_t":
        uf = np.maximum(u, T_COPULA_FLOOR)
        vf = np.maximum(v, T_COPULA_FLOOR)
        x = student_t_quantile(uf, spec.nu)
        y = student_t_quantile(vf, spec.nu)
        return bivariate_t_cdf(x, y, spec.rho, spec.nu)
    if fam == "gumbel":
        th = spec.theta
        s = np.power(np.power(-np.log(u), th) + np.power(-np.log(v), th), 1.0 / th)
        return np.exp(-s)
    if fam == "clayton":
        return np.exp(-_clayton_log_sum(u, v, spec.theta) / spec.theta)
    if fam == "frank":
        th = spec.theta
        return -np.log1p(np.expm1(-th * u) * np.expm1(-th * v) / np.expm1(-th)) / th
    raise AssertionError(fam)


def copula_cdf(spec: CopulaSpec, u, v):
    """C(u, v) for the given copula.

    The boundary values C(u, 0) = C(0, v) = 0, C(u, 1) = u and C(1, v) = v
    are returned exactly.
    """
    u_arr, v_arr = _unit_arrays(u, v)
    out = np.array(np.minimum(u_arr, v_arr), dtype=float)
    inner = (u_arr > 0) & (u_arr < 1) & (v_arr > 0) & (v_arr < 1)
    if np.any(inner):
        out[inner] = _interior_cdf(spec, u_arr[inner], v_arr[inner])
    return _out(np.clip(out, 0.0, 1.0), u, v)


def _interior_partial_u(spec: CopulaSpec, u, v):
    """dC/du for u, v strictly inside (0, 1)."""
    if spec.is_independence:
        return v.copy()
    fam = spec.family
    if fam == "normal":
        r = spec.rho
        return ndtr((ndtri(v) - r * ndtri(u)) / math.sqrt(1.0 - r * r))
    if fam == "student_t":
        nu, r = spec.nu, spec.rho
        x = student_t_quantile(np.maximum(u, T_COPULA_FLOOR), nu)
        y = student_t_quantile(np.maximum(v, T_COPULA_FLOOR), nu)
        scale = np.sqrt((nu + x * x) * (1.0 - r * r) / (nu + 1.0))
        return student_t_cdf((y - r * x) / scale, nu + 1.0)
    if fam == "gumbel":
        th = spec.theta
        lu = -np.log(u)
        lv = -np.log(v)
        total = np.power(lu, th) + np.power(lv, th)
        s = np.power(total, 1.0 / th)
        # C * s^(1-theta) * (-ln u)^(theta-1) / u, assembled in log space.
        log_val = -s + (1.0 - th) * np.log(s) + (th - 1.0) * np.log(lu) + lu
        return np.exp(log_val)
    if fam == "clayton":
        th = spec.theta
        return np.exp((-th - 1.0) * np.log(u) - (1.0 / th + 1.0) * _clayton_log_sum(u, v, th))
    if fam == "frank":
        th = spec.theta
        eu = np.expm1(-th * u)
        ev = np.expm1(-th * v)
        return np.exp(-th * u) * ev / (np.expm1(-th) + eu * ev)
    raise AssertionError(fam)


def partial_wrt_u(spec: CopulaSpec, u, v):
    """Conditional CDF dC/du (u, v), i.e. P(V <= v | U = u).

    At v = 0 and v = 1 the exact values 0 and 1 are returned. For u on the
    boundary the one-sided limit is approximated by moving u inside (0, 1).
    """
    u_arr, v_arr = _unit_arrays(u, v)
    out = v_arr.astype(float).copy()
    inner = (v_arr > 0) & (v_arr < 1)
    if np.any(inner):
        ui = np.clip(u_arr[inner], _NUDGE, _ONE_BELOW)
        out[inner] = _interior_partial_u(spec, ui, v_arr[inner])
    return _out(np.clip(out, 0.0, 1.0), u, v)


def partial_wrt_v(spec: CopulaSpec, u, v):
    """Conditional CDF dC/dv (u, v), i.e. P(U <= u | V = v)."""
    return partial_wrt_u(spec, v, u)


def normal_rho_derivative(u, v, rho):
    """Derivative of the Normal copula with respect to its correlation.

    Equals the standard bivariate normal density at the normal scores of
    ``u`` and ``v``.
    """
    u_arr, v_arr = _unit_arrays(u, v)
    if np.any((u_arr <= 0) | (u_arr >= 1) | (v_arr <= 0) | (v_arr >= 1)):
        raise DomainError("normal_rho_derivative requires u, v in (0, 1)")
    rho_arr = np.asarray(rho, dtype=float)
    if not np.all((rho_arr > -1.0) & (rho_arr < 1.0)):
        raise DomainError("rho must lie in (-1, 1)")
    result = bivariate_normal_pdf(ndtri(u_arr), ndtri(v_arr), rho_arr)
    return float(result) if np.ndim(result) == 0 else result


def _conditional_inverse(spec: CopulaSpec, u, q, tol=1e-10):
    """Solve dC/du (u, v) = q for v by bisection."""
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    n_iter = int(math.ceil(math.log2(1.0 / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = _interior_partial_u(spec, u, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_pairs(spec: CopulaSpec, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` pairs (u, v) from the copula.

    Elliptical families transform correlated normal or t draws through their
    marginal CDFs. Archimedean families draw u and a uniform level q, then
    invert the conditional CDF dC/du (u, .) = q by bisection.

    Returns
    -------
    ndarray of shape (n, 2)
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if spec.family in ("normal", "student_t") and not spec.is_independence:
        r = spec.rho
        z1 = rng.standard_normal(n)
        z2 = r * z1 + math.sqrt(1.0 - r * r) * rng.standard_normal(n)
        if spec.family == "normal":
            return np.column_stack([ndtr(z1), ndtr(z2)])
        scale = np.sqrt(rng.chisquare(spec.nu, n) / spec.nu)
        return np.column_stack([student_t_cdf(z1 / scale, spec.nu), student_t_cdf(z2 / scale, spec.nu)])
    if spec.is_independence:
        return rng.random((n, 2))
    u = rng.random(n)
    q = rng.random(n)
    # Keep the conditioning value strictly inside (0, 1).
    u = np.clip(u, _NUDGE, _ONE_BELOW)
    return np.column_stack([u, _conditional_inverse(spec, u, q)])
