"""Special-function kernel: normal, Student-t, Gamma and Gauss hypergeometric.

Every function accepts scalars or numpy arrays (broadcast together) unless
noted, and returns a float for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import betaln, gammaln, ndtr, ndtri

from .errors import DomainError, NumericError

__all__ = [
    "Accuracy",
    "std_normal_cdf",
    "std_normal_quantile",
    "bivariate_normal_cdf",
    "bivariate_normal_pdf",
    "student_t_cdf",
    "student_t_pdf",
    "student_t_quantile",
    "bivariate_t_cdf",
    "regularized_incomplete_beta",
    "gauss_2f1",
    "gamma_fn",
]

_TWO_PI = 2.0 * math.pi
_UNDERFLOW = 1e-300
# Arguments beyond this magnitude are saturated; Phi(-40) underflows to 0.
_SATURATE = 40.0


@dataclass(frozen=True)
class Accuracy:
    """Stopping rule for series evaluations.

    Attributes
    ----------
    abs_tol : float
        A series is declared converged once the latest term is smaller than
        ``abs_tol`` times the magnitude of the partial sum.
    max_terms : int
        Number of terms after which the series is abandoned.
    """

    abs_tol: float = 1e-10
    max_terms: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


def _scalar_or_array(result, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(np.asarray(result).reshape(()))
    return result


def std_normal_cdf(x):
    """Standard normal distribution function.

    Values below 1e-300 are flushed to zero.
    """
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise DomainError("std_normal_cdf requires finite arguments")
    p = ndtr(x_arr)
    p = np.where(p < _UNDERFLOW, 0.0, p)
    return _scalar_or_array(p, x)


def std_normal_quantile(p):
    """Inverse of the standard normal distribution function on (0, 1)."""
    p_arr = np.asarray(p, dtype=float)
    if not np.all((p_arr > 0.0) & (p_arr < 1.0)):
        raise DomainError("std_normal_quantile requires 0 < p < 1")
    return _scalar_or_array(ndtri(p_arr), p)


# Gauss-Legendre rule on [-1, 1] shifted to [0, 2]; with a scale of half the
# target length this integrates over any interval starting at zero.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_GL_X = 1.0 + _GL_NODES


def _bvn_upper(h, k, r):
    """P(X > h, Y > k) for standard bivariate normal with correlation r.

    Vectorised form of Genz's BVNU algorithm (Drezner-Wesolowsky single
    integral with an asymptotic expansion for |r| >= 0.925). Arguments are
    1-D arrays of equal length with finite h, k and |r| < 1.
    """
    out = np.empty_like(h)
    moderate = np.abs(r) < 0.925

    if np.any(moderate):
        hm, km, rm = h[moderate], k[moderate], r[moderate]
        hk = hm * km
        hs = 0.5 * (hm * hm + km * km)
        asr = 0.5 * np.arcsin(rm)
        sn = np.sin(asr[:, None] * _GL_X)
        terms = np.exp((sn * hk[:, None] - hs[:, None]) / (1.0 - sn * sn))
        bvn = terms @ _GL_WEIGHTS * asr / _TWO_PI
        out[moderate] = bvn + ndtr(-hm) * ndtr(-km)

    strong = ~moderate
    if np.any(strong):
        hh, kk, rr = h[strong], k[strong], r[strong]
        kk = np.where(rr < 0, -kk, kk)
        hk = hh * kk
        a_s = 1.0 - rr * rr
        a = np.sqrt(a_s)
        bs = (hh - kk) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        asr = -0.5 * (bs / a_s + hk)
        bvn = np.where(
            asr > -100.0,
            a * np.exp(np.maximum(asr, -100.0))
            * (1.0 - c * (bs - a_s) * (1.0 - d * bs) / 3.0 + c * d * a_s * a_s),
            0.0,
        )
        b = np.sqrt(bs)
        sp = math.sqrt(_TWO_PI) * ndtr(-b / a)
        tail = np.exp(-0.5 * np.maximum(hk, -100.0)) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        bvn = bvn - np.where(hk > -100.0, tail, 0.0)

        a_half = 0.5 * a
        xs = (a_half[:, None] * _GL_X) ** 2
        asr_x = -0.5 * (bs[:, None] / xs + hk[:, None])
        keep = asr_x > -100.0
        sp_x = 1.0 + c[:, None] * xs * (1.0 + 5.0 * d[:, None] * xs)
        rs = np.sqrt(1.0 - xs)
        ep = np.exp(-0.5 * hk[:, None] * xs / (1.0 + rs) ** 2) / rs
        integrand = np.where(keep, np.exp(np.maximum(asr_x, -100.0)) * (sp_x - ep), 0.0)
        bvn = (a_half * (integrand @ _GL_WEIGHTS) - bvn) / _TWO_PI

        positive = rr > 0
        upper = bvn + ndtr(-np.maximum(hh, kk))
        band = np.where(hh < 0, ndtr(kk) - ndtr(hh), ndtr(-hh) - ndtr(-kk))
        negative = np.where(hh >= kk, -bvn, band - bvn)
        out[strong] = np.where(positive, upper, negative)

    return np.clip(out, 0.0, 1.0)


def bivariate_normal_cdf(a, b, rho):
    """P(X <= a, Y <= b) for a standard bivariate normal with correlation rho.

    Parameters
    ----------
    a, b : float or array_like
        Upper integration limits; infinite values are allowed.
    rho : float or array_like
        Correlation in [-1, 1]. The endpoints use the comonotone and
        countermonotone closed forms.

    Returns
    -------
    float or ndarray
        Probability accurate to about 1e-15 absolute.
    """
    a_arr, b_arr, r_arr = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(rho, dtype=float)
    )
    if np.any(np.isnan(a_arr)) or np.any(np.isnan(b_arr)):
        raise DomainError("bivariate_normal_cdf limits must not be NaN")
    if not np.all(np.abs(r_arr) <= 1.0):
        raise DomainError("correlation must lie in [-1, 1]")
    shape = a_arr.shape
    a_flat = np.clip(a_arr.ravel(), -_SATURATE, _SATURATE)
    b_flat = np.clip(b_arr.ravel(), -_SATURATE, _SATURATE)
    r_flat = r_arr.ravel()

    out = np.empty(a_flat.shape)
    comonotone = r_flat == 1.0
    countermonotone = r_flat == -1.0
    independent = r_flat == 0.0
    inner = ~(comonotone | countermonotone | independent)

    out[comonotone] = ndtr(np.minimum(a_flat[comonotone], b_flat[comonotone]))
    out[countermonotone] = np.maximum(
        ndtr(a_flat[countermonotone]) + ndtr(b_flat[countermonotone]) - 1.0, 0.0
    )
    out[independent] = ndtr(a_flat[independent]) * ndtr(b_flat[independent])
    if np.any(inner):
        out[inner] = _bvn_upper(-a_flat[inner], -b_flat[inner], r_flat[inner])
    out = np.where(out < _UNDERFLOW, 0.0, out).reshape(shape)
    return _scalar_or_array(out, a, b, rho)


def bivariate_normal_pdf(x, y, rho):
    """Density of the standard bivariate normal with correlation ``rho``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if not np.all(np.abs(rho) < 1.0):
        raise DomainError("correlation must lie in (-1, 1)")
    one_minus = 1.0 - rho * rho
    quad = (x * x - 2.0 * rho * x * y + y * y) / one_minus
    dens = np.exp(-0.5 * quad) / (_TWO_PI * np.sqrt(one_minus))
    return _scalar_or_array(dens, x, y, rho)


def _continued_fraction_beta(a, b, x, max_iter=2000, eps=1e-16):
    """Lentz evaluation of the incomplete-beta continued fraction."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, max_iter + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > eps
        if not np.any(active):
            return h
    raise NumericError("incomplete beta continued fraction did not converge")


# Stirling series coefficients B_2k / (2k (2k - 1)) for log-gamma.
_STIRLING = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0)
_STIRLING_MIN = 20.0
_HALF_LOG_TWO_PI = 0.5 * math.log(_TWO_PI)


def _stirling_correction(x):
    # lgamma(x) - [(x - 1/2) log x - x + log(2 pi) / 2] for x >= _STIRLING_MIN.
    inv2 = 1.0 / (x * x)
    acc = np.zeros_like(x)
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return acc / x


def _log_beta(a, b):
    """log B(a, b) without the cancellation of lgamma differences at large arguments.

    ``scipy.special.betaln`` subtracts log-gamma values of size ~a log a,
    which loses about 1e-12 relative accuracy already at a = 5000.
    """
    big = np.maximum(a, b)
    small = np.minimum(a, b)
    out = betaln(a, b)
    one_big = (big >= _STIRLING_MIN) & (small < _STIRLING_MIN)
    if np.any(one_big):
        x, y = big[one_big], small[one_big]
        diff = -y * np.log(x) - (x + y - 0.5) * np.log1p(y / x) + y
        diff += _stirling_correction(x) - _stirling_correction(x + y)
        out[one_big] = gammaln(y) + diff
    both_big = small >= _STIRLING_MIN
    if np.any(both_big):
        x, y = big[both_big], small[both_big]
        out[both_big] = (
            _HALF_LOG_TWO_PI
            - (x - 0.5) * np.log1p(y / x)
            - (y - 0.5) * np.log1p(x / y)
            - 0.5 * np.log(x + y)
            + _stirling_correction(x)
            + _stirling_correction(y)
            - _stirling_correction(x + y)
        )
    return out


def regularized_incomplete_beta(a, b, x, x_complement=None):
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    a, b : float or array_like
        Positive shape parameters.
    x : float or array_like
        Argument in [0, 1].
    x_complement : array_like, optional
        ``1 - x`` computed by the caller without cancellation.
    """
    a_arr, b_arr, x_arr = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(x, dtype=float)
    )
    y_arr = 1.0 - x_arr if x_complement is None else np.broadcast_to(
        np.asarray(x_complement, dtype=float), x_arr.shape
    )
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise DomainError("incomplete beta shape parameters must be positive")
    if np.any((x_arr < 0) | (x_arr > 1)):
        raise DomainError("incomplete beta argument must lie in [0, 1]")
    a_f, b_f, x_f, y_f = (np.ravel(v).astype(float) for v in (a_arr, b_arr, x_arr, y_arr))
    out = np.zeros_like(x_f)
    out[y_f == 0.0] = 1.0
    inner = (x_f > 0.0) & (y_f > 0.0)
    if np.any(inner):
        ai, bi, xi, yi = a_f[inner], b_f[inner], x_f[inner], y_f[inner]
        # log1p of the complement keeps log x accurate when x is near 1.
        log_x = np.where(xi > 0.5, np.log1p(-np.minimum(yi, 0.5)), np.log(xi))
        log_y = np.where(yi > 0.5, np.log1p(-np.minimum(xi, 0.5)), np.log(yi))
        log_front = ai * log_x + bi * log_y - _log_beta(ai, bi)
        direct = xi < (ai + 1.0) / (ai + bi + 2.0)
        res = np.empty_like(xi)
        if np.any(direct):
            cf = _continued_fraction_beta(ai[direct], bi[direct], xi[direct])
            res[direct] = np.exp(log_front[direct]) * cf / ai[direct]
        flip = ~direct
        if np.any(flip):
            cf = _continued_fraction_beta(bi[flip], ai[flip], yi[flip])
            res[flip] = 1.0 - np.exp(log_front[flip]) * cf / bi[flip]
        out[inner] = res
    return _scalar_or_array(out.reshape(x_arr.shape), a, b, x)


def _check_nu(nu):
    nu_arr = np.asarray(nu, dtype=float)
    if not np.all(nu_arr > 0) or not np.all(np.isfinite(nu_arr)):
        raise DomainError("degrees of freedom must be positive and finite")
    return nu_arr


def student_t_cdf(x, nu):
    """Student-t distribution function with ``nu`` degrees of freedom."""
    nu_arr = _check_nu(nu)
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)):
        raise DomainError("student_t_cdf argument must not be NaN")
    x_b, nu_b = np.broadcast_arrays(x_arr, nu_arr)
    x2 = x_b * x_b
    finite = np.isfinite(x_b)
    denom = np.where(finite, nu_b + x2, 1.0)
    # Lower tail mass P(T < -|x|) = I_{nu/(nu+x^2)}(nu/2, 1/2) / 2.
    tail_x = np.where(finite, nu_b / denom, 0.0)
    tail_y = np.where(finite, x2 / denom, 1.0)
    tail = 0.5 * regularized_incomplete_beta(0.5 * nu_b, 0.5, tail_x, tail_y)
    tail = np.asarray(tail, dtype=float)
    cdf = np.where(x_b > 0, 1.0 - tail, tail)
    cdf = np.where(cdf < _UNDERFLOW, 0.0, cdf)
    return _scalar_or_array(cdf, x, nu)


def student_t_pdf(x, nu):
    """Student-t density with ``nu`` degrees of freedom."""
    nu_arr = _check_nu(nu)
    x_arr = np.asarray(x, dtype=float)
    log_norm = gammaln(0.5 * (nu_arr + 1.0)) - gammaln(0.5 * nu_arr) - 0.5 * np.log(nu_arr * math.pi)
    dens = np.exp(log_norm - 0.5 * (nu_arr + 1.0) * np.log1p(x_arr * x_arr / nu_arr))
    return _scalar_or_array(dens, x, nu)


def student_t_quantile(p, nu, max_iter=400):
    """Inverse of :func:`student_t_cdf` by safeguarded Newton iteration.

    The search runs on the lower half (p <= 1/2) and uses symmetry for the
    upper half. A bracket is grown by doubling, then Newton steps that leave
    the bracket are replaced by bisection.
    """
    nu_arr = _check_nu(nu)
    p_arr = np.asarray(p, dtype=float)
    if not np.all((p_arr > 0.0) & (p_arr < 1.0)):
        raise DomainError("student_t_quantile requires 0 < p < 1")
    p_b, nu_b = np.broadcast_arrays(p_arr, nu_arr)
    shape = p_b.shape
    p_f = p_b.ravel().astype(float)
    nu_f = nu_b.ravel().astype(float)
    upper = p_f > 0.5
    q = np.where(upper, 1.0 - p_f, p_f)

    hi = np.zeros_like(q)
    lo = -np.ones_like(q)
    for _ in range(2100):
        still = np.asarray(student_t_cdf(lo, nu_f)) > q
        if not np.any(still):
            break
        hi = np.where(still, lo, hi)
        lo = np.where(still, 2.0 * lo, lo)
    else:
        raise NumericError("could not bracket the Student-t quantile")

    x = np.maximum(std_normal_quantile(np.clip(q, 1e-300, 0.5)) * 1.0, lo)
    x = np.where((x > hi) | (x < lo), 0.5 * (lo + hi), x)
    for iteration in range(max_iter):
        f = np.asarray(student_t_cdf(x, nu_f)) - q
        lo = np.where(f < 0, x, lo)
        hi = np.where(f >= 0, x, hi)
        dens = np.asarray(student_t_pdf(x, nu_f))
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / dens
        x_new = x - step
        # Rounding noise in the CDF can stall Newton; fall back to pure
        # bisection after a while, which always terminates.
        bad = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi) | (iteration >= 60)
        x_new = np.where(bad, 0.5 * (lo + hi), x_new)
        x_new = np.where(f == 0, x, x_new)
        resolution = 1e-12 * np.maximum(1.0, np.abs(x))
        done = (np.abs(x_new - x) <= resolution) | (hi - lo <= resolution)
        x = x_new
        if np.all(done | (f == 0)):
            break
    else:
        raise NumericError("Student-t quantile iteration did not converge")
    x = np.where(q == 0.5, 0.0, x)
    out = np.where(upper, -x, x).reshape(shape)
    return _scalar_or_array(out, p, nu)


@lru_cache(maxsize=64)
def _log_scale_rule(nu: float):
    """Trapezoid nodes for the mixing variable S = sqrt(W / nu), W ~ chi2(nu).

    Works on x = log S, where the density of x is
    2 (nu/2)^(nu/2) / Gamma(nu/2) * exp(nu x - nu e^{2x} / 2). The rule covers
    the region where the density is within e^-50 of its maximum; the
    integrand is analytic, so the trapezoid rule converges geometrically.
    """
    log_norm = math.log(2.0) + 0.5 * nu * math.log(0.5 * nu) - math.lgamma(0.5 * nu)

    def rel_log_density(x):
        return nu * (x - 0.5 * math.expm1(2.0 * x))

    cutoff = -50.0
    width = 1.0 / math.sqrt(2.0 * nu)
    left = -width
    while rel_log_density(left) > cutoff:
        left *= 2.0
    right = width
    while rel_log_density(right) > cutoff:
        right *= 2.0
    x_lo = brentq(lambda x: rel_log_density(x) - cutoff, left, 0.0)
    x_hi = brentq(lambda x: rel_log_density(x) - cutoff, 0.0, right)
    step = min(0.08, 0.25 * width)
    n = int(math.ceil((x_hi - x_lo) / step)) + 1
    x = np.linspace(x_lo, x_hi, n)
    h = x[1] - x[0]
    weights = h * np.exp(log_norm + nu * x - 0.5 * nu * np.exp(2.0 * x))
    weights /= weights.sum()
    return np.exp(x), weights


def bivariate_t_cdf(a, b, rho, nu):
    """Bivariate Student-t distribution function with common ``nu``.

    Uses the representation T = Z / S with S = sqrt(W / nu), so that
    P(T1 <= a, T2 <= b) = E[Phi2(a S, b S; rho)], evaluated by a trapezoid
    rule in log S.

    Parameters
    ----------
    a, b : float or array_like
        Upper limits; infinite values allowed.
    rho : float
        Correlation in (-1, 1).
    nu : float
        Degrees of freedom, positive.
    """
    rho = float(rho)
    nu = float(nu)
    if not -1.0 < rho < 1.0:
        raise DomainError("correlation must lie in (-1, 1)")
    if not (nu > 0 and math.isfinite(nu)):
        raise DomainError("degrees of freedom must be positive and finite")
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any(np.isnan(a_arr)) or np.any(np.isnan(b_arr)):
        raise DomainError("bivariate_t_cdf limits must not be NaN")
    scale, weights = _log_scale_rule(nu)
    a_f = a_arr.ravel()[:, None]
    b_f = b_arr.ravel()[:, None]
    aa = a_f * scale
    bb = b_f * scale
    phi2 = bivariate_normal_cdf(aa, bb, np.full(aa.shape, rho))
    out = np.clip(phi2 @ weights, 0.0, 1.0)
    out = np.where(out < _UNDERFLOW, 0.0, out).reshape(a_arr.shape)
    return _scalar_or_array(out, a, b)


def gauss_2f1(a: float, b: float, c: float, z: float, accuracy: Accuracy = Accuracy()) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) by its power series.

    Only the disc |z| < 1 is supported. The series stops once the latest
    term falls below ``accuracy.abs_tol`` times the partial sum.

    Raises
    ------
    DomainError
        If |z| >= 1 or c is a non-positive integer.
    NumericError
        If the series has not converged after ``accuracy.max_terms`` terms.
    """
    if not abs(z) < 1.0:
        raise DomainError(f"gauss_2f1 requires |z| < 1, got z={z}")
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"gauss_2f1 undefined for non-positive integer c={c}")
    total = 1.0
    term = 1.0
    for k in range(accuracy.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if abs(term) < accuracy.abs_tol * abs(total):
            return total
        if term == 0.0:
            return total
    raise NumericError(
        f"gauss_2f1({a}, {b}; {c}; {z}) did not converge in {accuracy.max_terms} terms"
    )


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)
