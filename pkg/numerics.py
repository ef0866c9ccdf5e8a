"""Log-space special functions for the Beta integrals behind every likelihood.

All probabilities are carried as natural logarithms. Negative infinity stands
for an exact zero; NaN is never returned for valid input.
"""

from __future__ import annotations

import logging
import math
import warnings
from functools import lru_cache
from typing import List

from scipy.integrate import IntegrationWarning, quad
from scipy.special import betaln, gammaln, xlog1py, xlogy

from schemas import DomainError, NumericFailure

logger = logging.getLogger(__name__)

REL_TOLERANCE = 1e-12
MAX_CF_ITERATIONS = 300
MAX_SERIES_TERMS = 20000
QUADRATURE_MAX_N = 10_000

_FPMIN = 1e-300


def _require_positive(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


def _require_unit_interval(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _require_counts(positives: int, n: int) -> None:
    for name, value in (("positives", positives), ("n", n)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")
    if positives > n:
        raise DomainError(f"positives={positives} exceeds n={n}")


def _finite_or_fail(value: float, what: str) -> float:
    if math.isnan(value) or value == math.inf:
        raise NumericFailure(f"{what} produced a non-finite value ({value})")
    return value


def log_gamma(x: float) -> float:
    """ln Γ(x) for x > 0."""
    _require_positive("x", x)
    return float(gammaln(x))


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b)."""
    _require_positive("a", a)
    _require_positive("b", b)
    return float(betaln(a, b))


def _beta_continued_fraction(x: float, a: float, b: float) -> float:
    """Modified Lentz evaluation of the incomplete beta continued fraction.

    Valid (fast) for x < (a + 1) / (a + b + 2).
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAX_CF_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < REL_TOLERANCE:
            return h
    raise NumericFailure(
        f"incomplete beta continued fraction did not converge in {MAX_CF_ITERATIONS} iterations "
        f"(x={x}, a={a}, b={b})"
    )


def _beta_series(x: float, a: float, b: float) -> float:
    """Σ_k (a+b)_k / (a+1)_k · x^k, the hypergeometric series with the same prefactor as the fraction."""
    total = 1.0
    term = 1.0
    for k in range(MAX_SERIES_TERMS):
        term *= (a + b + k) / (a + 1.0 + k) * x
        total += term
        if term < REL_TOLERANCE * total:
            return total
    raise NumericFailure(
        f"incomplete beta series did not converge in {MAX_SERIES_TERMS} terms (x={x}, a={a}, b={b})"
    )


def _log_lower_tail(x: float, a: float, b: float) -> float:
    # ln I_x(a, b) in the region x < (a + 1) / (a + b + 2)
    log_front = xlogy(a, x) + xlog1py(b, -x) - betaln(a, b) - math.log(a)
    try:
        fraction = _beta_continued_fraction(x, a, b)
    except NumericFailure as exc:
        logger.debug("falling back to series: %s", exc)
        fraction = _beta_series(x, a, b)
    if fraction <= 0.0:
        raise NumericFailure(f"incomplete beta evaluation lost positivity (x={x}, a={a}, b={b})")
    return float(log_front + math.log(fraction))


def log_reg_inc_beta(x: float, a: float, b: float) -> float:
    """ln I_x(a, b), the log of the regularized incomplete beta function."""
    _require_unit_interval("x", x)
    _require_positive("a", a)
    _require_positive("b", b)
    if x == 0.0:
        return -math.inf
    if x == 1.0:
        return 0.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _finite_or_fail(_log_lower_tail(x, a, b), "log_reg_inc_beta")
    log_upper = _log_lower_tail(1.0 - x, b, a)
    upper = math.exp(log_upper)
    if upper >= 1.0:
        raise NumericFailure(f"complementary tail reached 1 (x={x}, a={a}, b={b})")
    return _finite_or_fail(math.log1p(-upper), "log_reg_inc_beta")


@lru_cache(maxsize=65536)
def log_trunc_beta_integral(positives: int, n: int, q_max: float) -> float:
    """ln ∫_0^{q_max} q^positives (1 − q)^(n − positives) dq."""
    _require_counts(positives, n)
    if not isinstance(q_max, (int, float)) or not math.isfinite(q_max) or not 0.0 < q_max <= 1.0:
        raise DomainError(f"q_max must lie in (0, 1], got {q_max!r}")
    a = positives + 1.0
    b = n - positives + 1.0
    return _finite_or_fail(log_beta(a, b) + log_reg_inc_beta(float(q_max), a, b), "log_trunc_beta_integral")


def _breakpoints(peak: float, width: float, q_max: float) -> List[float]:
    points = set()
    for k in (0.1, 0.3, 1.0, 3.0, 10.0, 30.0):
        for candidate in (peak - k * width, peak + k * width):
            if 0.0 < candidate < q_max:
                points.add(candidate)
    if 0.0 < peak < q_max:
        points.add(peak)
    return sorted(points)


def quadrature_oracle(positives: int, n: int, q_max: float) -> float:
    """Independent check of log_trunc_beta_integral by adaptive Gauss–Kronrod quadrature.

    The integrand is rescaled by its maximum on [0, q_max] and the interval is
    split around that maximum.
    """
    _require_counts(positives, n)
    if not isinstance(q_max, (int, float)) or not math.isfinite(q_max) or not 0.0 < q_max <= 1.0:
        raise DomainError(f"q_max must lie in (0, 1], got {q_max!r}")
    if n > QUADRATURE_MAX_N:
        raise DomainError(f"quadrature oracle supports n <= {QUADRATURE_MAX_N}, got {n}")
    if n == 0:
        return math.log(q_max)

    failures = n - positives
    mode = positives / n
    peak = min(mode, q_max)
    width = max(math.sqrt(mode * (1.0 - mode) / (n + 2.0)), q_max / (n + 2.0))

    def log_integrand(q: float) -> float:
        return float(xlogy(positives, q) + xlog1py(failures, -q))

    log_peak = log_integrand(peak)

    def scaled(q: float) -> float:
        return math.exp(log_integrand(q) - log_peak)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(
                scaled,
                0.0,
                q_max,
                points=_breakpoints(peak, width, q_max) or None,
                epsabs=0.0,
                epsrel=1e-10,
                limit=500,
            )
        except IntegrationWarning as exc:
            raise NumericFailure(f"quadrature did not converge (positives={positives}, n={n}, q_max={q_max}): {exc}") from exc
    if not value > 0.0:
        raise NumericFailure(f"quadrature returned non-positive mass {value}")
    return float(math.log(value) + log_peak)
