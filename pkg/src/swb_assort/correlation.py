"""Pearson correlation with an exact two-tailed Student-t p-value."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from swb_assort.errors import DegenerateInputError

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 200_000


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    # None when n < 3: the t distribution has no degrees of freedom
    p_value: float | None
    n: int
    t: float | None = None
    excluded: int = 0

    def significant(self, alpha: float) -> bool:
        return self.p_value is not None and self.p_value < alpha


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the fraction converges fast only below the mean; reflect otherwise
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_tailed_p(r: float, n: int) -> tuple[float, float]:
    """(t, p) for a sample correlation r on n pairs, df = n - 2.

    p = I_{df / (df + t^2)}(df / 2, 1 / 2); that argument equals 1 - r^2,
    which is evaluated as (1 - r)(1 + r) to keep precision near |r| = 1.
    """
    df = n - 2
    one_minus_r2 = (1.0 - r) * (1.0 + r)
    if one_minus_r2 <= 0.0:
        return math.copysign(math.inf, r), 0.0
    t = r * math.sqrt(df / one_minus_r2)
    p = regularized_incomplete_beta(df / 2.0, 0.5, one_minus_r2)
    return t, min(max(p, 0.0), 1.0)


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson r with its two-tailed p-value.

    Sums use :func:`math.fsum`, so the result does not depend on element
    order.  Zero variance in either vector raises DegenerateInputError.
    """
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    n = len(xs)
    if n != len(ys):
        raise ValueError(f"length mismatch: {n} vs {len(ys)}")
    if n < 2:
        raise DegenerateInputError(f"need at least 2 pairs, got {n}")
    if not all(map(math.isfinite, xs)) or not all(map(math.isfinite, ys)):
        raise ValueError("non-finite value in input")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [v - mx for v in xs]
    dy = [v - my for v in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("degenerate vector: zero variance")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    r = min(max(r, -1.0), 1.0)
    if n < 3:
        return CorrelationResult(r=r, p_value=None, n=n)
    t, p = t_two_tailed_p(r, n)
    return CorrelationResult(r=r, p_value=p, n=n, t=t)
