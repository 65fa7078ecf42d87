"""Chi-squared cumulative distribution function.

Evaluates ``F_k(j) = P(k/2, j/2)``, the regularized lower incomplete gamma
function, by power series for ``x < a + 1`` and by a modified-Lentz
continued fraction otherwise.  Both branches iterate to near machine
precision, comfortably inside the 1e-10 absolute contract.
"""

from __future__ import annotations

import math

_MAX_TERMS = 800
_EPS = 1e-16
_TINY = 1e-300


def chi_squared_cdf(j: float, k: int) -> float:
    """Probability that a chi-squared variable with ``k`` dof is <= ``j``."""
    if j < 0.0:
        raise ValueError(f"chi-squared statistic must be >= 0, got {j}")
    if k < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {k}")
    return regularized_lower_gamma(0.5 * k, 0.5 * j)


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x) for a > 0, x >= 0."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cont_fraction(a, x)


def _gamma_series(a: float, x: float) -> float:
    # P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_TERMS):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise RuntimeError(f"gamma series failed to converge for a={a}, x={x}")
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    return min(1.0, total * math.exp(log_prefix))


def _gamma_cont_fraction(a: float, x: float) -> float:
    # Q(a,x) continued fraction, modified Lentz.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise RuntimeError(
            f"gamma continued fraction failed to converge for a={a}, x={x}"
        )
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    return max(0.0, math.exp(log_prefix) * h)
