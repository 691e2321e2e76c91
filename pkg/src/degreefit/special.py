"""Special functions used by the tail analysis and the distribution kernels.

The standard normal CDF and erfc come from scipy's Cephes-based rational
approximations (absolute error well below 1e-12 across the real line).  The
asymptotic erfc expansion is only used inside closed-form tail predictions,
never in pdf/cdf evaluation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

SQRT_PI = math.sqrt(math.pi)
SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)


def std_normal_cdf(x):
    """Standard normal CDF, Phi(x) = (1 + erf(x / sqrt 2)) / 2.

    Accepts scalars or arrays; returns the matching shape.
    """
    return _sp.ndtr(x)


def std_normal_ccdf(x):
    """Complementary standard normal CDF, Phi_c(x) = erfc(x / sqrt 2) / 2."""
    return _sp.ndtr(np.negative(x))


def log_std_normal_cdf(x):
    """log Phi(x), stable for arguments far into the left tail."""
    return _sp.log_ndtr(x)


def log_std_normal_ccdf(x):
    """log Phi_c(x), stable for arguments far into the right tail."""
    return _sp.log_ndtr(np.negative(x))


def std_normal_quantile(q):
    """Inverse of std_normal_cdf on (0, 1)."""
    return _sp.ndtri(q)


def erfc(x):
    """The complementary Gauss error function."""
    return _sp.erfc(x)


def erfc_asymptotic(x: float, n_terms: int = 1) -> float:
    """Partial sum of the large-argument erfc series.

    erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * sum_n (-1)^n (2n)! / (n! (2x)^(2n))

    With ``n_terms=1`` this is exp(-x^2) / (x sqrt(pi)).  The series is
    asymptotic: adding terms helps only while (2n-1) < 2x^2.

    Raises ValueError for x <= 0 (the expansion is a right-tail form).
    """
    if not x > 0.0:
        raise ValueError(f"erfc_asymptotic requires x > 0, got {x}")
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    total = 1.0
    term = 1.0
    for n in range(1, n_terms):
        term *= -(2 * n - 1) / (2.0 * x * x)
        total += term
    return math.exp(-x * x) / (x * SQRT_PI) * total
