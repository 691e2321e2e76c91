"""Closed-form tail predictions and the power-law / PLN divergence ratio.

The quantile threshold xi_gamma is the minimum degree such that nodes above
it form the top gamma fraction by degree.  Closed forms come from inverting
each model's tail through the one-term erfc expansion; the high-degree
cardinality forms integrate each density above xi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fitting import FitReport
from .distributions import ModelKind
from .samples import DegreeSample
from .special import SQRT_2PI

THEOREM_GAMMA_RANGE = (0.01, 0.1)


@dataclass(frozen=True)
class TailReport:
    """Per-model and empirical gamma-tail thresholds and cardinalities.

    The model count columns use each model's own threshold (an internally
    consistent prediction); the ``*_at_empirical`` pair re-evaluates the
    closed forms at the empirical threshold for the alternative reading.
    ``mu_fit_minus_log_mean`` reports the divergence-ratio premise gap
    (how far the fitted body location sits from the sample log-mean).
    """

    gamma: float
    xi_powerlaw: float
    xi_pln: float
    xi_empirical: float
    count_powerlaw: float
    count_pln: int
    count_empirical: int
    ratio_theorem1: float
    count_powerlaw_at_empirical: float
    count_pln_at_empirical: float
    mu_fit_minus_log_mean: float

    def to_row(self) -> dict:
        return {
            "gamma": self.gamma,
            "xi_powerlaw": self.xi_powerlaw,
            "xi_pln": self.xi_pln,
            "xi_empirical": self.xi_empirical,
            "count_powerlaw": self.count_powerlaw,
            "count_pln": self.count_pln,
            "count_empirical": self.count_empirical,
            "ratio_theorem1": self.ratio_theorem1,
            "count_powerlaw_at_empirical": self.count_powerlaw_at_empirical,
            "count_pln_at_empirical": self.count_pln_at_empirical,
            "mu_fit_minus_log_mean": self.mu_fit_minus_log_mean,
        }


def xi_powerlaw(alpha: float, gamma: float) -> float:
    """(1/gamma)^(1/alpha): the degree whose tail mass x^-alpha equals gamma.

    ``alpha`` here is a tail (ccdf) exponent; callers holding a density
    exponent a use alpha = a - 1 and scale by d0.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    return (1.0 / gamma) ** (1.0 / alpha)


def xi_pln(mu: float, tau: float, gamma: float) -> float:
    """Tail-quantile upper bound e^(mu + sqrt(-2 tau^2 ln(sqrt(2 pi) gamma / tau))).

    Valid while sqrt(2 pi) * gamma / tau < 1, which keeps the radicand
    nonnegative; larger gamma falls outside the bound's derivation.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    radicand = -2.0 * tau * tau * math.log(SQRT_2PI * gamma / tau)
    if radicand < 0:
        raise ValueError(
            "gamma too large relative to tau: the quantile bound requires "
            f"sqrt(2 pi)*gamma/tau < 1, got {SQRT_2PI * gamma / tau:.4f}"
        )
    return math.exp(mu + math.sqrt(radicand))


def ratio_theorem1(nu: float, gamma: float) -> float:
    """(1/(e gamma))^nu: the predicted power-law over PLN quantile ratio.

    ``nu`` is the sample log-mean.  Stated for gamma in [0.01, 0.1]; values
    outside that range warn but still compute.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    lo, hi = THEOREM_GAMMA_RANGE
    if not lo <= gamma <= hi:
        warnings.warn(
            f"quantile-ratio approximation is stated for gamma in [{lo}, {hi}]; "
            f"got {gamma}",
            stacklevel=2,
        )
    return (1.0 / (math.e * gamma)) ** nu


def count_high_degree_powerlaw(n: int, alpha: float, d0: float, xi: float) -> float:
    """N (d0/xi)^(alpha-1): integral of the power-law density above xi.

    Keeps the normalization c = (alpha-1) d0^(alpha-1) exact so d0 != 1
    samples are handled.
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if not xi >= d0 > 0:
        raise ValueError("requires xi >= d0 > 0")
    return n * (d0 / xi) ** (alpha - 1.0)


def count_high_degree_pln(n: int, mu: float, tau: float, xi: float) -> int:
    """Upper-tail cardinality N/(2 pi) * e^(-w^2)/w, w = (ln xi - mu)/(sqrt 2 tau),
    rounded to the nearest count.  Valid only above the body (ln xi > mu)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if n == 0:
        return 0
    if math.log(xi) <= mu:
        raise ValueError(
            "tail cardinality requires ln(xi) > mu (the form only holds on "
            "the upper tail)"
        )
    w = (math.log(xi) - mu) / (math.sqrt(2.0) * tau)
    return int(round(n / (2.0 * math.pi) * math.exp(-w * w) / w))


def _count_pln_unrounded(n, mu, tau, xi) -> float:
    w = (math.log(xi) - mu) / (math.sqrt(2.0) * tau)
    return n / (2.0 * math.pi) * math.exp(-w * w) / w


def tail_report(
    sample: DegreeSample,
    pl_fit: FitReport,
    pln_fit: FitReport,
    gamma: float = 0.1,
) -> TailReport:
    """Compare model tail predictions against the empirical order statistics.

    The power-law threshold column is the fitted model's own gamma-tail
    quantile, d0 * (1/gamma)^(1/(alpha-1)) (its ccdf is (d0/x)^(alpha-1));
    the PLN column is the closed-form bound; the empirical column is the
    ceil((1-gamma) n)-th ascending order statistic with threshold ties
    counted into the tail.
    """
    if pl_fit.model.kind is not ModelKind.POWER_LAW:
        raise ValueError("pl_fit must be a power-law report")
    if pln_fit.model.kind is not ModelKind.PLN:
        raise ValueError("pln_fit must be a PLN report")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    alpha, d0 = pl_fit.model.alpha, pl_fit.model.d0
    mu, tau = pln_fit.model.mu, pln_fit.model.tau
    n = sample.n

    xi_pl = d0 * xi_powerlaw(alpha - 1.0, gamma)
    xi_p = xi_pln(mu, tau, gamma)
    xi_emp = sample.order_quantile(1.0 - gamma)

    count_pl = count_high_degree_powerlaw(n, alpha, d0, max(xi_pl, d0))
    count_p = count_high_degree_pln(n, mu, tau, xi_p)
    count_emp = int(np.count_nonzero(sample.degrees >= xi_emp))
    count_pl_at_emp = count_high_degree_powerlaw(n, alpha, d0, max(xi_emp, d0))
    if math.log(xi_emp) > mu:
        count_p_at_emp = _count_pln_unrounded(n, mu, tau, xi_emp)
    else:
        count_p_at_emp = math.nan

    return TailReport(
        gamma=gamma,
        xi_powerlaw=xi_pl,
        xi_pln=xi_p,
        xi_empirical=xi_emp,
        count_powerlaw=count_pl,
        count_pln=count_p,
        count_empirical=count_emp,
        ratio_theorem1=ratio_theorem1(sample.log_mean, gamma),
        count_powerlaw_at_empirical=count_pl_at_emp,
        count_pln_at_empirical=count_p_at_emp,
        mu_fit_minus_log_mean=mu - sample.log_mean,
    )
