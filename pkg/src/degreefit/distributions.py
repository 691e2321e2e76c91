"""The seven degree-distribution families: pdf/cdf/ccdf, quantiles, sampling.

Families are continuous on (0, inf) (or [d0, inf) for the Pareto-anchored
ones).  Everything evaluates through log-space kernels so that extreme
exponents (e.g. a double-Pareto upper exponent of 1e3, used to check the
single-Pareto limit forms) stay finite.

Conventions:
  * PowerLaw         f(x) = c x^-alpha,  c = (alpha-1) d0^(alpha-1),  x >= d0
  * Lognormal        ln X ~ Normal(mu, sigma^2)
  * Exponential      f(x) = lam exp(-lam (x - shift)),  x > shift
                     (shift is data-determined when fitted, 0 by default)
  * ParetoExpCutoff  f(x) ~ x^-alpha exp(-lam x),  x >= d0
  * PLN              f(x) = beta x^(beta-1) A Phi_c((ln x - mu + beta tau^2)/tau),
                     A = exp(-beta mu + beta^2 tau^2 / 2)
  * LNP              f(x) = alpha x^(-alpha-1) B Phi((ln x - mu - alpha tau^2)/tau),
                     B = exp(alpha mu + alpha^2 tau^2 / 2)
  * DPLN             alpha beta/(alpha+beta) * [LNP kernel + PLN kernel];
                     PLN is its alpha->inf limit, LNP its beta->inf limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special as _sp
from scipy.optimize import brentq

from .samples import DegreeSample
from .special import (
    SQRT_2PI,
    log_std_normal_cdf,
    log_std_normal_ccdf,
    std_normal_cdf,
    std_normal_ccdf,
    std_normal_quantile,
)


class ModelKind(str, Enum):
    POWER_LAW = "powerlaw"
    LOGNORMAL = "lognormal"
    EXPONENTIAL = "exponential"
    PARETO_EXP_CUTOFF = "pareto-exp-cutoff"
    LNP = "lnp"
    PLN = "pln"
    DPLN = "dpln"


PARAM_NAMES = {
    ModelKind.POWER_LAW: ("alpha", "d0"),
    ModelKind.LOGNORMAL: ("mu", "sigma"),
    ModelKind.EXPONENTIAL: ("lam", "shift"),
    ModelKind.PARETO_EXP_CUTOFF: ("alpha", "lam", "d0"),
    ModelKind.LNP: ("alpha", "mu", "tau"),
    ModelKind.PLN: ("beta", "mu", "tau"),
    ModelKind.DPLN: ("alpha", "beta", "mu", "tau"),
}

# Nominal parameter-vector length per family (d0 included where the family
# carries one; the Exponential's data-determined shift is not counted).
PARAM_COUNT = {
    ModelKind.POWER_LAW: 2,
    ModelKind.LOGNORMAL: 2,
    ModelKind.EXPONENTIAL: 1,
    ModelKind.PARETO_EXP_CUTOFF: 3,
    ModelKind.LNP: 3,
    ModelKind.PLN: 3,
    ModelKind.DPLN: 4,
}

# Free parameters estimated by fitting; data-determined anchors (d0, shift)
# are excluded.  This is the k that enters AIC.
FREE_PARAM_COUNT = {
    ModelKind.POWER_LAW: 1,
    ModelKind.LOGNORMAL: 2,
    ModelKind.EXPONENTIAL: 1,
    ModelKind.PARETO_EXP_CUTOFF: 2,
    ModelKind.LNP: 3,
    ModelKind.PLN: 3,
    ModelKind.DPLN: 4,
}


@dataclass(frozen=True)
class ModelSpec:
    """A distribution family tag plus its parameter vector.

    Instances are immutable and hashable; parameters are reachable by name
    (``model.alpha``, ``model.mu``, ...) per the family's naming.
    """

    kind: ModelKind
    values: tuple

    def __post_init__(self):
        names = PARAM_NAMES[self.kind]
        if len(self.values) != len(names):
            raise ValueError(
                f"{self.kind.value} expects parameters {names}, got {self.values}"
            )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for name, value in zip(names, self.values):
            if not math.isfinite(value):
                raise ValueError(f"{self.kind.value}: {name} must be finite")
        p = dict(zip(names, self.values))
        if self.kind is ModelKind.POWER_LAW:
            if p["alpha"] <= 1:
                raise ValueError("powerlaw alpha must exceed 1 (normalizability)")
            if p["d0"] <= 0:
                raise ValueError("powerlaw d0 must be positive")
        elif self.kind is ModelKind.LOGNORMAL:
            if p["sigma"] <= 0:
                raise ValueError("lognormal sigma must be positive")
        elif self.kind is ModelKind.EXPONENTIAL:
            if p["lam"] <= 0:
                raise ValueError("exponential rate must be positive")
            if p["shift"] < 0:
                raise ValueError("exponential shift must be nonnegative")
        elif self.kind is ModelKind.PARETO_EXP_CUTOFF:
            if p["alpha"] <= 0 or p["lam"] <= 0 or p["d0"] <= 0:
                raise ValueError("pareto-exp-cutoff parameters must be positive")
        else:
            for name in ("alpha", "beta", "tau"):
                if name in p and p[name] <= 0:
                    raise ValueError(f"{self.kind.value} {name} must be positive")

    def __getattr__(self, name):
        names = PARAM_NAMES[self.kind]
        if name in names:
            return self.values[names.index(name)]
        raise AttributeError(f"{self.kind.value} model has no parameter {name!r}")

    @property
    def param_dict(self) -> dict:
        return dict(zip(PARAM_NAMES[self.kind], self.values))

    @property
    def free_param_count(self) -> int:
        return FREE_PARAM_COUNT[self.kind]

    # -- constructors ------------------------------------------------------
    @classmethod
    def power_law(cls, alpha, d0=1.0):
        return cls(ModelKind.POWER_LAW, (alpha, d0))

    @classmethod
    def lognormal(cls, mu, sigma):
        return cls(ModelKind.LOGNORMAL, (mu, sigma))

    @classmethod
    def exponential(cls, lam, shift=0.0):
        return cls(ModelKind.EXPONENTIAL, (lam, shift))

    @classmethod
    def pareto_exp_cutoff(cls, alpha, lam, d0=1.0):
        return cls(ModelKind.PARETO_EXP_CUTOFF, (alpha, lam, d0))

    @classmethod
    def lnp(cls, alpha, mu, tau):
        return cls(ModelKind.LNP, (alpha, mu, tau))

    @classmethod
    def pln(cls, beta, mu, tau):
        return cls(ModelKind.PLN, (beta, mu, tau))

    @classmethod
    def dpln(cls, alpha, beta, mu, tau):
        return cls(ModelKind.DPLN, (alpha, beta, mu, tau))


@dataclass(frozen=True)
class PlnAuxiliaries:
    """The recurring PLN tail quantities A = e^(-beta mu + beta^2 tau^2/2)
    and z(x) = (ln x - mu)/tau."""

    beta: float
    mu: float
    tau: float

    @property
    def log_a(self) -> float:
        return -self.beta * self.mu + 0.5 * self.beta**2 * self.tau**2

    @property
    def a(self) -> float:
        return math.exp(self.log_a)

    def z(self, x):
        return (np.log(x) - self.mu) / self.tau


def support(model: ModelSpec) -> tuple:
    """(infimum, supremum) of the density's support."""
    if model.kind in (ModelKind.POWER_LAW, ModelKind.PARETO_EXP_CUTOFF):
        return (model.d0, math.inf)
    if model.kind is ModelKind.EXPONENTIAL:
        return (model.shift, math.inf)
    return (0.0, math.inf)


# ---------------------------------------------------------------------------
# Upper incomplete gamma for possibly nonpositive first argument (the
# exponential-cutoff normalizer).  Returns log Gamma(s, t).
# ---------------------------------------------------------------------------

def log_gamma_upper(s: float, t) -> np.ndarray:
    """log of the (unregularized) upper incomplete gamma, any real s, t > 0.

    Small t uses the downward recurrence from a positive shifted parameter;
    large t uses the asymptotic series t^(s-1) e^-t sum_k prod_j (s-j)/t^k.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise ValueError("log_gamma_upper requires t > 0")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    t_switch = max(40.0, 2.0 * abs(s) + 25.0)
    small = t < t_switch
    if np.any(small):
        ts = t[small]
        # shift s up into (0, 1] where scipy's regularized form applies,
        # then recurse back down: Gamma(s,t) = (Gamma(s+1,t) - t^s e^-t)/s
        k = 0
        s_pos = s
        while s_pos <= 0:
            s_pos += 1.0
            k += 1
        g = _sp.gamma(s_pos) * _sp.gammaincc(s_pos, ts)
        s_j = s_pos
        for _ in range(k):
            s_j -= 1.0
            if s_j == 0.0:
                g = _sp.exp1(ts)  # Gamma(0, t) = E1(t); recurrence divides by s
            else:
                g = (g - ts**s_j * np.exp(-ts)) / s_j
        out[small] = np.log(np.maximum(g, np.finfo(float).tiny))
    if np.any(~small):
        tl = t[~small]
        total = np.ones_like(tl)
        term = np.ones_like(tl)
        for j in range(1, 60):
            term = term * (s - j) / tl
            total += term
            if np.all(np.abs(term) < 1e-17 * np.abs(total)):
                break
        out[~small] = (s - 1.0) * np.log(tl) - tl + np.log(total)
    return out[0] if scalar else out


@lru_cache(maxsize=4096)
def _pec_log_norm(alpha: float, lam: float, d0: float) -> float:
    """log of Z = integral_{d0}^inf x^-alpha e^(-lam x) dx."""
    return float((alpha - 1.0) * math.log(lam) + log_gamma_upper(1.0 - alpha, lam * d0))


# ---------------------------------------------------------------------------
# log-pdf kernels
# ---------------------------------------------------------------------------

def log_pdf(model: ModelSpec, x) -> np.ndarray:
    """Natural log of the density; -inf where the density is zero.

    Rejects nonpositive x (all families live on positive degrees).
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("degrees must be strictly positive")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    lx = np.log(x)
    kind = model.kind

    if kind is ModelKind.POWER_LAW:
        alpha, d0 = model.values
        out = math.log(alpha - 1.0) + (alpha - 1.0) * math.log(d0) - alpha * lx
        out = np.where(x < d0, -np.inf, out)
    elif kind is ModelKind.LOGNORMAL:
        mu, sigma = model.values
        z = (lx - mu) / sigma
        out = -lx - math.log(sigma * SQRT_2PI) - 0.5 * z * z
    elif kind is ModelKind.EXPONENTIAL:
        lam, shift = model.values
        out = np.where(x > shift, math.log(lam) - lam * (x - shift), -np.inf)
    elif kind is ModelKind.PARETO_EXP_CUTOFF:
        alpha, lam, d0 = model.values
        out = -alpha * lx - lam * x - _pec_log_norm(alpha, lam, d0)
        out = np.where(x < d0, -np.inf, out)
    elif kind is ModelKind.PLN:
        beta, mu, tau = model.values
        out = (
            math.log(beta)
            + (beta - 1.0) * lx
            + (-beta * mu + 0.5 * beta**2 * tau**2)
            + log_std_normal_ccdf((lx - mu + beta * tau**2) / tau)
        )
    elif kind is ModelKind.LNP:
        alpha, mu, tau = model.values
        out = (
            math.log(alpha)
            + (-alpha - 1.0) * lx
            + (alpha * mu + 0.5 * alpha**2 * tau**2)
            + log_std_normal_cdf((lx - mu - alpha * tau**2) / tau)
        )
    elif kind is ModelKind.DPLN:
        alpha, beta, mu, tau = model.values
        t1 = (
            (-alpha - 1.0) * lx
            + (alpha * mu + 0.5 * alpha**2 * tau**2)
            + log_std_normal_cdf((lx - mu - alpha * tau**2) / tau)
        )
        t2 = (
            (beta - 1.0) * lx
            + (-beta * mu + 0.5 * beta**2 * tau**2)
            + log_std_normal_ccdf((lx - mu + beta * tau**2) / tau)
        )
        out = math.log(alpha * beta / (alpha + beta)) + np.logaddexp(t1, t2)
    else:  # pragma: no cover
        raise ValueError(f"unknown model kind {kind}")
    return out[0] if scalar else out


def pdf(model: ModelSpec, x) -> np.ndarray:
    """Density at x.  Rejects x <= 0, and x < d0 for the d0-anchored families."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if model.kind in (ModelKind.POWER_LAW, ModelKind.PARETO_EXP_CUTOFF):
        if np.any(arr < model.d0):
            raise ValueError(
                f"{model.kind.value} density is undefined below d0={model.d0}"
            )
    return np.exp(log_pdf(model, x))


def cdf(model: ModelSpec, x) -> np.ndarray:
    """Cumulative distribution at x > 0."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("degrees must be strictly positive")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = 1.0 - _ccdf_core(model, x)
    out = np.clip(out, 0.0, 1.0)
    return out[0] if scalar else out


def ccdf(model: ModelSpec, x) -> np.ndarray:
    """Tail probability P(X > x) at x > 0; computed directly, not as 1 - cdf,
    so deep tails keep relative precision."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("degrees must be strictly positive")
    scalar = x.ndim == 0
    out = _ccdf_core(model, np.atleast_1d(x))
    return out[0] if scalar else out


def _ccdf_core(model: ModelSpec, x: np.ndarray) -> np.ndarray:
    lx = np.log(x)
    kind = model.kind
    if kind is ModelKind.POWER_LAW:
        alpha, d0 = model.values
        out = np.where(x < d0, 1.0, np.exp((alpha - 1.0) * (math.log(d0) - lx)))
    elif kind is ModelKind.LOGNORMAL:
        mu, sigma = model.values
        out = std_normal_ccdf((lx - mu) / sigma)
    elif kind is ModelKind.EXPONENTIAL:
        lam, shift = model.values
        out = np.where(x > shift, np.exp(-lam * np.maximum(x - shift, 0.0)), 1.0)
    elif kind is ModelKind.PARETO_EXP_CUTOFF:
        alpha, lam, d0 = model.values
        log_tail = log_gamma_upper(1.0 - alpha, lam * np.maximum(x, d0)) - (
            log_gamma_upper(1.0 - alpha, lam * d0)
        )
        out = np.where(x < d0, 1.0, np.exp(np.minimum(log_tail, 0.0)))
    elif kind is ModelKind.PLN:
        beta, mu, tau = model.values
        z = (lx - mu) / tau
        t2 = (
            beta * lx
            + (-beta * mu + 0.5 * beta**2 * tau**2)
            + log_std_normal_ccdf(z + beta * tau)
        )
        out = std_normal_ccdf(z) - np.exp(t2)
        out = np.clip(out, 0.0, 1.0)
    elif kind is ModelKind.LNP:
        alpha, mu, tau = model.values
        z = (lx - mu) / tau
        t1 = (
            -alpha * lx
            + (alpha * mu + 0.5 * alpha**2 * tau**2)
            + log_std_normal_cdf(z - alpha * tau)
        )
        out = std_normal_ccdf(z) + np.exp(t1)
        out = np.clip(out, 0.0, 1.0)
    elif kind is ModelKind.DPLN:
        alpha, beta, mu, tau = model.values
        z = (lx - mu) / tau
        t1 = (
            -alpha * lx
            + (alpha * mu + 0.5 * alpha**2 * tau**2)
            + log_std_normal_cdf(z - alpha * tau)
        )
        t2 = (
            beta * lx
            + (-beta * mu + 0.5 * beta**2 * tau**2)
            + log_std_normal_ccdf(z + beta * tau)
        )
        out = (
            std_normal_ccdf(z)
            + (beta / (alpha + beta)) * np.exp(t1)
            - (alpha / (alpha + beta)) * np.exp(t2)
        )
        out = np.clip(out, 0.0, 1.0)
    else:  # pragma: no cover
        raise ValueError(f"unknown model kind {kind}")
    return out


def ccdf_points(model: ModelSpec, degrees) -> list:
    """Tail probabilities 1 - cdf at each of a sorted list of degrees.

    The input must be nonempty, strictly increasing and inside the support.
    """
    arr = np.asarray(degrees, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("degrees must be nonempty")
    if np.any(arr <= 0):
        raise ValueError("degrees must be strictly positive")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValueError("degrees must be strictly increasing")
    lo, _ = support(model)
    if arr[0] < lo:
        raise ValueError(f"degree {arr[0]} below support infimum {lo}")
    tails = ccdf(model, arr)
    return list(zip(arr.tolist(), np.atleast_1d(tails).tolist()))


# ---------------------------------------------------------------------------
# Quantiles
# ---------------------------------------------------------------------------

def quantile(model: ModelSpec, q) -> np.ndarray:
    """Inverse cdf at probability q in (0, 1)."""
    q = np.asarray(q, dtype=np.float64)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile levels must lie in (0, 1)")
    scalar = q.ndim == 0
    q = np.atleast_1d(q)
    kind = model.kind
    if kind is ModelKind.POWER_LAW:
        alpha, d0 = model.values
        out = d0 * (1.0 - q) ** (-1.0 / (alpha - 1.0))
    elif kind is ModelKind.LOGNORMAL:
        mu, sigma = model.values
        out = np.exp(mu + sigma * std_normal_quantile(q))
    elif kind is ModelKind.EXPONENTIAL:
        lam, shift = model.values
        out = shift - np.log1p(-q) / lam
    else:
        out = np.array([_quantile_numeric(model, float(v)) for v in q])
    return out[0] if scalar else out


def _quantile_numeric(model: ModelSpec, q: float) -> float:
    lo, _ = support(model)
    a = max(lo, 1e-12)
    if cdf(model, a) >= q:
        # mass below the bracket start is numerically q already
        a = max(lo, 1e-300)
    b = max(2.0 * a, 1.0)
    while cdf(model, b) < q:
        b *= 8.0
        if b > 1e300:
            raise ValueError(f"quantile bracket overflow at q={q}")
    return brentq(lambda t: cdf(model, t) - q, a, b, xtol=1e-12, rtol=1e-13)


# ---------------------------------------------------------------------------
# Sampling.  All samplers are explicit transforms of rng variates so the
# deterministic parts are unit-testable.
# ---------------------------------------------------------------------------

def power_law_from_uniform(u, alpha, d0=1.0):
    """Inverse-ccdf transform: d0 * u^(-1/(alpha-1)) matches f = c x^-alpha."""
    return d0 * np.power(u, -1.0 / (alpha - 1.0))


def exponential_from_uniform(u, lam, shift=0.0):
    """Inverse transform -ln(u)/lam plus support shift."""
    return shift - np.log(u) / lam


def pln_from_variates(x_normal, y_exponential, mu, tau):
    """PLN construction: degree = exp(mu + tau * x - y) with x standard normal
    and y exponential with mean 1/beta."""
    return np.exp(mu + tau * np.asarray(x_normal) - np.asarray(y_exponential))


def sample(model: ModelSpec, n: int, seed) -> DegreeSample:
    """Draw n degrees from the model; bit-reproducible for a fixed seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    kind = model.kind
    if kind is ModelKind.POWER_LAW:
        draws = power_law_from_uniform(rng.random(n), model.alpha, model.d0)
    elif kind is ModelKind.LOGNORMAL:
        draws = np.exp(model.mu + model.sigma * rng.standard_normal(n))
    elif kind is ModelKind.EXPONENTIAL:
        draws = exponential_from_uniform(rng.random(n), model.lam, model.shift)
    elif kind is ModelKind.PARETO_EXP_CUTOFF:
        draws = _sample_pec(model, rng.random(n))
    elif kind is ModelKind.PLN:
        x = rng.standard_normal(n)
        y = rng.exponential(1.0 / model.beta, n)
        draws = pln_from_variates(x, y, model.mu, model.tau)
    elif kind is ModelKind.LNP:
        x = rng.standard_normal(n)
        y = rng.exponential(1.0 / model.alpha, n)
        draws = np.exp(model.mu + model.tau * x + y)
    elif kind is ModelKind.DPLN:
        x = rng.standard_normal(n)
        y1 = rng.exponential(1.0 / model.alpha, n)
        y2 = rng.exponential(1.0 / model.beta, n)
        draws = np.exp(model.mu + model.tau * x + y1 - y2)
    else:  # pragma: no cover
        raise ValueError(f"unknown model kind {kind}")
    return DegreeSample.from_degrees(draws)


def _sample_pec(model: ModelSpec, u: np.ndarray) -> np.ndarray:
    """Invert the exponential-cutoff ccdf at u via the log-tail function."""
    alpha, lam, d0 = model.values
    s = 1.0 - alpha
    log_z = log_gamma_upper(s, lam * d0)
    target = np.log(u) + log_z  # solve logGamma(s, t) = target, t = lam x
    # bracket: expand until the grid covers the smallest target
    t_hi = lam * d0 + 40.0
    while float(log_gamma_upper(s, t_hi)) > target.min():
        t_hi *= 2.0
        if t_hi > 1e280:
            break
    grid = np.geomspace(lam * d0, t_hi, 4097)
    lg = log_gamma_upper(s, grid)
    # lg is strictly decreasing in t; interpolate the inverse
    t = np.interp(-target, -lg, grid)
    # two Newton polish steps: d/dt logGamma(s,t) = -t^(s-1) e^-t / Gamma(s,t)
    for _ in range(2):
        f = log_gamma_upper(s, t) - target
        deriv = -np.exp((s - 1.0) * np.log(t) - t - log_gamma_upper(s, t))
        step = f / deriv
        t = np.clip(t - step, lam * d0, None)
    return t / lam
