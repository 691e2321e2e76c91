"""Parameter estimation and goodness-of-fit scoring.

Elementary families (power law, lognormal, exponential) use closed-form
continuous MLEs anchored at the sample minimum.  The composite families run
a moment-seeded grid search minimizing the reverse log-likelihood: an outer
log-spaced grid over each Pareto exponent, an inner local grid over the
lognormal body seeded by the log-moment identities, and two refinement
rounds shrinking the local ranges fourfold around the incumbent.

Every report carries the three scores of the model comparison: the minimized
reverse log-likelihood, AIC = 2k + 2*rll, and the residual sum of squares
between the empirical pmf and the fitted density at the observed degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    FREE_PARAM_COUNT,
    ModelKind,
    ModelSpec,
    _pec_log_norm,
    ccdf,
    log_pdf,
    quantile,
)
from .samples import DegreeSample
from .special import log_std_normal_cdf, log_std_normal_ccdf

ELEMENTARY_KINDS = (ModelKind.POWER_LAW, ModelKind.LOGNORMAL, ModelKind.EXPONENTIAL)
GRID_KINDS = (
    ModelKind.PARETO_EXP_CUTOFF,
    ModelKind.LNP,
    ModelKind.PLN,
    ModelKind.DPLN,
)


@dataclass(frozen=True)
class GridConfig:
    """Grid-search protocol constants (reproducible artifact choices)."""

    exponent_min: float = 0.05
    exponent_max: float = 10.0
    exponent_points: int = 64
    local_points: int = 21
    local_span: float = 0.5
    refine_rounds: int = 2
    refine_shrink: float = 4.0
    tau_floor: float = 1e-3
    rate_span_decades: float = 2.0
    compress_points: int = 2048
    dpln_shortlist: int = 8

    def __post_init__(self):
        if not (0 < self.exponent_min < self.exponent_max):
            raise ValueError("exponent range must be positive and increasing")
        if self.exponent_points < 2 or self.local_points < 3:
            raise ValueError("grid must have at least 2x3 points")


@dataclass
class FitReport:
    """Fitted model plus its three goodness-of-fit scores.

    ``k`` counts only the free parameters (data-determined anchors such as
    d0 excluded), so aic == 2*k + 2*reverse_log_likelihood holds exactly.
    """

    model: ModelSpec
    reverse_log_likelihood: float
    aic: float
    rss: float
    k: int
    degenerate: bool = False
    beta_profile: np.ndarray | None = field(default=None, repr=False)
    refine_objectives: tuple = field(default=(), repr=False)

    def to_row(self) -> dict:
        row = {
            "model": self.model.kind.value,
            "params": ";".join(
                f"{name}={value!r}" for name, value in self.model.param_dict.items()
            ),
            "k": self.k,
            "reverse_log_likelihood": self.reverse_log_likelihood,
            "aic": self.aic,
            "rss": self.rss,
        }
        return row


def aic(reverse_log_likelihood: float, k: int) -> float:
    """Akaike information criterion from the minimized -log L."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2.0 * k + 2.0 * reverse_log_likelihood


def reverse_log_likelihood(model: ModelSpec, sample: DegreeSample) -> float:
    """-sum_i ln pdf(model, d_i); +inf when any point has zero density."""
    lp = log_pdf(model, sample.unique_degrees)
    if not np.all(np.isfinite(lp)):
        return math.inf
    return float(-np.dot(sample.unique_counts, lp))


def pln_reverse_log_likelihood(
    beta: float, mu: float, tau: float, sample: DegreeSample
) -> float:
    """The PLN objective through its sum decomposition:

    -[n ln(beta) + (beta-1) sum ln x + n(-beta mu + beta^2 tau^2/2)
      + sum ln Phi_c((ln x - mu + beta tau^2)/tau)]

    Equal to reverse_log_likelihood on the equivalent ModelSpec; kept as an
    independent route for consistency checks and used by the grid search.
    """
    lx = np.log(sample.unique_degrees)
    w = sample.unique_counts
    n = sample.n
    a0 = -beta * mu + 0.5 * beta * beta * tau * tau
    tail = float(np.dot(w, log_std_normal_ccdf((lx - mu + beta * tau * tau) / tau)))
    return -(n * math.log(beta) + (beta - 1.0) * sample.log_sum + n * a0 + tail)


def rss(model: ModelSpec, sample: DegreeSample, on: str = "pdf") -> float:
    """Residual sum of squares at the unique observed degrees.

    ``on="pdf"`` (default) compares the empirical pmf against the fitted
    density; ``on="ccdf"`` compares empirical P(X >= x) against the model
    tail, exposed as an alternative convention.
    """
    x = sample.unique_degrees
    if on == "pdf":
        emp = sample.empirical_pmf()
        fitted = np.exp(log_pdf(model, x))
    elif on == "ccdf":
        emp = sample.empirical_ccdf()
        fitted = ccdf(model, x)
    else:
        raise ValueError(f"unknown rss domain {on!r}")
    return float(np.sum((emp - fitted) ** 2))


def qq_points(model: ModelSpec, sample: DegreeSample, n_quantiles: int) -> list:
    """(model quantile, empirical quantile) pairs at levels i/(n_quantiles+1).

    Model quantiles invert the model cdf; empirical quantiles are ascending
    order statistics.  A perfect fit puts the points on the identity line.
    """
    if n_quantiles < 2:
        raise ValueError("need at least 2 quantile levels")
    q = np.arange(1, n_quantiles + 1) / (n_quantiles + 1.0)
    model_q = np.atleast_1d(quantile(model, q))
    emp_q = np.array([sample.order_quantile(v) for v in q])
    return list(zip(model_q.tolist(), emp_q.tolist()))


def _scored_report(model, sample, degenerate=False, beta_profile=None,
                   refine_objectives=()):
    rll = reverse_log_likelihood(model, sample)
    k = FREE_PARAM_COUNT[model.kind]
    return FitReport(
        model=model,
        reverse_log_likelihood=rll,
        aic=aic(rll, k),
        rss=rss(model, sample),
        k=k,
        degenerate=degenerate,
        beta_profile=beta_profile,
        refine_objectives=tuple(refine_objectives),
    )


# ---------------------------------------------------------------------------
# Elementary fits (closed-form MLE, minimum degree taken from the data)
# ---------------------------------------------------------------------------

def fit_elementary(sample: DegreeSample, kind: ModelKind, d0=None) -> FitReport:
    """Closed-form continuous MLE for power law, lognormal or exponential.

    ``d0`` overrides the power-law support anchor (defaults to the sample
    minimum).  Degenerate samples (all degrees equal) produce a flagged
    report with the spread parameter at the configured floor.
    """
    if kind not in ELEMENTARY_KINDS:
        raise ValueError(f"{kind} is not an elementary family")
    if sample.n < 2:
        raise ValueError("fitting requires at least 2 degrees")
    floor = GridConfig().tau_floor
    degenerate = False

    if kind is ModelKind.POWER_LAW:
        anchor = sample.d0 if d0 is None else float(d0)
        mean_log_ratio = sample.log_mean - math.log(anchor)
        if mean_log_ratio < floor:
            mean_log_ratio = floor
            degenerate = True
        model = ModelSpec.power_law(1.0 + 1.0 / mean_log_ratio, anchor)
    elif kind is ModelKind.LOGNORMAL:
        sigma = math.sqrt(sample.log_var)
        if sigma < floor:
            sigma = floor
            degenerate = True
        model = ModelSpec.lognormal(sample.log_mean, sigma)
    else:
        # support begins at the sample minimum: shift = max(d0 - 1, 0), so on
        # integer degree data lam = 1/(mean - d0 + 1) exactly
        shift = max(sample.d0 - 1.0, 0.0)
        model = ModelSpec.exponential(1.0 / (sample.mean - shift), shift)
    return _scored_report(model, sample, degenerate=degenerate)


# ---------------------------------------------------------------------------
# Grid fits
# ---------------------------------------------------------------------------

def _compressed_support(sample: DegreeSample, max_points: int):
    """Weighted log-degree support points for the grid objective.

    Exact when the sample has at most ``max_points`` distinct values (the
    usual case for integer degrees); otherwise equal-count bins represented
    by their mean log-degree.  Final reports are always rescored exactly.
    """
    uniq = sample.unique_degrees
    if uniq.size <= max_points:
        return np.log(uniq), sample.unique_counts.astype(np.float64)
    logs = np.log(sample.degrees)
    cum = np.concatenate(([0.0], np.cumsum(logs)))
    idx = np.unique(np.linspace(0, sample.n, max_points + 1).astype(np.int64))
    weights = np.diff(idx).astype(np.float64)
    log_points = np.diff(cum[idx]) / weights
    return log_points, weights


def _local_axes(center_mu, center_tau, hw_mu, hw_tau, cfg):
    mus = np.linspace(center_mu - hw_mu, center_mu + hw_mu, cfg.local_points)
    taus = np.linspace(center_tau - hw_tau, center_tau + hw_tau, cfg.local_points)
    taus = np.maximum(taus, cfg.tau_floor)
    return mus, taus


def _body_objective(kind, exponents, lx, w, n, log_sum, mus, taus):
    """Reverse log-likelihood over a (tau, mu) grid at fixed exponent(s).

    Returns an array (n_tau, n_mu) laid out so that flat argmin order breaks
    ties toward the smallest tau, then the smallest mu.
    """
    mu = mus[None, :, None]
    tau = taus[:, None, None]
    pts = lx[None, None, :]
    if kind is ModelKind.PLN:
        beta = exponents
        tail = log_std_normal_ccdf((pts - mu + beta * tau * tau) / tau)
        const = n * math.log(beta) + (beta - 1.0) * log_sum
        bulk = n * (-beta * mu[:, :, 0] + 0.5 * beta * beta * tau[:, :, 0] ** 2)
    else:
        alpha = exponents
        tail = log_std_normal_cdf((pts - mu - alpha * tau * tau) / tau)
        const = n * math.log(alpha) + (-alpha - 1.0) * log_sum
        bulk = n * (alpha * mu[:, :, 0] + 0.5 * alpha * alpha * tau[:, :, 0] ** 2)
    return -(const + bulk + tail @ w)


def _dpln_objective(alpha, beta, lx, w, n, mus, taus):
    mu = mus[None, :, None]
    tau = taus[:, None, None]
    pts = lx[None, None, :]
    t1 = (
        (-alpha - 1.0) * pts
        + (alpha * mu + 0.5 * alpha * alpha * tau * tau)
        + log_std_normal_cdf((pts - mu - alpha * tau * tau) / tau)
    )
    t2 = (
        (beta - 1.0) * pts
        + (-beta * mu + 0.5 * beta * beta * tau * tau)
        + log_std_normal_ccdf((pts - mu + beta * tau * tau) / tau)
    )
    return -(n * math.log(alpha * beta / (alpha + beta)) + np.logaddexp(t1, t2) @ w)


def _moment_seed(kind, exponents, sample, cfg):
    """Log-moment initialization (mu0, tau0) for the lognormal body."""
    if kind is ModelKind.PLN:
        inv = 1.0 / exponents[0]
        mu0 = sample.log_mean + inv
        var0 = sample.log_var - inv * inv
    elif kind is ModelKind.LNP:
        inv = 1.0 / exponents[0]
        mu0 = sample.log_mean - inv
        var0 = sample.log_var - inv * inv
    else:  # DPLN
        inv_a, inv_b = 1.0 / exponents[0], 1.0 / exponents[1]
        mu0 = sample.log_mean - inv_a + inv_b
        var0 = sample.log_var - inv_a * inv_a - inv_b * inv_b
    tau0 = math.sqrt(max(var0, cfg.tau_floor**2))
    return mu0, tau0


def _search_body(kind, exponents, sample, lx, w, cfg):
    """Staged local search over (mu, tau) at fixed exponent(s).

    Returns (best objective, best mu, best tau, per-stage bests).
    """
    n, log_sum = sample.n, sample.log_sum
    mu0, tau0 = _moment_seed(kind, exponents, sample, cfg)
    hw_mu = cfg.local_span * max(abs(mu0), tau0)
    hw_tau = cfg.local_span * tau0
    center_mu, center_tau = mu0, tau0
    best = (math.inf, mu0, tau0)
    stage_bests = []
    for _ in range(cfg.refine_rounds + 1):
        mus, taus = _local_axes(center_mu, center_tau, hw_mu, hw_tau, cfg)
        if kind is ModelKind.DPLN:
            obj = _dpln_objective(exponents[0], exponents[1], lx, w, n, mus, taus)
        else:
            obj = _body_objective(kind, exponents[0], lx, w, n, log_sum, mus, taus)
        obj = np.where(np.isnan(obj), math.inf, obj)
        flat = int(np.argmin(obj))
        i_tau, i_mu = divmod(flat, mus.size)
        stage_best = float(obj[i_tau, i_mu])
        if stage_best < best[0]:
            best = (stage_best, float(mus[i_mu]), float(taus[i_tau]))
        stage_bests.append(best[0])
        center_mu, center_tau = best[1], best[2]
        hw_mu /= cfg.refine_shrink
        hw_tau /= cfg.refine_shrink
    return best[0], best[1], best[2], stage_bests


def _fit_body_family(sample, kind, cfg, lx, w):
    exponents = np.geomspace(cfg.exponent_min, cfg.exponent_max, cfg.exponent_points)
    profile = np.empty((exponents.size, 2))
    best = None
    for j, ex in enumerate(exponents):
        obj, mu, tau, stages = _search_body(kind, (ex,), sample, lx, w, cfg)
        profile[j] = (ex, obj)
        if best is None or obj < best[0]:
            best = (obj, ex, mu, tau, stages)
    if best is None or not math.isfinite(best[0]):
        raise RuntimeError(
            f"{kind.value} objective non-finite over the whole exponent grid "
            f"[{cfg.exponent_min}, {cfg.exponent_max}]"
        )
    _, ex, mu, tau, stages = best
    if kind is ModelKind.PLN:
        model = ModelSpec.pln(ex, mu, tau)
    else:
        model = ModelSpec.lnp(ex, mu, tau)
    return model, profile, stages


def _fit_dpln(sample, cfg, lx, w):
    exponents = np.geomspace(cfg.exponent_min, cfg.exponent_max, cfg.exponent_points)
    n = sample.n
    # stage A: score every (alpha, beta) pair at its moment seed only
    seeds = []
    for beta in exponents:
        for alpha in exponents:
            mu0, tau0 = _moment_seed(ModelKind.DPLN, (alpha, beta), sample, cfg)
            seeds.append((beta, alpha, mu0, tau0))
    arr = np.array(seeds)
    obj0 = np.empty(arr.shape[0])
    chunk = 256
    for lo in range(0, arr.shape[0], chunk):
        hi = min(lo + chunk, arr.shape[0])
        b, a = arr[lo:hi, 0:1], arr[lo:hi, 1:2]
        mu, tau = arr[lo:hi, 2:3], arr[lo:hi, 3:4]
        t1 = (
            (-a - 1.0) * lx[None, :]
            + (a * mu + 0.5 * a * a * tau * tau)
            + log_std_normal_cdf((lx[None, :] - mu - a * tau * tau) / tau)
        )
        t2 = (
            (b - 1.0) * lx[None, :]
            + (-b * mu + 0.5 * b * b * tau * tau)
            + log_std_normal_ccdf((lx[None, :] - mu + b * tau * tau) / tau)
        )
        const = n * np.log(a * b / (a + b))[:, 0]
        obj0[lo:hi] = -(const + np.logaddexp(t1, t2) @ w)
    obj0 = np.where(np.isnan(obj0), math.inf, obj0)
    profile = np.column_stack(
        (exponents, obj0.reshape(exponents.size, exponents.size).min(axis=1))
    )
    # stage B: full staged local search on the shortlisted exponent pairs
    order = np.argsort(obj0, kind="stable")[: cfg.dpln_shortlist]
    best = None
    for idx in sorted(order.tolist()):
        beta, alpha = arr[idx, 0], arr[idx, 1]
        obj, mu, tau, stages = _search_body(
            ModelKind.DPLN, (alpha, beta), sample, lx, w, cfg
        )
        if best is None or obj < best[0]:
            best = (obj, alpha, beta, mu, tau, stages)
    if best is None or not math.isfinite(best[0]):
        raise RuntimeError(
            "dpln objective non-finite over the whole exponent grid "
            f"[{cfg.exponent_min}, {cfg.exponent_max}]^2"
        )
    _, alpha, beta, mu, tau, stages = best
    return ModelSpec.dpln(alpha, beta, mu, tau), profile, stages


def _fit_pareto_exp_cutoff(sample, cfg):
    exponents = np.geomspace(cfg.exponent_min, cfg.exponent_max, cfg.exponent_points)
    n, d0 = sample.n, sample.d0
    log_sum = sample.log_sum
    total = float(sample.degrees.sum())
    rate0 = 1.0 / (sample.mean - max(d0 - 1.0, 0.0))
    profile = np.empty((exponents.size, 2))
    best = None
    for j, alpha in enumerate(exponents):
        lo = math.log10(rate0) - cfg.rate_span_decades
        hi = math.log10(rate0) + cfg.rate_span_decades
        local = (math.inf, rate0)
        stages = []
        for _ in range(cfg.refine_rounds + 1):
            rates = np.logspace(lo, hi, cfg.local_points)
            obj = np.array(
                [
                    n * _pec_log_norm(float(alpha), float(r), d0)
                    + alpha * log_sum
                    + r * total
                    for r in rates
                ]
            )
            obj = np.where(np.isnan(obj), math.inf, obj)
            i = int(np.argmin(obj))
            if obj[i] < local[0]:
                local = (float(obj[i]), float(rates[i]))
            stages.append(local[0])
            width = (hi - lo) / cfg.refine_shrink
            lo = math.log10(local[1]) - width / 2.0
            hi = math.log10(local[1]) + width / 2.0
        profile[j] = (alpha, local[0])
        if best is None or local[0] < best[0]:
            best = (local[0], float(alpha), local[1], stages)
    if best is None or not math.isfinite(best[0]):
        raise RuntimeError(
            "pareto-exp-cutoff objective non-finite over the whole grid "
            f"alpha in [{cfg.exponent_min}, {cfg.exponent_max}]"
        )
    _, alpha, rate, stages = best
    return ModelSpec.pareto_exp_cutoff(alpha, rate, d0), profile, stages


def fit_grid(sample: DegreeSample, kind: ModelKind, grid: GridConfig | None = None) -> FitReport:
    """Grid-search fit for the cutoff and Pareto-lognormal composite families.

    The returned report's ``beta_profile`` records (exponent, best objective)
    along the outer exponent axis; ``refine_objectives`` records the winning
    cell's per-stage bests (nonincreasing by construction).
    """
    if kind not in GRID_KINDS:
        raise ValueError(f"{kind} is not a grid-fitted family")
    if sample.n < 2:
        raise ValueError("fitting requires at least 2 degrees")
    cfg = grid or GridConfig()
    lx, w = _compressed_support(sample, cfg.compress_points)
    if kind is ModelKind.PARETO_EXP_CUTOFF:
        model, profile, stages = _fit_pareto_exp_cutoff(sample, cfg)
    elif kind is ModelKind.DPLN:
        model, profile, stages = _fit_dpln(sample, cfg, lx, w)
    else:
        model, profile, stages = _fit_body_family(sample, kind, cfg, lx, w)
    return _scored_report(
        model, sample, beta_profile=profile, refine_objectives=stages
    )


def fit_model(sample: DegreeSample, kind: ModelKind, grid: GridConfig | None = None) -> FitReport:
    """Fit one family, dispatching to the closed-form or grid estimator."""
    if kind in ELEMENTARY_KINDS:
        return fit_elementary(sample, kind)
    return fit_grid(sample, kind, grid)


def fit_models(sample: DegreeSample, kinds=None, grid: GridConfig | None = None) -> list:
    """Fit several families and return their reports in the given order."""
    kinds = list(ModelKind) if kinds is None else list(kinds)
    return [fit_model(sample, kind, grid) for kind in kinds]
