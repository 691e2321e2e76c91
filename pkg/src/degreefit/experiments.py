"""The three application studies: supernode-removal robustness, influence
maximization under three cascade models, and the link-privacy attack.

Each experiment runs identically on real and synthetic graphs, so the output
curves measure how much the degree-model choice changes application-level
results.  Cascade trials use per-trial derived seed streams; within a trial
the same randomness drives every seed-set size, which makes the influenced
count monotone in seed-set inclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .distributions import ModelKind, ModelSpec, log_pdf
from .fitting import fit_elementary, fit_grid
from .graphs import (
    Graph,
    configuration_model,
    degrees,
    largest_component_fraction,
    pure_sample_degrees,
    remove_top_fraction,
)
from .samples import DegreeSample

LABEL_REAL = "real"
LABEL_SYNTHETIC_PLN = "synthetic-PLN"
LABEL_SYNTHETIC_POWERLAW = "synthetic-PowerLaw"
LABELS = (LABEL_REAL, LABEL_SYNTHETIC_PLN, LABEL_SYNTHETIC_POWERLAW)


class CascadeModel(str, Enum):
    INDEPENDENT_CASCADE = "independent-cascade"
    WEIGHTED_CASCADE = "weighted-cascade"
    LINEAR_THRESHOLD = "linear-threshold"


@dataclass(frozen=True)
class CascadeConfig:
    model: CascadeModel
    trials: int = 100
    seed: int = 0
    seed_node_counts: tuple = (10, 50, 100, 500)
    p: float = 0.01  # independent-cascade transmission probability

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")


@dataclass(frozen=True)
class AttackConfig:
    k: int
    strategy: str = "highest"
    epsilon0_target: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.strategy != "highest":
            raise ValueError("only the 'highest' attack strategy is defined")


@dataclass
class ExperimentResult:
    """One labeled curve: x grid, y values, and standard errors."""

    x_values: list
    y_values: list
    y_stderr: list
    label: str
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not (len(self.x_values) == len(self.y_values) == len(self.y_stderr)):
            raise ValueError("x, y and stderr must have equal lengths")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")


# ---------------------------------------------------------------------------
# Robustness
# ---------------------------------------------------------------------------

def robustness_curve(g: Graph, fractions, label: str = LABEL_REAL) -> ExperimentResult:
    """Largest-component fraction after removing the top-degree share.

    Each fraction removes from the original graph; removal sets are nested,
    so the curve is nonincreasing.
    """
    fr = list(fractions)
    if any(not 0.0 <= f <= 0.2 for f in fr) or fr != sorted(fr):
        raise ValueError("fractions must be sorted ascending within [0, 0.2]")
    ys = [
        largest_component_fraction(remove_top_fraction(g, f), g.n) for f in fr
    ]
    return ExperimentResult(fr, ys, [0.0] * len(fr), label)


# ---------------------------------------------------------------------------
# Influence cascades
# ---------------------------------------------------------------------------

def top_degree_seeds(g: Graph, count: int) -> np.ndarray:
    """The ``count`` highest-degree node ids, ties broken by lower id."""
    if count > g.n:
        raise ValueError("more seeds requested than nodes present")
    order = np.lexsort((np.arange(g.n), -g.degree_array()))
    return order[:count]


def live_arc_spread(g: Graph, seeds: np.ndarray, live: np.ndarray) -> int:
    """Reachable-set size from seeds over the live directed arcs.

    ``live`` flags each directed arc (positionally aligned with the CSR
    neighbor array).  Pre-flipping arc liveness is equivalent to giving each
    newly active node one activation chance per neighbor.
    """
    active = np.zeros(g.n, dtype=bool)
    active[seeds] = True
    frontier = seeds
    deg = g.degree_array()
    while frontier.size:
        starts = g.indptr[frontier]
        counts = deg[frontier]
        idx = np.repeat(starts, counts) + _ragged_offsets(counts)
        idx = idx[live[idx]]
        targets = g.neighbors[idx]
        targets = targets[~active[targets]]
        if targets.size == 0:
            break
        frontier = np.unique(targets)
        active[frontier] = True
    return int(np.count_nonzero(active))


def _ragged_offsets(counts: np.ndarray) -> np.ndarray:
    """[0..c0-1, 0..c1-1, ...] for stacking ragged CSR slices."""
    if counts.size == 0:
        return np.empty(0, dtype=np.int64)
    total = int(counts.sum())
    out = np.ones(total, dtype=np.int64)
    out[0] = 0
    ends = np.cumsum(counts)[:-1]
    out[ends] = 1 - counts[:-1]
    return np.cumsum(out)


def independent_cascade_live_arcs(g: Graph, p: float, rng) -> np.ndarray:
    """Bernoulli(p) liveness for every directed arc."""
    return rng.random(g.neighbors.size) < p


def weighted_cascade_live_arcs(g: Graph, rng) -> np.ndarray:
    """Arc u->v live with probability 1/degree(v)."""
    deg = g.degree_array()
    return rng.random(g.neighbors.size) * deg[g.neighbors] < 1.0


def linear_threshold_spread(g: Graph, seeds: np.ndarray,
                            thresholds: np.ndarray) -> int:
    """Threshold cascade: node v activates once the active fraction of its
    neighbors (uniform weights 1/degree) reaches thresholds[v]."""
    deg = g.degree_array()
    active = np.zeros(g.n, dtype=bool)
    active[seeds] = True
    needed = thresholds * deg  # active-neighbor count required
    counts = np.zeros(g.n, dtype=np.int64)
    frontier = seeds
    while frontier.size:
        starts = g.indptr[frontier]
        idx = np.repeat(starts, deg[frontier]) + _ragged_offsets(deg[frontier])
        touched = g.neighbors[idx]
        counts += np.bincount(touched, minlength=g.n)
        candidates = np.unique(touched)
        candidates = candidates[~active[candidates]]
        newly = candidates[counts[candidates] >= needed[candidates]]
        active[newly] = True
        frontier = newly
    return int(np.count_nonzero(active))


def influence_curve(g: Graph, cfg: CascadeConfig,
                    label: str = LABEL_REAL) -> ExperimentResult:
    """Mean influenced count per seed-set size, degree-ranked seeding."""
    seed_counts = sorted(cfg.seed_node_counts)
    if not seed_counts:
        raise ValueError("seed_node_counts must be nonempty")
    all_seeds = top_degree_seeds(g, max(seed_counts))
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    spreads = np.empty((cfg.trials, len(seed_counts)))
    for t, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        if cfg.model is CascadeModel.INDEPENDENT_CASCADE:
            live = independent_cascade_live_arcs(g, cfg.p, rng)
            runner = lambda s: live_arc_spread(g, s, live)
        elif cfg.model is CascadeModel.WEIGHTED_CASCADE:
            live = weighted_cascade_live_arcs(g, rng)
            runner = lambda s: live_arc_spread(g, s, live)
        else:
            thresholds = rng.random(g.n)
            runner = lambda s: linear_threshold_spread(g, s, thresholds)
        for j, count in enumerate(seed_counts):
            spreads[t, j] = runner(all_seeds[:count])
    means = spreads.mean(axis=0)
    stderr = spreads.std(axis=0, ddof=1) / math.sqrt(cfg.trials) if cfg.trials > 1 \
        else np.zeros(len(seed_counts))
    return ExperimentResult(
        list(seed_counts), means.tolist(), stderr.tolist(), label
    )


# ---------------------------------------------------------------------------
# Link-privacy attack
# ---------------------------------------------------------------------------

def _attack_pmf_from_graph(g: Graph):
    deg = g.degree_array()
    deg = deg[deg > 0]
    values, counts = np.unique(deg, return_counts=True)
    return values.astype(np.float64), counts / counts.sum()


def _attack_pmf_from_model(model: ModelSpec, d0: int, k_max: int):
    values = np.arange(int(d0), int(k_max) + 1, dtype=np.float64)
    weights = np.exp(log_pdf(model, values))
    total = weights.sum()
    if total <= 0:
        raise ValueError("model density vanishes on the integer degree range")
    return values, weights / total


def privacy_attack(source, cfg: AttackConfig,
                   label: str = LABEL_REAL) -> ExperimentResult:
    """Expected disclosed-node counts for attacks of growing size.

    For each k in 0..cfg.k the attack holds the k highest degrees
    (D = their sum) and the remaining-coverage mass is

        eps(D) = sum_{x=d0}^{k_max} exp(-x D / (2m)) f(x)

    with f the degree pmf (empirical from a graph, or a model density
    renormalized over the integer range so eps(0) = 1 exactly).  Disclosed
    nodes are N (1 - eps); the unquantified vanishing correction of the
    source bound is dropped, so values are asymptotic estimates.  Here m is
    the undirected edge count, so 2m is the degree sum.
    """
    if isinstance(source, Graph):
        g = source
        n = g.n
        deg = np.sort(g.degree_array())[::-1]
        two_m = float(deg.sum())
        values, pmf = _attack_pmf_from_graph(g)
        if cfg.k > n:
            raise ValueError("k exceeds the node count")
    else:
        model, n, d0, m_edges, k_max = source
        values, pmf = _attack_pmf_from_model(model, d0, k_max)
        two_m = 2.0 * float(m_edges)
        # model mode attacks the heaviest admissible degrees
        deg = np.full(cfg.k, float(k_max))
    ks = np.arange(0, cfg.k + 1)
    d_sums = np.concatenate(([0.0], np.cumsum(deg[: cfg.k].astype(np.float64))))
    eps = np.exp(-np.outer(values, d_sums) / two_m).T @ pmf
    disclosed = n * (1.0 - eps)
    meta = {"epsilon": eps.tolist(), "two_m": two_m}
    if cfg.epsilon0_target is not None:
        needed = -math.log(cfg.epsilon0_target) * two_m / values[0]
        reached = np.flatnonzero(d_sums >= needed)
        meta["d_required_for_epsilon0"] = needed
        meta["k_reaching_epsilon0"] = int(reached[0]) if reached.size else None
    return ExperimentResult(
        ks.tolist(), disclosed.tolist(), [0.0] * ks.size, label, meta=meta
    )


# ---------------------------------------------------------------------------
# Real-vs-synthetic comparison
# ---------------------------------------------------------------------------

def synthesize_pair(real: Graph, seed: int, grid=None):
    """Fit power law + PLN to the real degrees and build matched-size
    configuration-model graphs from each fitted model."""
    sample = degrees(real)
    pl_fit = fit_elementary(sample, ModelKind.POWER_LAW)
    pln_fit = fit_grid(sample, ModelKind.PLN, grid)
    rng = np.random.SeedSequence(seed)
    s1, s2, s3, s4 = rng.spawn(4)
    g_pln = configuration_model(
        pure_sample_degrees(pln_fit.model, real.n, s1), s2
    )
    g_pl = configuration_model(
        pure_sample_degrees(pl_fit.model, real.n, s3), s4
    )
    return g_pln, g_pl, pln_fit, pl_fit


def compare_models(real: Graph, experiment: str, *, seed: int = 0,
                   fractions=(0.0, 0.03, 0.05, 0.1, 0.15, 0.2),
                   cascade: CascadeConfig | None = None,
                   attack: AttackConfig | None = None,
                   grid=None) -> list:
    """Run one experiment on the real graph and its two synthetic doubles.

    Returns three labeled curves sharing the x grid and the experiment seed.
    """
    g_pln, g_pl, _, _ = synthesize_pair(real, seed, grid)
    triples = (
        (real, LABEL_REAL),
        (g_pln, LABEL_SYNTHETIC_PLN),
        (g_pl, LABEL_SYNTHETIC_POWERLAW),
    )
    results = []
    for g, label in triples:
        if experiment == "robustness":
            results.append(robustness_curve(g, fractions, label))
        elif experiment == "influence":
            cfg = cascade or CascadeConfig(CascadeModel.INDEPENDENT_CASCADE)
            results.append(influence_curve(g, cfg, label))
        elif experiment == "privacy":
            cfg = attack or AttackConfig(k=min(100, g.n))
            results.append(privacy_attack(g, cfg, label))
        else:
            raise ValueError(f"unknown experiment {experiment!r}")
    return results
