"""Undirected simple graphs and the generators the experiments run on.

Graphs live in CSR form (indptr + flat sorted neighbor array) with dense
integer ids, which keeps hundred-million-edge ingestion and component
labeling inside numpy/scipy kernels.  All constructors enforce the simple
undirected invariants: no self-loops, no duplicate neighbors, symmetric
adjacency, degree sum equal to twice the edge count.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .distributions import ModelKind, ModelSpec
from .samples import DegreeSample

CONFIG_MODEL_MAX_ROUNDS = 100
GROWTH_NOISE_SIGMA = 0.5  # log-scale spread of the phase-two edge-count noise


@dataclass
class Graph:
    """Simple undirected graph over dense ids 0..n-1 in CSR layout."""

    n: int
    indptr: np.ndarray = field(repr=False)
    neighbors: np.ndarray = field(repr=False)
    m_edges: int
    meta: dict = field(default_factory=dict, repr=False)

    def degree_array(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.indptr[v] : self.indptr[v + 1]]

    def edge_array(self) -> np.ndarray:
        """Canonical (u < v) edge list, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=self.neighbors.dtype),
                        self.degree_array())
        mask = src < self.neighbors
        return np.column_stack((src[mask], self.neighbors[mask]))


def _graph_from_directed(n: int, src: np.ndarray, dst: np.ndarray,
                         meta=None) -> Graph:
    """Build CSR from directed arcs that already contain both directions."""
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return Graph(
        n=n,
        indptr=indptr,
        neighbors=dst.astype(np.int32 if n < 2**31 else np.int64),
        m_edges=int(src.size // 2),
        meta=meta or {},
    )


def graph_from_edges(n: int, edges: np.ndarray, meta=None) -> Graph:
    """Graph from a canonical (u < v), duplicate-free edge array."""
    if edges.size == 0:
        return _graph_from_directed(
            n, np.empty(0, np.int64), np.empty(0, np.int64), meta
        )
    u, v = edges[:, 0], edges[:, 1]
    return _graph_from_directed(
        n, np.concatenate((u, v)), np.concatenate((v, u)), meta
    )


def validate_graph(g: Graph) -> None:
    """Raise if any simple-undirected invariant is violated."""
    deg = g.degree_array()
    if deg.sum() != 2 * g.m_edges:
        raise ValueError("degree sum does not equal twice the edge count")
    if g.indptr[0] != 0 or g.indptr[-1] != g.neighbors.size:
        raise ValueError("indptr does not cover the neighbor array")
    src = np.repeat(np.arange(g.n), deg)
    if np.any(src == g.neighbors):
        raise ValueError("self-loop present")
    for v in range(g.n):
        nb = g.neighbors_of(v)
        if nb.size > 1 and np.any(np.diff(nb) <= 0):
            raise ValueError(f"neighbors of {v} not strictly increasing")
    # symmetry: the directed arc multiset must equal its own transpose
    fwd = src.astype(np.int64) * g.n + g.neighbors
    rev = g.neighbors.astype(np.int64) * g.n + src
    if not np.array_equal(np.sort(fwd), np.sort(rev)):
        raise ValueError("adjacency is not symmetric")


# ---------------------------------------------------------------------------
# Edge-list IO
# ---------------------------------------------------------------------------

def _parse_error_line(text: str) -> None:
    """Slow rescan to attribute a parse failure to a 1-based line number."""
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ValueError(
                f"malformed edge list at line {i}: expected 2 fields, "
                f"got {len(parts)}: {line!r}"
            )
        for tok in parts:
            try:
                int(tok)
            except ValueError:
                raise ValueError(
                    f"malformed edge list at line {i}: non-integer field "
                    f"{tok!r}"
                ) from None


def load_edge_list(source) -> Graph:
    """Parse whitespace-separated integer pairs (one edge per line) into a
    graph.  '#'-prefixed comment lines are allowed.  Node ids are remapped to
    a dense 0..n-1 range preserving numeric order; duplicate edges and
    self-loops are dropped with a counted warning.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    try:
        frame = pd.read_csv(
            io.BytesIO(data),
            sep=r"\s+",
            header=None,
            comment="#",
            dtype=np.int64,
        )
    except pd.errors.EmptyDataError:
        raise ValueError("empty edge list") from None
    except Exception:
        _parse_error_line(data.decode(errors="replace"))
        raise
    if frame.shape[1] != 2 or frame.isna().any().any():
        _parse_error_line(data.decode(errors="replace"))
        raise ValueError("malformed edge list")
    raw = frame.to_numpy()
    ids = np.unique(raw)
    n = int(ids.size)
    u = np.searchsorted(ids, raw[:, 0])
    v = np.searchsorted(ids, raw[:, 1])
    self_loops = int(np.count_nonzero(u == v))
    keep = u != v
    u, v = u[keep], v[keep]
    a, b = np.minimum(u, v), np.maximum(u, v)
    key = a.astype(np.int64) * n + b
    uniq_key = np.unique(key)
    duplicates = int(key.size - uniq_key.size)
    if self_loops or duplicates:
        warnings.warn(
            f"dropped {self_loops} self-loop(s) and {duplicates} duplicate "
            "edge(s) from the input",
            stacklevel=2,
        )
    edges = np.column_stack((uniq_key // n, uniq_key % n))
    return graph_from_edges(
        n,
        edges,
        meta={
            "original_ids": ids,
            "dropped_self_loops": self_loops,
            "dropped_duplicates": duplicates,
        },
    )


def save_edge_list(g: Graph, path) -> None:
    """Write the canonical (u < v, lexicographic) edge list, one per line."""
    edges = g.edge_array()
    pd.DataFrame(edges).to_csv(path, sep=" ", header=False, index=False)


def degrees(g: Graph) -> DegreeSample:
    """Degree sample of the graph; zero-degree nodes are excluded (model
    support starts at 1) with a counted warning."""
    deg = g.degree_array()
    nz = deg[deg > 0]
    isolated = int(g.n - nz.size)
    if isolated:
        warnings.warn(
            f"excluded {isolated} zero-degree node(s) from the degree sample",
            stacklevel=2,
        )
    return DegreeSample.from_degrees(nz)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def validate_degree_sequence(seq: np.ndarray) -> np.ndarray:
    seq = np.asarray(seq)
    if seq.size == 0:
        raise ValueError("degree sequence is empty")
    if not np.issubdtype(seq.dtype, np.integer):
        if not np.all(seq == np.floor(seq)):
            raise ValueError("degree sequence must be integral")
        seq = seq.astype(np.int64)
    if np.any(seq < 1):
        raise ValueError("every target degree must be at least 1")
    if int(seq.sum()) % 2 != 0:
        raise ValueError(
            "degree sum is odd; adjust one entry (e.g. increment a degree) "
            "to make it even"
        )
    return seq.astype(np.int64)


def configuration_model(seq, seed) -> Graph:
    """Random simple graph realizing a degree sequence by stub matching.

    Stub pairs forming self-loops or duplicate edges are rejected and the
    stubs re-drawn for up to 100 rounds over the residual pool; leftover
    stubs are then discarded.  The realized-vs-target stub deficit lands in
    ``meta`` ("degree_deficit", a fraction of the stub total).
    """
    seq = validate_degree_sequence(seq)
    n = int(seq.size)
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), seq)
    total_stubs = int(stubs.size)

    acc_u = []
    acc_v = []
    accepted_keys = np.empty(0, dtype=np.int64)
    for _ in range(CONFIG_MODEL_MAX_ROUNDS):
        if stubs.size == 0:
            break
        rng.shuffle(stubs)
        u, v = stubs[0::2], stubs[1::2]
        a, b = np.minimum(u, v), np.maximum(u, v)
        key = a * n + b
        ok = u != v
        # within-round duplicates: stable sort groups equal keys in positional
        # order, so every entry after the first in its group is rejected
        dup = np.zeros(key.size, dtype=bool)
        idx = np.flatnonzero(ok)
        if idx.size:
            order = np.argsort(key[idx], kind="stable")
            sorted_keys = key[idx][order]
            later = np.zeros(idx.size, dtype=bool)
            later[1:] = sorted_keys[1:] == sorted_keys[:-1]
            dup[idx[order]] = later
        if accepted_keys.size:
            pos = np.searchsorted(accepted_keys, key)
            pos = np.minimum(pos, accepted_keys.size - 1)
            exists = accepted_keys[pos] == key
        else:
            exists = np.zeros(key.size, dtype=bool)
        good = ok & ~dup & ~exists
        if np.any(good):
            acc_u.append(a[good])
            acc_v.append(b[good])
            accepted_keys = np.sort(np.concatenate((accepted_keys, key[good])))
        bad = ~good
        stubs = np.concatenate((u[bad], v[bad]))

    leftover = int(stubs.size)
    if acc_u:
        edges = np.column_stack((np.concatenate(acc_u), np.concatenate(acc_v)))
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    meta = {
        "target_stubs": total_stubs,
        "discarded_stubs": leftover,
        "degree_deficit": leftover / total_stubs if total_stubs else 0.0,
    }
    return graph_from_edges(n, edges, meta=meta)


def pure_sample_degrees(model: ModelSpec, n: int, seed) -> np.ndarray:
    """Degree sequence drawn by the pure-sample recipes.

    Power law: degree = d0 / u^(1/alpha) with u uniform on (0, 1) -- note the
    exponent here is alpha itself, the recipe's convention, which yields a
    tail heavier than the fitted density by one power.  PLN: degree =
    exp(mu + tau*x - y) with x standard normal and y exponential of mean
    1/beta.  Values are rounded up to integers >= 1 and the sum made even by
    incrementing one uniformly chosen entry.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    if model.kind is ModelKind.POWER_LAW:
        u = rng.random(n)
        draws = model.d0 / np.power(u, 1.0 / model.alpha)
    elif model.kind is ModelKind.PLN:
        x = rng.standard_normal(n)
        y = rng.exponential(1.0 / model.beta, n)
        draws = np.exp(model.mu + model.tau * x - y)
    else:
        raise ValueError(
            "pure-sample generation is defined for the powerlaw and pln "
            f"families, not {model.kind.value}"
        )
    seq = np.maximum(np.ceil(draws), 1.0).astype(np.int64)
    if int(seq.sum()) % 2 != 0:
        j = int(rng.integers(n))
        seq[j] += 1
        warnings.warn(
            f"degree sum was odd; incremented entry {j} to restore parity",
            stacklevel=2,
        )
    return seq


def two_phase_generate(n_target: int, p: float, m_new: int, growth_rate: float,
                       seed) -> Graph:
    """Experimental two-phase growth process.

    Each step either (probability p) adds a node with ``m_new`` edges to
    degree-proportional targets, or (probability 1-p) picks an existing node
    uniformly at random -- growth is degree-independent -- and adds
    ceil(lognormal noise with mean ``growth_rate``) edges from it to
    degree-proportional targets.  Simple-graph invariants are maintained by
    rejection.  Stops once ``n_target`` nodes exist.
    """
    if m_new < 1:
        raise ValueError("m_new must be at least 1")
    if n_target < m_new + 1:
        raise ValueError("n_target must exceed m_new")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    if growth_rate <= 0:
        raise ValueError("growth_rate must be positive")
    rng = np.random.default_rng(seed)

    n_nodes = m_new + 1
    adj = [set() for _ in range(n_nodes)]
    stubs = []
    edges_u, edges_v = [], []

    def add_edge(a, b):
        adj[a].add(b)
        adj[b].add(a)
        stubs.append(a)
        stubs.append(b)
        edges_u.append(min(a, b))
        edges_v.append(max(a, b))

    for a in range(n_nodes):  # seed clique on m_new + 1 nodes
        for b in range(a + 1, n_nodes):
            add_edge(a, b)

    log_noise_mu = math.log(growth_rate) - 0.5 * GROWTH_NOISE_SIGMA**2
    while n_nodes < n_target:
        if rng.random() < p:
            new = n_nodes
            adj.append(set())
            targets = set()
            attempts = 0
            while len(targets) < m_new and attempts < 100 * m_new:
                cand = stubs[int(rng.integers(len(stubs)))]
                attempts += 1
                if cand not in targets:
                    targets.add(cand)
            n_nodes += 1
            for t in sorted(targets):
                add_edge(new, t)
        else:
            u = int(rng.integers(n_nodes))
            count = int(math.ceil(rng.lognormal(log_noise_mu, GROWTH_NOISE_SIGMA)))
            for _ in range(count):
                for _ in range(50):
                    cand = stubs[int(rng.integers(len(stubs)))]
                    if cand != u and cand not in adj[u]:
                        add_edge(u, cand)
                        break

    edges = np.column_stack(
        (np.asarray(edges_u, dtype=np.int64), np.asarray(edges_v, dtype=np.int64))
    )
    return graph_from_edges(n_nodes, edges)


# ---------------------------------------------------------------------------
# Removal and connectivity
# ---------------------------------------------------------------------------

def remove_top_fraction(g: Graph, fraction: float) -> Graph:
    """Drop the ceil(fraction*n) highest-degree nodes (ties broken by lower
    id first) and all incident edges.  The returned graph's ``meta`` maps
    each surviving dense id back to its original id."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction must lie in [0, 1)")
    deg = g.degree_array()
    k = int(math.ceil(fraction * g.n))
    order = np.lexsort((np.arange(g.n), -deg))
    removed = order[:k]
    keep = np.ones(g.n, dtype=bool)
    keep[removed] = False
    remap = np.cumsum(keep) - 1
    src = np.repeat(np.arange(g.n), deg)
    sel = keep[src] & keep[g.neighbors]
    new_src = remap[src[sel]].astype(np.int64)
    new_dst = remap[g.neighbors[sel]].astype(np.int64)
    meta = {
        "original_ids": np.flatnonzero(keep),
        "removed_ids": np.sort(removed),
    }
    return _graph_from_directed(int(keep.sum()), new_src, new_dst, meta=meta)


def largest_component_fraction(g: Graph, n_original: int) -> float:
    """|largest connected component| / n_original via full labeling."""
    if n_original < g.n:
        raise ValueError("n_original must be at least the graph's node count")
    if g.n == 0:
        return 0.0
    if g.m_edges == 0:
        return 1.0 / n_original
    mat = csr_matrix(
        (np.ones(g.neighbors.size, dtype=np.int8), g.neighbors, g.indptr),
        shape=(g.n, g.n),
    )
    _, labels = connected_components(mat, directed=False)
    return float(np.bincount(labels).max() / n_original)
