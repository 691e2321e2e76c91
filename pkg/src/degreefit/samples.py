"""Degree samples: the multiset of observed degrees plus derived statistics.

A sample is the substrate for fitting and tail analysis.  Degrees coming from
graphs are positive integers; self-generated validation samples from the
continuous families keep their real values, so the container accepts any
strictly positive degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DegreeSample:
    """Sorted degree multiset with the statistics fitting relies on.

    Attributes:
        degrees: sorted ascending copy of the observed degrees.
        n: sample size.
        d0: minimum degree.
        d_max: maximum degree.
        log_mean: mean of ln(degree); the "nu" of the tail-divergence ratio.
        log_var: population variance of ln(degree).
        unique_degrees: sorted distinct degree values.
        unique_counts: multiplicity of each distinct value.
    """

    degrees: np.ndarray
    n: int
    d0: float
    d_max: float
    log_mean: float
    log_var: float
    unique_degrees: np.ndarray = field(repr=False)
    unique_counts: np.ndarray = field(repr=False)

    @classmethod
    def from_degrees(cls, values) -> "DegreeSample":
        arr = np.asarray(values, dtype=np.float64).ravel()
        if arr.size < 1:
            raise ValueError("need at least one degree")
        if not np.all(np.isfinite(arr)):
            raise ValueError("degrees must be finite")
        if not np.all(arr > 0):
            raise ValueError("degrees must be strictly positive")
        arr = np.sort(arr)
        logs = np.log(arr)
        uniq, counts = np.unique(arr, return_counts=True)
        return cls(
            degrees=arr,
            n=int(arr.size),
            d0=float(arr[0]),
            d_max=float(arr[-1]),
            log_mean=float(logs.mean()),
            log_var=float(logs.var()),
            unique_degrees=uniq,
            unique_counts=counts,
        )

    @property
    def mean(self) -> float:
        return float(self.degrees.mean())

    @property
    def log_sum(self) -> float:
        return self.log_mean * self.n

    def empirical_pmf(self) -> np.ndarray:
        """Relative frequency of each unique degree (sums to 1)."""
        return self.unique_counts / self.n

    def empirical_ccdf(self) -> np.ndarray:
        """P(X >= x) at each unique degree; starts at 1."""
        below = np.concatenate(([0], np.cumsum(self.unique_counts)[:-1]))
        return 1.0 - below / self.n

    def order_quantile(self, q: float) -> float:
        """The ceil(q*n)-th ascending order statistic, q in (0, 1]."""
        if not 0.0 < q <= 1.0:
            raise ValueError(f"quantile level must be in (0, 1], got {q}")
        k = int(np.ceil(q * self.n))
        k = min(max(k, 1), self.n)
        return float(self.degrees[k - 1])
