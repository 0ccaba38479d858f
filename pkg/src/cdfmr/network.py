"""Topology, link budget and modulation parameter types.

All SNRs here are linear. Budgets for the Friis placements normalise the
source-destination distance to 1, so only the direct-link SNR and the path
loss exponent enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .special import BINOM_MAX_N


@dataclass(frozen=True)
class ClusterTopology:
    """Relay counts per cluster, ``[L_1, ..., L_N]``; there are N+1 hops."""

    cluster_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.cluster_sizes)
        if not sizes:
            raise ValueError("topology needs at least one relay cluster")
        for s, raw in zip(sizes, self.cluster_sizes):
            if s != raw or not 1 <= s <= BINOM_MAX_N:
                raise ValueError(f"cluster sizes must be integers in [1, {BINOM_MAX_N}], got {raw!r}")
        object.__setattr__(self, "cluster_sizes", sizes)

    @classmethod
    def of(cls, *sizes: int) -> ClusterTopology:
        return cls(tuple(sizes))

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_sizes)

    @property
    def n_hops(self) -> int:
        return len(self.cluster_sizes) + 1

    @property
    def min_size(self) -> int:
        """L_m, the smallest cluster; sets the diversity order."""
        return min(self.cluster_sizes)

    @property
    def min_index_set(self) -> tuple[int, ...]:
        """Zero-based indices of the clusters whose size equals L_m."""
        lm = self.min_size
        return tuple(i for i, s in enumerate(self.cluster_sizes) if s == lm)

    @property
    def total_relays(self) -> int:
        return sum(self.cluster_sizes)

    def __str__(self):
        return "[" + ",".join(map(str, self.cluster_sizes)) + "]"


@dataclass(frozen=True)
class LinkBudget:
    """Mean SNR per hop ``[Gamma_1, ..., Gamma_{N+1}]`` plus the direct link."""

    hop_avg_snr: tuple[float, ...]
    direct_avg_snr: float = 1.0

    def __post_init__(self):
        hops = tuple(float(g) for g in self.hop_avg_snr)
        if len(hops) < 2:
            raise ValueError("a link budget needs at least two hops")
        for g in (*hops, float(self.direct_avg_snr)):
            if not (g > 0.0 and math.isfinite(g)):
                raise ValueError(f"average SNRs must be positive and finite, got {g!r}")
        object.__setattr__(self, "hop_avg_snr", hops)
        object.__setattr__(self, "direct_avg_snr", float(self.direct_avg_snr))

    @property
    def n_hops(self) -> int:
        return len(self.hop_avg_snr)

    def check(self, topology: ClusterTopology) -> None:
        if self.n_hops != topology.n_hops:
            raise ValueError(
                f"budget has {self.n_hops} hops but topology {topology} needs {topology.n_hops}"
            )


def effective_gammas(topology: ClusterTopology, budget: LinkBudget) -> tuple[float, ...]:
    """Per-cluster mean SNRs as seen by the order statistics.

    Identical to the hop means except the last cluster, whose two hops combine
    harmonically: Gamma_N Gamma_{N+1} / (Gamma_N + Gamma_{N+1}).
    """
    budget.check(topology)
    g = budget.hop_avg_snr
    last = g[-2] * g[-1] / (g[-2] + g[-1])
    return (*g[:-2], last)


def _check_friis_args(n_clusters: int, delta: float, gamma_d: float) -> None:
    if int(n_clusters) != n_clusters or n_clusters < 1:
        raise ValueError(f"n_clusters must be a positive integer, got {n_clusters!r}")
    if not (delta >= 0.0 and math.isfinite(delta)):
        raise ValueError(f"path loss exponent must be finite and nonnegative, got {delta!r}")
    if not (gamma_d > 0.0 and math.isfinite(gamma_d)):
        raise ValueError(f"direct-link SNR must be positive and finite, got {gamma_d!r}")


def unbalanced_budget(n_clusters: int, delta: float, gamma_d: float) -> LinkBudget:
    """Terminal k sits 2k/((N+1)(N+2)) from its predecessor; hops get weaker with k."""
    _check_friis_args(n_clusters, delta, gamma_d)
    n = n_clusters
    span = (n + 1) * (n + 2) / 2.0
    hops = tuple((span / k) ** delta * gamma_d for k in range(1, n + 2))
    return LinkBudget(hops, gamma_d)


def balanced_budget(n_clusters: int, delta: float, gamma_d: float) -> LinkBudget:
    """Equidistant terminals: every hop has mean SNR (N+1)^delta * gamma_d."""
    _check_friis_args(n_clusters, delta, gamma_d)
    per_hop = (n_clusters + 1) ** delta * gamma_d
    return LinkBudget((per_hop,) * (n_clusters + 1), gamma_d)


def explicit_budget(hop_avg_snr: Sequence[float], gamma_d: float = 1.0) -> LinkBudget:
    return LinkBudget(tuple(hop_avg_snr), gamma_d)


@dataclass(frozen=True)
class ModulationParams:
    """SER family member ``alpha * erfc(sqrt(beta * snr))``."""

    alpha: float
    beta: float
    exact: bool = True
    name: str = "custom"

    def __post_init__(self):
        for field_name in ("alpha", "beta"):
            v = getattr(self, field_name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"modulation {field_name} must be positive, got {v!r}")


_BINARY = {
    "BPSK": (0.5, 1.0),
    "BFSK": (0.5, 0.5),
}
_M_ARY = ("MPSK", "MQAM", "MPAM")


def modulation_from_name(name: str, order: int | None = None) -> ModulationParams:
    """Build the (alpha, beta) pair for a named scheme.

    BPSK and BFSK ignore ``order``; MPSK needs M > 2, MQAM and MPAM M >= 2.
    MPSK and MQAM are flagged approximate.
    """
    key = name.strip().upper()
    if key in _BINARY:
        alpha, beta = _BINARY[key]
        return ModulationParams(alpha, beta, True, key)
    if key not in _M_ARY:
        raise ValueError(f"unknown modulation {name!r}; expected one of {sorted([*_BINARY, *_M_ARY])}")
    if order is None or int(order) != order or order < 2:
        raise ValueError(f"{key} needs an integer order M >= 2, got {order!r}")
    m = int(order)
    label = f"{m}-{key[1:]}"
    if key == "MPSK":
        if m <= 2:
            raise ValueError("MPSK parameters apply to M > 2; use BPSK for M = 2")
        return ModulationParams(1.0, math.sin(math.pi / m) ** 2, False, label)
    if key == "MQAM":
        return ModulationParams(2.0 * (1.0 - 1.0 / math.sqrt(m)), 3.0 / (2.0 * (m - 1)), False, label)
    return ModulationParams((m - 1) / m, 3.0 / (m * m - 1), True, label)
