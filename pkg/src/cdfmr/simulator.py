"""Monte Carlo execution of the hop-by-hop ad-hoc routing rule.

Each realisation samples only the links the router inspects: the L_i links
from the relay already selected at hop i-1, and for the last cluster both its
incoming links and its links to the destination. Link SNRs are exponential
with the hop's mean (Rayleigh amplitude).

Samples are split into fixed-size chunks. Chunk c draws from a Philox stream
keyed by the seed with counter block c, so results do not depend on how many
workers process the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .analytic import OutageThreshold
from .network import ClusterTopology, LinkBudget, ModulationParams

METRICS = ("outage", "capacity", "ser", "snr_gain")
DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimulationConfig:
    sample_count: int = 1_000_000
    seed: int = 42
    chunk_size: int = DEFAULT_CHUNK
    metrics: frozenset[str] = frozenset(METRICS)
    threshold: OutageThreshold | None = None
    mod: ModulationParams | None = None
    mu: float | None = None
    workers: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        object.__setattr__(self, "chunk_size", min(self.chunk_size, self.sample_count))
        metrics = frozenset(self.metrics)
        unknown = metrics - set(METRICS)
        if unknown:
            raise ValueError(f"unknown metrics {sorted(unknown)}")
        object.__setattr__(self, "metrics", metrics)
        if "outage" in metrics and self.threshold is None:
            raise ValueError("outage metric needs a rate threshold")
        if "ser" in metrics and self.mod is None:
            raise ValueError("ser metric needs modulation parameters")
        if "snr_gain" in metrics and (self.mu is None or not self.mu >= 0):
            raise ValueError("snr_gain metric needs mu >= 0")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class MetricEstimate:
    value: float
    std_error: float
    n: int


@dataclass
class RoutingRealization:
    per_hop_links: list[np.ndarray]
    last_hop_links: np.ndarray
    selected: list[int]
    per_hop_snr: list[float]
    end_to_end_snr: float
    direct_snr: float = field(default=math.nan)


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent stream for one chunk: Philox keyed by seed, counter block = chunk."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk_index]))


@dataclass
class _Batch:
    per_hop_links: list[np.ndarray]
    last_hop_links: np.ndarray
    selected: np.ndarray
    per_hop_snr: np.ndarray
    end_to_end_snr: np.ndarray
    direct_snr: np.ndarray


def _draw_batch(rng: np.random.Generator, topology: ClusterTopology, budget: LinkBudget, n: int) -> _Batch:
    budget.check(topology)
    sizes = topology.cluster_sizes
    means = budget.hop_avg_snr
    links = []
    selected = []
    per_hop = []
    for i, L in enumerate(sizes[:-1]):
        hop = rng.standard_exponential((n, L)) * means[i]
        r = np.argmax(hop, axis=1)
        links.append(hop)
        selected.append(r)
        per_hop.append(hop[np.arange(n), r])
    L = sizes[-1]
    incoming = rng.standard_exponential((n, L)) * means[-2]
    outgoing = rng.standard_exponential((n, L)) * means[-1]
    bottleneck = np.minimum(incoming, outgoing)
    r = np.argmax(bottleneck, axis=1)
    links.append(incoming)
    selected.append(r)
    per_hop.append(bottleneck[np.arange(n), r])
    direct = rng.standard_exponential(n) * budget.direct_avg_snr
    per_hop_arr = np.column_stack(per_hop)
    return _Batch(
        per_hop_links=links,
        last_hop_links=outgoing,
        selected=np.column_stack(selected),
        per_hop_snr=per_hop_arr,
        end_to_end_snr=per_hop_arr.min(axis=1),
        direct_snr=direct,
    )


def draw_realization(rng: np.random.Generator, topology: ClusterTopology, budget: LinkBudget) -> RoutingRealization:
    """One routing decision; argmax ties go to the lowest index."""
    b = _draw_batch(rng, topology, budget, 1)
    return RoutingRealization(
        per_hop_links=[h[0].copy() for h in b.per_hop_links],
        last_hop_links=b.last_hop_links[0].copy(),
        selected=[int(s) for s in b.selected[0]],
        per_hop_snr=[float(s) for s in b.per_hop_snr[0]],
        end_to_end_snr=float(b.end_to_end_snr[0]),
        direct_snr=float(b.direct_snr[0]),
    )


def draw_end_to_end(rng: np.random.Generator, topology: ClusterTopology, budget: LinkBudget, n: int) -> np.ndarray:
    return _draw_batch(rng, topology, budget, n).end_to_end_snr


def _observations(batch: _Batch, topology: ClusterTopology, config: SimulationConfig) -> dict[str, np.ndarray]:
    g = batch.end_to_end_snr
    hops = topology.n_hops
    obs = {}
    if "outage" in config.metrics:
        rate = np.log2(1.0 + g) / hops
        obs["outage"] = (rate < config.threshold.rate_threshold).astype(np.float64)
    if "capacity" in config.metrics:
        obs["capacity"] = np.log2(1.0 + g) / hops
    if "ser" in config.metrics:
        # 2 alpha Q(sqrt(2 beta g)) == alpha erfc(sqrt(beta g))
        obs["ser"] = config.mod.alpha * erfc(np.sqrt(config.mod.beta * g))
    if "snr_gain" in config.metrics:
        obs["snr_gain"] = (g > config.mu * batch.direct_snr).astype(np.float64)
    return obs


def _chunk_stats(args) -> dict[str, tuple[int, float, float]]:
    topology, budget, config, index, n = args
    batch = _draw_batch(chunk_rng(config.seed, index), topology, budget, n)
    stats = {}
    for name, x in _observations(batch, topology, config).items():
        mean = float(np.mean(x))
        m2 = float(np.sum((x - mean) ** 2))
        stats[name] = (n, mean, m2)
    return stats


def _merge(a: tuple[int, float, float], b: tuple[int, float, float]) -> tuple[int, float, float]:
    # Chan et al. pairwise update of (count, mean, sum of squared deviations)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def estimate(topology: ClusterTopology, budget: LinkBudget, config: SimulationConfig) -> dict[str, MetricEstimate]:
    """Monte Carlo estimates with standard errors, in canonical metric order."""
    budget.check(topology)
    full, rest = divmod(config.sample_count, config.chunk_size)
    sizes = [config.chunk_size] * full + ([rest] if rest else [])
    jobs = [(topology, budget, config, i, n) for i, n in enumerate(sizes)]
    if config.workers == 1 or len(jobs) == 1:
        chunk_results = [_chunk_stats(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            chunk_results = list(pool.map(_chunk_stats, jobs))
    out = {}
    for name in METRICS:
        if name not in config.metrics:
            continue
        acc = chunk_results[0][name]
        for res in chunk_results[1:]:
            acc = _merge(acc, res[name])
        n, mean, m2 = acc
        std = math.sqrt(m2 / (n - 1)) if n > 1 else 0.0
        out[name] = MetricEstimate(mean, std / math.sqrt(n), n)
    return out
