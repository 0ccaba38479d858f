"""Closed-form end-to-end metrics for ad-hoc routing over CDFMR networks.

The end-to-end SNR is the minimum over clusters of per-cluster maxima of
exponentials, so its CDF has the product form

    F(x) = 1 - prod_i [1 - (1 - exp(-x / G_i))^{L_i}]

with G_i the effective per-cluster means. Expanding every bracket gives a sum
over multi-indices j (1 <= j_i <= L_i) of signed binomial weights times
exp(-K x), K = sum_i j_i / G_i. Capacity, SER and the SNR-gain probability are
integrals of that sum and only exist in expanded form; the CDF and outage use
the product form, which has no cancellation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .network import ClusterTopology, LinkBudget, ModulationParams, effective_gammas
from .special import binom, exp_e1, gamma_half_integer

LN2 = math.log(2.0)

# Alternating binomial sums lose roughly sum(L_i) bits.
CANCELLATION_WINDOW = 30
PDF_NEGATIVE_FLOOR = -1e-9


class CancellationWindowError(ValueError):
    """Expanded sum requested for a topology with too many relays."""


@dataclass(frozen=True)
class MultiIndexTerm:
    """One term of the expanded sums.

    ``weight`` is the signed integer (-1)^(j_1+...+j_N+N) prod_i C(L_i, j_i),
    the sign carried by the PDF; the CDF uses its negation.
    """

    indices: tuple[int, ...]
    weight: int
    k_factor: float


@dataclass(frozen=True)
class OutageThreshold:
    """Target end-to-end rate R_th in bit/s/Hz."""

    rate_threshold: float

    def __post_init__(self):
        if not (self.rate_threshold >= 0.0 and math.isfinite(self.rate_threshold)):
            raise ValueError(f"rate threshold must be finite and nonnegative, got {self.rate_threshold!r}")

    def snr_threshold(self, n_clusters: int) -> float:
        """A = 2^((N+1) R_th) - 1, the SNR below which the route is in outage."""
        return math.expm1((n_clusters + 1) * self.rate_threshold * LN2)


@lru_cache(maxsize=256)
def _index_table(sizes: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Odometer over all multi-indices with exact signed weights.

    Rows are ordered by descending |weight| so accumulation starts with the
    dominant terms.
    """
    n = len(sizes)
    rows = []
    weights = []
    for idx in itertools.product(*(range(1, L + 1) for L in sizes)):
        w = 1
        for L, j in zip(sizes, idx):
            w *= binom(L, j)
        if (sum(idx) + n) % 2:
            w = -w
        rows.append(idx)
        weights.append(w)
    order = sorted(range(len(rows)), key=lambda r: -abs(weights[r]))
    idx_arr = np.array([rows[r] for r in order], dtype=np.int64).reshape(len(rows), n)
    int_weights = tuple(weights[r] for r in order)
    w_arr = np.array(int_weights, dtype=np.float64)
    idx_arr.setflags(write=False)
    w_arr.setflags(write=False)
    return idx_arr, w_arr, int_weights


def _check_window(topology: ClusterTopology) -> None:
    if topology.total_relays > CANCELLATION_WINDOW:
        raise CancellationWindowError(
            f"topology {topology} has {topology.total_relays} relays; expanded sums are only "
            f"trusted up to {CANCELLATION_WINDOW}"
        )


def _terms(topology: ClusterTopology, budget: LinkBudget) -> tuple[np.ndarray, np.ndarray]:
    """Float weights and K-factors for every multi-index term."""
    _check_window(topology)
    g_eff = np.asarray(effective_gammas(topology, budget))
    idx, w, _ = _index_table(topology.cluster_sizes)
    k = idx @ (1.0 / g_eff)
    return w, k


def multi_index_terms(topology: ClusterTopology, budget: LinkBudget) -> list[MultiIndexTerm]:
    _check_window(topology)
    g_eff = effective_gammas(topology, budget)
    idx, _, int_weights = _index_table(topology.cluster_sizes)
    terms = []
    for row, w in zip(idx.tolist(), int_weights):
        k = math.fsum(j / g for j, g in zip(row, g_eff))
        terms.append(MultiIndexTerm(tuple(row), w, k))
    return terms


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


def _check_x(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise ValueError("SNR argument must be nonnegative")
    return x


def _log_survival(x: np.ndarray, topology: ClusterTopology, budget: LinkBudget) -> np.ndarray:
    g_eff = effective_gammas(topology, budget)
    log_s = np.zeros_like(x)
    with np.errstate(divide="ignore"):
        for L, g in zip(topology.cluster_sizes, g_eff):
            p = (-np.expm1(-x / g)) ** L
            log_s = log_s + np.log1p(-p)
    return log_s


def cdf_product(x, topology: ClusterTopology, budget: LinkBudget):
    """End-to-end SNR CDF from the product form; accepts scalars or arrays."""
    x = _check_x(x)
    out = -np.expm1(_log_survival(x, topology, budget))
    return float(out) if out.ndim == 0 else out


def survival_product(x, topology: ClusterTopology, budget: LinkBudget):
    """1 - F(x) without forming the difference."""
    x = _check_x(x)
    out = np.exp(_log_survival(x, topology, budget))
    return float(out) if out.ndim == 0 else out


def cdf_expanded(x: float, topology: ClusterTopology, budget: LinkBudget) -> float:
    """End-to-end SNR CDF as 1 + sum over multi-indices (cross-check path)."""
    x = float(_check_x(x))
    w, k = _terms(topology, budget)
    return math.fsum([1.0, *(-w * np.exp(-k * x)).tolist()])


def pdf(x: float, topology: ClusterTopology, budget: LinkBudget) -> float:
    x = float(_check_x(x))
    w, k = _terms(topology, budget)
    value = _fsum(w * k * np.exp(-k * x))
    if value < 0.0:
        if value < PDF_NEGATIVE_FLOOR:
            raise ArithmeticError(f"pdf({x}) = {value} is below the cancellation floor")
        return 0.0
    return value


def ergodic_capacity(topology: ClusterTopology, budget: LinkBudget) -> float:
    """Mean of log2(1 + snr)/(N+1) in bit/s/Hz."""
    w, k = _terms(topology, budget)
    scaled = np.array([exp_e1(v) for v in k.tolist()])
    total = _fsum(w * scaled)
    return max(total, 0.0) / (topology.n_hops * LN2)


def outage_probability(topology: ClusterTopology, budget: LinkBudget, threshold: OutageThreshold) -> float:
    a = threshold.snr_threshold(topology.n_clusters)
    return cdf_product(a, topology, budget)


def outage_probability_expanded(
    topology: ClusterTopology, budget: LinkBudget, threshold: OutageThreshold
) -> float:
    a = threshold.snr_threshold(topology.n_clusters)
    return cdf_expanded(a, topology, budget)


def ser(topology: ClusterTopology, budget: LinkBudget, mod: ModulationParams) -> float:
    """Average symbol error rate for the alpha*erfc(sqrt(beta*snr)) family.

    Approximate families (MPSK, MQAM) return the raw formula value, which
    may exceed 1 at very low SNR.
    """
    w, k = _terms(topology, budget)
    u = k / mod.beta
    lm = topology.min_size
    if lm > 1 and u.max() <= _SER_SERIES_RADIUS:
        per_term = _ser_term_remainder(u, lm)
    else:
        # 1 - sqrt(1/(1+u)) rewritten to avoid cancellation for small u
        per_term = (u / (1.0 + u)) / (1.0 + np.sqrt(1.0 / (1.0 + u)))
    return mod.alpha * _fsum(w * per_term)


_SER_SERIES_RADIUS = 0.5


def _ser_term_remainder(u: np.ndarray, lm: int) -> np.ndarray:
    """1 - (1+u)^(-1/2) minus its Taylor polynomial of degree < lm.

    The dropped polynomial sums to exactly zero over the multi-indices (the
    vanishing moments of order 1..L_m-1), so only the O(u^lm) tail is summed
    and high-SNR SER keeps full relative precision.
    """
    # (1+u)^(-1/2) = sum_l c_l u^l, c_l = (-1)^l C(2l, l) / 4^l
    c = 1.0
    for l in range(1, lm):
        c *= -(2 * l - 1) / (2 * l)
    total = np.zeros_like(u)
    power = u**lm
    l = lm
    while True:
        c *= -(2 * l - 1) / (2 * l)
        step = -c * power
        total += step
        if np.all(np.abs(step) <= 1e-17 * np.abs(total)):
            break
        power = power * u
        l += 1
    return total


def prob_snr_gain(topology: ClusterTopology, budget: LinkBudget, mu: float) -> float:
    """P(end-to-end SNR / direct-link SNR > mu)."""
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    w, k = _terms(topology, budget)
    y = k * (mu * budget.direct_avg_snr)
    if y.max() <= 1.0:
        # near 1: sum w = 1 and the moments below L_m vanish, so the complement is
        # the remainder of y/(1+y) after its degree-(L_m - 1) polynomial
        lm = topology.min_size
        sign = 1.0 if lm % 2 else -1.0
        value = 1.0 - sign * _fsum(w * y**lm / (1.0 + y))
    else:
        value = _fsum(w / (y + 1.0))
    return min(max(value, 0.0), 1.0)


def _dominant_inverse_power(topology: ClusterTopology, budget: LinkBudget) -> float:
    g_eff = effective_gammas(topology, budget)
    lm = topology.min_size
    return math.fsum(g_eff[i] ** -lm for i in topology.min_index_set)


def asymptotic_ser(topology: ClusterTopology, budget: LinkBudget, mod: ModulationParams) -> float:
    """Leading high-SNR term of the SER; decays with order L_m."""
    lm = topology.min_size
    coeff = _dominant_inverse_power(topology, budget)
    return mod.alpha * coeff * gamma_half_integer(lm) / (math.sqrt(math.pi) * mod.beta**lm)


def asymptotic_outage(topology: ClusterTopology, budget: LinkBudget, threshold: OutageThreshold) -> float:
    lm = topology.min_size
    a = threshold.snr_threshold(topology.n_clusters)
    return _dominant_inverse_power(topology, budget) * a**lm


def moment_identity_residual(
    topology: ClusterTopology, budget: LinkBudget, z: int, relative: bool = False
) -> float:
    """sum_j (-1)^(j_1+...+j_N) prod C(L_i, j_i) K^z, which vanishes for 1 <= z < L_m.

    With ``relative=True`` the residual is divided by the largest |term|.
    """
    lm = topology.min_size
    if not (int(z) == z and 1 <= z <= lm - 1):
        raise ValueError(f"z must be an integer in [1, {lm - 1}] for topology {topology}, got {z!r}")
    w, k = _terms(topology, budget)
    sign = -1.0 if topology.n_clusters % 2 else 1.0
    terms = sign * w * k ** int(z)
    residual = _fsum(terms)
    if relative:
        return residual / float(np.max(np.abs(terms)))
    return residual
