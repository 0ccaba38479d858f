"""Quadrature cross-checks for the expanded closed forms.

Every integrand here is built from the product-form survival function, never
from the multi-index sums, so an error in the expansion cannot cancel out.
Integration by parts moves each metric onto F or 1 - F:

    capacity = 1/((N+1) ln 2) * int_0^inf (1 - F(x)) / (1 + x) dx
    SER      = alpha * int_0^inf sqrt(beta/(pi x)) exp(-beta x) F(x) dx
    Omega    = int_0^inf (1 - F(mu Gd t)) exp(-t) dt
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .analytic import LN2, cdf_product, survival_product
from .network import ClusterTopology, LinkBudget, ModulationParams, effective_gammas


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-30
    rel_tol: float = 1e-10
    max_subdivisions: int = 500
    # None: pick the point where the integrand's tail mass drops below abs_tol
    upper_cutoff: float | None = None

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if self.upper_cutoff is not None and not self.upper_cutoff > 0:
            raise ValueError("upper_cutoff must be positive")

    def halved(self) -> QuadratureSpec:
        return QuadratureSpec(self.abs_tol / 2, self.rel_tol / 2, self.max_subdivisions, self.upper_cutoff)


def _survival_cutoff(topology: ClusterTopology, budget: LinkBudget, target: float) -> float:
    """Smallest x (to bisection precision) with 1 - F(x) < target."""
    hi = max(effective_gammas(topology, budget))
    while survival_product(hi, topology, budget) >= target:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if survival_product(mid, topology, budget) >= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def _adaptive(func, lo: float, hi: float, spec: QuadratureSpec, scale: float) -> float:
    """Gauss-Kronrod over [lo, hi], split geometrically at multiples of ``scale``."""
    edges = [lo]
    point = lo + scale * 1e-3
    while point < hi:
        edges.append(point)
        point *= 4.0
    edges.append(hi)
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            val, _ = integrate.quad(
                func, a, b, epsabs=spec.abs_tol / len(edges), epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
            )
        for w in caught:
            # roundoff-limited means the value is already at machine precision
            if "roundoff" not in str(w.message):
                raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {w.message}")
        total.append(val)
    return math.fsum(total)


def capacity_by_quadrature(
    topology: ClusterTopology, budget: LinkBudget, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    g_eff = effective_gammas(topology, budget)
    decay = sum(1.0 / g for g in g_eff)
    cutoff = spec.upper_cutoff
    if cutoff is None:
        # tail <= S(c)/decay for the slowest exponential rate
        cutoff = _survival_cutoff(topology, budget, spec.abs_tol * decay / 10.0)

    def integrand(x):
        return survival_product(x, topology, budget) / (1.0 + x)

    integral = _adaptive(integrand, 0.0, cutoff, spec, min(g_eff))
    return integral / (topology.n_hops * LN2)


def ser_by_quadrature(
    topology: ClusterTopology,
    budget: LinkBudget,
    mod: ModulationParams,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    # x = u^2 removes the x^{-1/2} endpoint singularity
    beta = mod.beta
    cutoff = spec.upper_cutoff
    if cutoff is None:
        # alpha * erfc(sqrt(beta x)) bounds the tail beyond x since F <= 1
        cutoff_x = 1.0
        while mod.alpha * math.erfc(math.sqrt(beta * cutoff_x)) > spec.abs_tol / 10.0:
            cutoff_x *= 2.0
    else:
        cutoff_x = cutoff
    coef = 2.0 * math.sqrt(beta / math.pi)

    def integrand(u):
        x = u * u
        return coef * math.exp(-beta * x) * cdf_product(x, topology, budget)

    g_min = min(effective_gammas(topology, budget))
    scale = min(math.sqrt(g_min), 1.0 / math.sqrt(beta))
    return mod.alpha * _adaptive(integrand, 0.0, math.sqrt(cutoff_x), spec, scale)


def snr_gain_by_quadrature(
    topology: ClusterTopology,
    budget: LinkBudget,
    mu: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    if mu == 0.0:
        return 1.0
    gd = budget.direct_avg_snr
    cutoff = spec.upper_cutoff
    if cutoff is None:
        cutoff = -math.log(spec.abs_tol / 10.0)
    else:
        cutoff = cutoff / gd

    def integrand(t):
        return survival_product(mu * gd * t, topology, budget) * math.exp(-t)

    g_min = min(effective_gammas(topology, budget))
    scale = min(1.0, g_min / (mu * gd))
    return _adaptive(integrand, 0.0, cutoff, spec, scale)



def estimator_std_error(
    metric: str,
    topology: ClusterTopology,
    budget: LinkBudget,
    n: int,
    *,
    threshold=None,
    mod: ModulationParams | None = None,
    mu: float | None = None,
    spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-7),
) -> float:
    """Standard error of the n-sample Monte Carlo estimator when the model holds.

    Indicator metrics are Bernoulli with the closed-form probability taken from
    the product-form CDF or quadrature; capacity and SER use second moments by
    quadrature. Unlike the sample standard error this does not collapse to 0
    when a rare event is never observed.
    """
    if metric == "outage":
        p = cdf_product(threshold.snr_threshold(topology.n_clusters), topology, budget)
        var = p * (1.0 - p)
    elif metric == "snr_gain":
        p = snr_gain_by_quadrature(topology, budget, mu, spec)
        var = p * (1.0 - p)
    elif metric == "capacity":
        g_eff = effective_gammas(topology, budget)
        decay = sum(1.0 / g for g in g_eff)
        cutoff = _survival_cutoff(topology, budget, spec.abs_tol * decay / 10.0)

        def second(x):
            return 2.0 * math.log1p(x) / (1.0 + x) * survival_product(x, topology, budget)

        scale = (topology.n_hops * LN2) ** -2
        m2 = scale * _adaptive(second, 0.0, cutoff, spec, min(g_eff))
        m1 = capacity_by_quadrature(topology, budget, spec)
        var = m2 - m1 * m1
    elif metric == "ser":
        beta, alpha = mod.beta, mod.alpha
        cutoff_x = 1.0
        while alpha * math.erfc(math.sqrt(beta * cutoff_x)) > spec.abs_tol / 10.0:
            cutoff_x *= 2.0
        coef = 4.0 * alpha * alpha * math.sqrt(beta / math.pi)

        def second(u):
            x = u * u
            return coef * math.erfc(u * math.sqrt(beta)) * math.exp(-beta * x) * cdf_product(x, topology, budget)

        g_min = min(effective_gammas(topology, budget))
        scale = min(math.sqrt(g_min), 1.0 / math.sqrt(beta))
        m2 = _adaptive(second, 0.0, math.sqrt(cutoff_x), spec, scale)
        m1 = ser_by_quadrature(topology, budget, mod, spec)
        var = m2 - m1 * m1
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return math.sqrt(max(var, 0.0) / n)
