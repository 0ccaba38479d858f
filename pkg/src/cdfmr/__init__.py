"""Exact, asymptotic and Monte Carlo performance of clustered decode-and-forward
multi-hop relaying with ad-hoc (hop-by-hop) relay selection over Rayleigh fading."""

from .analytic import (
    CancellationWindowError,
    MultiIndexTerm,
    OutageThreshold,
    asymptotic_outage,
    asymptotic_ser,
    cdf_expanded,
    cdf_product,
    ergodic_capacity,
    moment_identity_residual,
    multi_index_terms,
    outage_probability,
    pdf,
    prob_snr_gain,
    ser,
)
from .network import (
    ClusterTopology,
    LinkBudget,
    ModulationParams,
    balanced_budget,
    effective_gammas,
    explicit_budget,
    modulation_from_name,
    unbalanced_budget,
)
from .simulator import MetricEstimate, SimulationConfig, draw_realization, estimate

__version__ = "0.1.0"
