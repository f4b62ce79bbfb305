"""Cooperative spectrum sharing with negotiated relaying and stable matching.

Primary pairs lease slices of their slots to secondary pairs that relay
their traffic in exchange; each candidate pair negotiates the slot split
and relay power leader/follower style, then the two populations are
matched one-to-one with secondary-proposing deferred acceptance. All
rates are in nats per slot; powers and gains are linear.
"""

from __future__ import annotations

from .channel import NetworkScenario, SystemParams, rayleigh_power_gain, sample_scenario
from .matching import (
    UNMATCHED,
    Matching,
    PreferenceProfile,
    build_preferences,
    deferred_acceptance,
    discriminator,
    enumerate_stable_matchings,
    find_blocking_pairs,
)
from .rates import (
    CooperationTerms,
    PhaseRates,
    cooperative_rate,
    noncooperative_rate,
    pu_utility,
    secondary_rate,
    shannon_rate,
    su_utility,
)
from .sim import (
    CSV_FIELDS,
    SweepConfig,
    SweepRow,
    TrialResult,
    emit_results,
    run_point,
    run_sweep,
    run_trial,
    summarize_point,
    trial_seed,
)
from .stackelberg import (
    TermsMatrix,
    best_response_power,
    negotiate_all,
    negotiate_terms,
    optimal_alpha,
    optimal_beta,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_FIELDS",
    "CooperationTerms",
    "Matching",
    "NetworkScenario",
    "PhaseRates",
    "PreferenceProfile",
    "SweepConfig",
    "SweepRow",
    "SystemParams",
    "TermsMatrix",
    "TrialResult",
    "UNMATCHED",
    "best_response_power",
    "build_preferences",
    "cooperative_rate",
    "deferred_acceptance",
    "discriminator",
    "emit_results",
    "enumerate_stable_matchings",
    "find_blocking_pairs",
    "negotiate_all",
    "negotiate_terms",
    "noncooperative_rate",
    "optimal_alpha",
    "optimal_beta",
    "pu_utility",
    "rayleigh_power_gain",
    "run_point",
    "run_sweep",
    "run_trial",
    "sample_scenario",
    "secondary_rate",
    "shannon_rate",
    "su_utility",
    "summarize_point",
    "trial_seed",
    "__version__",
]
