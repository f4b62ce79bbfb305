"""Achievable rates and per-slot utilities for one primary/secondary pair.

Rates are Shannon capacities of scalar Gaussian channels, in nats per
slot. A cooperating pair splits each slot three ways: a fraction
``1 - alpha`` carries the primary transmission to the relay, ``alpha * beta``
carries the relayed copy to the primary receiver, and ``alpha * (1 - beta)``
is the secondary's own airtime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NetworkScenario

__all__ = [
    "PhaseRates",
    "CooperationTerms",
    "shannon_rate",
    "noncooperative_rate",
    "cooperative_rate",
    "secondary_rate",
    "pu_utility",
    "su_utility",
]


@dataclass(frozen=True)
class PhaseRates:
    """Per-phase link rates of one candidate relaying pair."""

    r1: float  # primary transmitter -> secondary transmitter (listening phase)
    r2: float  # secondary transmitter -> primary receiver (forwarding phase)

    def __post_init__(self) -> None:
        for name, value in (("r1", self.r1), ("r2", self.r2)):
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


@dataclass(frozen=True)
class CooperationTerms:
    """Negotiated contract of one pair: time split, relay power, payoffs."""

    alpha: float  # secondary share of the slot
    beta: float  # fraction of the secondary share spent relaying
    p_su: float  # secondary transmit power
    phase_rates: PhaseRates
    r_coop_pu: float  # primary rate under the contract
    u_su: float  # secondary utility under the contract

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta!r}")
        if not self.p_su >= 0:
            raise ValueError(f"p_su must be nonnegative, got {self.p_su!r}")
        if not self.r_coop_pu >= 0:
            raise ValueError(f"r_coop_pu must be nonnegative, got {self.r_coop_pu!r}")


def shannon_rate(gain: float, power: float, noise: float) -> float:
    """Capacity ln(1 + gain * power / noise) in nats per channel use."""
    if not noise > 0:
        raise ValueError(f"noise must be positive, got {noise!r}")
    if not gain >= 0:
        raise ValueError(f"gain must be nonnegative, got {gain!r}")
    if not power >= 0:
        raise ValueError(f"power must be nonnegative, got {power!r}")
    return float(np.log1p(gain * power / noise))


def noncooperative_rate(scenario: NetworkScenario, i: int) -> float:
    """Rate of primary pair ``i`` transmitting directly for the whole slot."""
    if not 0 <= i < scenario.params.n_pu:
        raise IndexError(f"primary index {i} out of range for n_pu={scenario.params.n_pu}")
    return shannon_rate(float(scenario.g_pp[i]), scenario.params.p_primary, scenario.params.noise_power)


def cooperative_rate(alpha: float, beta: float, rates: PhaseRates) -> float:
    """Primary rate through the relay: the weaker of the two phases wins.

    Decode-and-forward end to end, so the delivered rate is
    ``min((1 - alpha) * r1, alpha * beta * r2)``.
    """
    _check_fraction("alpha", alpha)
    _check_fraction("beta", beta)
    return min((1.0 - alpha) * rates.r1, alpha * beta * rates.r2)


def secondary_rate(
    alpha: float, beta: float, p_su: float, scenario: NetworkScenario, j: int
) -> float:
    """Rate of secondary pair ``j`` on its own airtime ``alpha * (1 - beta)``."""
    _check_fraction("alpha", alpha)
    _check_fraction("beta", beta)
    if not p_su >= 0:
        raise ValueError(f"p_su must be nonnegative, got {p_su!r}")
    if not 0 <= j < scenario.params.n_su:
        raise IndexError(f"secondary index {j} out of range for n_su={scenario.params.n_su}")
    own = shannon_rate(float(scenario.g_ss[j]), p_su, scenario.params.noise_power)
    return alpha * (1.0 - beta) * own


def pu_utility(r_coop: float, r_noncoop: float) -> float:
    """Primary utility: the better of cooperating and going it alone."""
    return max(r_coop, r_noncoop)


def su_utility(
    alpha: float, beta: float, p_su: float, scenario: NetworkScenario, j: int
) -> float:
    """Secondary utility: own-traffic rate minus the energy cost of the slot.

    The energy price applies to the whole secondary share ``alpha`` (both
    relaying and own traffic run at ``p_su``), so the charge is
    ``alpha * cost_per_energy * p_su``.
    """
    rate = secondary_rate(alpha, beta, p_su, scenario, j)
    return rate - alpha * scenario.params.cost_per_energy * p_su


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
