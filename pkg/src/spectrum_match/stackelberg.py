"""Leader/follower negotiation of the cooperation contract for each pair.

The primary side leads: it picks the relaying fraction ``beta`` of the
secondary share and the slot split ``alpha``; the secondary follows with
its transmit power. Solving backwards:

* follower: for fixed ``beta`` the secondary's utility is concave in its
  power, so the best response has the closed form
  ``clamp((1 - beta) / cost - noise / g_ss, 0, p_max)``;
* leader, power split: substituting the best response leaves a scalar
  relay-rate objective ``beta * ln(1 + g_sp * p(beta) / noise)`` which is
  maximized by a dense 1001-point grid pass followed by golden-section
  refinement of the winning bracket (33 halvings, final width below the
  1e-9 target); grid ties resolve to the smaller ``beta``;
* leader, time split: ``alpha`` balances the two relaying phases,
  ``alpha = r1 / (r1 + beta * r2)``, which makes the delivered primary
  rate equal on both sides of the min.

Everything is computed by one array kernel so a whole N x M scenario
negotiates in a handful of vectorized passes; the per-pair functions run
the same kernel on 0-d arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NetworkScenario, SystemParams
from .rates import CooperationTerms, PhaseRates

__all__ = [
    "TermsMatrix",
    "best_response_power",
    "optimal_beta",
    "optimal_alpha",
    "negotiate_terms",
    "negotiate_all",
]

_BETA_GRID = np.linspace(0.0, 1.0, 1001)
_GOLDEN_STEPS = 33  # 0.002 * 0.618**33 < 1e-9
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class TermsMatrix:
    """Negotiated contracts of every primary/secondary pair, one array per field.

    All arrays have shape ``(n_pu, n_su)``; entry ``[i, j]`` is the
    contract primary ``i`` and secondary ``j`` would sign.
    """

    alpha: np.ndarray
    beta: np.ndarray
    p_su: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r_coop_pu: np.ndarray
    u_su: np.ndarray

    @property
    def n_pu(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_su(self) -> int:
        return self.alpha.shape[1]

    def at(self, i: int, j: int) -> CooperationTerms:
        """Contract of pair ``(i, j)`` as a scalar record."""
        return CooperationTerms(
            alpha=float(self.alpha[i, j]),
            beta=float(self.beta[i, j]),
            p_su=float(self.p_su[i, j]),
            phase_rates=PhaseRates(float(self.r1[i, j]), float(self.r2[i, j])),
            r_coop_pu=float(self.r_coop_pu[i, j]),
            u_su=float(self.u_su[i, j]),
        )


def best_response_power(beta: float, g_ss: float, params: SystemParams) -> float:
    """Secondary power maximizing its utility once ``beta`` is fixed.

    Closed form of the concave first-order condition, clamped to
    ``[0, p_max]``. A free ride (``cost_per_energy = 0``) saturates at
    ``p_max`` whenever any own traffic gets through; a dead own link
    (``g_ss = 0``) makes transmitting pointless.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    if not g_ss >= 0:
        raise ValueError(f"g_ss must be nonnegative, got {g_ss!r}")
    if params.cost_per_energy == 0.0:
        return params.p_max if (beta < 1.0 and g_ss > 0.0) else 0.0
    if g_ss == 0.0:
        return 0.0
    interior = (1.0 - beta) / params.cost_per_energy - params.noise_power / g_ss
    if np.isnan(interior):
        # both divisions overflowed (cost and g_ss simultaneously tiny);
        # settle the sign by cross-multiplying instead
        up = (1.0 - beta) * g_ss >= params.cost_per_energy * params.noise_power
        interior = np.inf if up else -np.inf
    return min(max(interior, 0.0), params.p_max)


def _best_response_arr(beta: np.ndarray, g_ss: np.ndarray, params: SystemParams) -> np.ndarray:
    """Array twin of :func:`best_response_power` (same arithmetic, broadcast)."""
    if params.cost_per_energy == 0.0:
        return np.where((beta < 1.0) & (g_ss > 0.0), params.p_max, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # g_ss = 0 divides to +inf, the interior point to -inf, the clamp to 0
        interior = (1.0 - beta) / params.cost_per_energy - params.noise_power / g_ss
    bad = np.isnan(interior)
    if bad.any():
        # both divisions overflowed (cost and g_ss simultaneously tiny);
        # settle the sign by cross-multiplying instead
        up = (1.0 - beta) * g_ss >= params.cost_per_energy * params.noise_power
        interior = np.where(bad, np.where(up, np.inf, -np.inf), interior)
    return np.clip(interior, 0.0, params.p_max)


def _relay_objective(beta: np.ndarray, g_sp: np.ndarray, g_ss: np.ndarray, params: SystemParams) -> np.ndarray:
    """Leader objective for the relaying fraction: beta times the forward rate."""
    p = _best_response_arr(beta, g_ss, params)
    return beta * np.log1p(g_sp * p / params.noise_power)


def _solve_beta(g_sp: np.ndarray, g_ss: np.ndarray, params: SystemParams) -> np.ndarray:
    """Grid-plus-golden maximizer of the relay objective, elementwise.

    ``g_sp`` and ``g_ss`` must broadcast against each other; the result
    takes the broadcast shape. An identically zero objective yields 0.
    """
    p_grid = _best_response_arr(_BETA_GRID, g_ss[..., None], params)
    obj = g_sp[..., None] * p_grid
    obj /= params.noise_power
    np.log1p(obj, out=obj)
    obj *= _BETA_GRID
    idx = np.argmax(obj, axis=-1)  # first max, so ties pick the smaller beta
    best_val = np.take_along_axis(obj, idx[..., None], axis=-1)[..., 0]

    a = _BETA_GRID[np.maximum(idx - 1, 0)]
    b = _BETA_GRID[np.minimum(idx + 1, _BETA_GRID.size - 1)]
    for _ in range(_GOLDEN_STEPS):
        span = b - a
        probes = np.stack((b - _INV_PHI * span, a + _INV_PHI * span))
        values = _relay_objective(probes, g_sp, g_ss, params)
        keep_low = values[0] >= values[1]
        a = np.where(keep_low, a, probes[0])
        b = np.where(keep_low, probes[1], b)
    mid = 0.5 * (a + b)
    refined_val = _relay_objective(mid, g_sp, g_ss, params)

    beta = np.where(refined_val > best_val, mid, _BETA_GRID[idx])
    top = np.maximum(refined_val, best_val)
    return np.where(top > 0.0, beta, 0.0)


def optimal_beta(i: int, j: int, scenario: NetworkScenario) -> float:
    """Relaying fraction the leader picks for pair ``(i, j)``."""
    _check_pair(i, j, scenario)
    return float(
        _solve_beta(
            np.asarray(scenario.g_sp[i, j], dtype=float),
            np.asarray(scenario.g_ss[j], dtype=float),
            scenario.params,
        )
    )


def optimal_alpha(rates: PhaseRates, beta_star: float) -> float:
    """Slot split balancing the listening and forwarding phases.

    With both phase rates zero there is nothing to relay and the whole
    slot goes to the secondary by convention (returns 1).
    """
    if not 0.0 <= beta_star <= 1.0:
        raise ValueError(f"beta_star must lie in [0, 1], got {beta_star!r}")
    denom = rates.r1 + beta_star * rates.r2
    if denom == 0.0:
        return 1.0
    return rates.r1 / denom


def _negotiate_kernel(
    g_ps: np.ndarray, g_sp: np.ndarray, g_ss: np.ndarray, params: SystemParams
) -> tuple[np.ndarray, ...]:
    """Full contract for every element: (alpha, beta, p_su, r1, r2, r_coop, u_su)."""
    beta = _solve_beta(g_sp, g_ss, params)
    p = _best_response_arr(beta, g_ss, params)
    noise = params.noise_power
    r1 = np.log1p(g_ps * params.p_primary / noise)
    r2 = np.log1p(g_sp * p / noise)
    denom = r1 + beta * r2
    live = denom > 0.0
    safe = np.where(live, denom, 1.0)
    alpha = np.where(live, r1 / safe, 1.0)
    r_coop = np.where(live, beta * r1 * r2 / safe, 0.0)
    own = np.log1p(g_ss * p / noise)
    u_su = alpha * (1.0 - beta) * own - alpha * params.cost_per_energy * p
    return alpha, beta, p, r1, r2, r_coop, u_su


def negotiate_terms(i: int, j: int, scenario: NetworkScenario) -> CooperationTerms:
    """Negotiate the contract of the single pair ``(i, j)``."""
    _check_pair(i, j, scenario)
    out = _negotiate_kernel(
        np.asarray(scenario.g_ps[i, j], dtype=float),
        np.asarray(scenario.g_sp[i, j], dtype=float),
        np.asarray(scenario.g_ss[j], dtype=float),
        scenario.params,
    )
    alpha, beta, p, r1, r2, r_coop, u_su = (float(x) for x in out)
    return CooperationTerms(
        alpha=alpha,
        beta=beta,
        p_su=p,
        phase_rates=PhaseRates(r1, r2),
        r_coop_pu=r_coop,
        u_su=u_su,
    )


def negotiate_all(scenario: NetworkScenario) -> TermsMatrix:
    """Negotiate every pair of the scenario in one vectorized pass."""
    n, m = scenario.params.n_pu, scenario.params.n_su
    out = _negotiate_kernel(
        scenario.g_ps,
        scenario.g_sp,
        scenario.g_ss[np.newaxis, :],
        scenario.params,
    )
    fields = tuple(np.ascontiguousarray(np.broadcast_to(arr, (n, m))) for arr in out)
    return TermsMatrix(*fields)


def _check_pair(i: int, j: int, scenario: NetworkScenario) -> None:
    if not 0 <= i < scenario.params.n_pu:
        raise IndexError(f"primary index {i} out of range for n_pu={scenario.params.n_pu}")
    if not 0 <= j < scenario.params.n_su:
        raise IndexError(f"secondary index {j} out of range for n_su={scenario.params.n_su}")
