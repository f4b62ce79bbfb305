"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written from the problem statement, not
from the library internals: dense-grid maximizers for the negotiation,
a one-proposal-at-a-time matching algorithm, and small builders for
synthetic inputs.
"""

from __future__ import annotations

import numpy as np

from spectrum_match import (
    NetworkScenario,
    PreferenceProfile,
    SystemParams,
    TermsMatrix,
)


def follower_utility(p, beta: float, g_ss: float, params: SystemParams):
    """Secondary utility per unit of airtime share (the share scales out)."""
    return (1.0 - beta) * np.log1p(g_ss * np.asarray(p, float) / params.noise_power) - (
        params.cost_per_energy * np.asarray(p, float)
    )


def grid_best_power(beta: float, g_ss: float, params: SystemParams, points: int = 100_001):
    """Dense-grid maximizer of the follower utility over [0, p_max]."""
    p = np.linspace(0.0, params.p_max, points)
    u = follower_utility(p, beta, g_ss, params)
    k = int(np.argmax(u))
    return float(p[k]), float(u[k])


def follower_power(beta, g_ss: float, params: SystemParams):
    """The follower's clamped first-order-condition power, written out again."""
    beta = np.asarray(beta, float)
    if params.cost_per_energy == 0.0:
        return np.where((beta < 1.0) & (g_ss > 0.0), params.p_max, 0.0)
    if g_ss == 0.0:
        return np.zeros_like(beta)
    stationary = (1.0 - beta) / params.cost_per_energy - params.noise_power / g_ss
    return np.clip(stationary, 0.0, params.p_max)


def grid_best_beta(g_sp: float, g_ss: float, params: SystemParams, points: int = 200_001):
    """Dense-grid maximizer of the leader's relay-rate objective over [0, 1]."""
    beta = np.linspace(0.0, 1.0, points)
    p = follower_power(beta, g_ss, params)
    obj = beta * np.log1p(g_sp * p / params.noise_power)
    k = int(np.argmax(obj))
    return float(beta[k]), float(obj[k])


def bisect_root(f, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Root of a sign-changing scalar function by plain bisection."""
    flo = f(lo)
    assert flo * f(hi) < 0, "bisection bracket must change sign"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if flo * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


def sequential_da(su_prefs, pu_prefs, rng: np.random.Generator):
    """Proposer-side deferred acceptance, one proposal at a time.

    Free proposers are served in a random order drawn from ``rng``; the
    final assignment must not depend on that order.
    """
    n_su, n_pu = len(su_prefs), len(pu_prefs)
    pu_rank = [{j: r for r, j in enumerate(prefs)} for prefs in pu_prefs]
    pu_of_su = [None] * n_su
    su_of_pu = [None] * n_pu
    next_choice = [0] * n_su
    free = list(range(n_su))
    while free:
        idx = int(rng.integers(len(free)))
        j = free[idx]
        if next_choice[j] >= len(su_prefs[j]):
            free.pop(idx)
            continue
        i = su_prefs[j][next_choice[j]]
        next_choice[j] += 1
        if j not in pu_rank[i]:
            continue
        holder = su_of_pu[i]
        if holder is None or pu_rank[i][j] < pu_rank[i][holder]:
            su_of_pu[i] = j
            pu_of_su[j] = i
            free.pop(idx)
            if holder is not None:
                pu_of_su[holder] = None
                free.append(holder)
    return pu_of_su, su_of_pu


def synthetic_profile(su_prefs, pu_prefs) -> PreferenceProfile:
    """Wrap bare preference lists in a profile (terms are inert zeros)."""
    n_pu, n_su = len(pu_prefs), len(su_prefs)
    zeros = np.zeros((n_pu, n_su))
    terms = TermsMatrix(
        alpha=zeros, beta=zeros, p_su=zeros, r1=zeros, r2=zeros, r_coop_pu=zeros, u_su=zeros
    )
    return PreferenceProfile(
        su_prefs=[list(p) for p in su_prefs],
        pu_prefs=[list(p) for p in pu_prefs],
        terms=terms,
        r_noncoop=np.zeros(n_pu),
    )


def single_link_scenario(
    g_pp: float,
    g_ss: float,
    g_ps: float,
    g_sp: float,
    params: SystemParams | None = None,
) -> NetworkScenario:
    """A 1x1 scenario with every gain pinned by hand."""
    params = params or SystemParams(n_pu=1, n_su=1)
    return NetworkScenario(
        params=params,
        g_pp=np.array([g_pp]),
        g_ss=np.array([g_ss]),
        g_ps=np.array([[g_ps]]),
        g_sp=np.array([[g_sp]]),
    )
