"""Two-sided matching of primary and secondary pairs on negotiated contracts.

Secondaries rank primaries by the utility their contract would pay them,
primaries rank secondaries by the cooperative rate they would deliver;
either side drops partners that leave it no better than standing alone.
Matching runs secondary-proposing deferred acceptance, which lands on the
stable matching every secondary weakly prefers to any other stable one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import NetworkScenario
from .stackelberg import TermsMatrix, negotiate_all

__all__ = [
    "UNMATCHED",
    "PreferenceProfile",
    "Matching",
    "discriminator",
    "build_preferences",
    "deferred_acceptance",
    "find_blocking_pairs",
    "enumerate_stable_matchings",
]

UNMATCHED = None  # partner value of an unmatched participant

_ENUMERATION_LIMIT = 8  # brute-force enumeration is for oracle-sized instances


@dataclass(frozen=True, eq=False)
class PreferenceProfile:
    """Both sides' acceptability-filtered preference lists over each other.

    ``su_prefs[j]`` lists primary indices in decreasing contract utility
    for secondary ``j``, keeping only contracts with strictly positive
    utility; ties rank the lower primary index first. ``pu_prefs[i]``
    lists secondary indices in decreasing cooperative rate, keeping only
    relays that strictly beat primary ``i``'s direct rate; ties rank the
    lower secondary index first.
    """

    su_prefs: list[list[int]]
    pu_prefs: list[list[int]]
    terms: TermsMatrix
    r_noncoop: np.ndarray  # (N,) direct rate of each primary pair


@dataclass
class Matching:
    """A one-to-one assignment; ``None`` marks an unmatched participant."""

    pu_of_su: list[int | None]
    su_of_pu: list[int | None]
    proposal_count: int = field(default=0, compare=False)


def discriminator(i: int, j: int, terms: TermsMatrix, r_noncoop: np.ndarray) -> int:
    """1 if secondary ``j``'s contract strictly beats primary ``i``'s direct rate."""
    if not 0 <= i < terms.n_pu:
        raise IndexError(f"primary index {i} out of range for n_pu={terms.n_pu}")
    if not 0 <= j < terms.n_su:
        raise IndexError(f"secondary index {j} out of range for n_su={terms.n_su}")
    return 1 if terms.r_coop_pu[i, j] > r_noncoop[i] else 0


def build_preferences(scenario: NetworkScenario) -> PreferenceProfile:
    """Negotiate all contracts and compose both sides' preference lists."""
    params = scenario.params
    terms = negotiate_all(scenario)
    r_noncoop = np.log1p(scenario.g_pp * params.p_primary / params.noise_power)

    # stable argsort on the negated key: decreasing value, lower index on ties
    su_order = np.argsort(-terms.u_su, axis=0, kind="stable")
    su_prefs = []
    for j in range(params.n_su):
        ranked = su_order[:, j]
        su_prefs.append([int(i) for i in ranked[terms.u_su[ranked, j] > 0.0]])

    pu_order = np.argsort(-terms.r_coop_pu, axis=1, kind="stable")
    pu_prefs = []
    for i in range(params.n_pu):
        ranked = pu_order[i]
        keep = terms.r_coop_pu[i, ranked] > r_noncoop[i]
        pu_prefs.append([int(j) for j in ranked[keep]])

    return PreferenceProfile(su_prefs=su_prefs, pu_prefs=pu_prefs, terms=terms, r_noncoop=r_noncoop)


def deferred_acceptance(profile: PreferenceProfile) -> Matching:
    """Secondary-proposing deferred acceptance, round by round.

    Each round every unmatched secondary with untried primaries proposes
    to its next choice; each primary keeps the best acceptable proposal
    seen so far (possibly bumping its current holder) and rejects the
    rest. Runs until no proposals are made; every secondary proposes to
    each primary at most once, so at most ``n_pu * n_su`` proposals occur.
    """
    su_prefs, pu_prefs = profile.su_prefs, profile.pu_prefs
    n_pu, n_su = len(pu_prefs), len(su_prefs)
    _validate_prefs(su_prefs, n_pu, "su_prefs", "primary")
    _validate_prefs(pu_prefs, n_su, "pu_prefs", "secondary")
    pu_rank = [{j: r for r, j in enumerate(prefs)} for prefs in pu_prefs]

    pu_of_su: list[int | None] = [UNMATCHED] * n_su
    su_of_pu: list[int | None] = [UNMATCHED] * n_pu
    next_choice = [0] * n_su
    proposal_count = 0

    while True:
        proposals: dict[int, list[int]] = {}
        for j in range(n_su):
            if pu_of_su[j] is UNMATCHED and next_choice[j] < len(su_prefs[j]):
                i = su_prefs[j][next_choice[j]]
                next_choice[j] += 1
                proposal_count += 1
                proposals.setdefault(i, []).append(j)
        if not proposals:
            break
        for i, applicants in proposals.items():
            candidates = [j for j in applicants if j in pu_rank[i]]
            incumbent = su_of_pu[i]
            if incumbent is not None:
                candidates.append(incumbent)
            if not candidates:
                continue
            best = min(candidates, key=pu_rank[i].__getitem__)
            if incumbent is not None and incumbent != best:
                pu_of_su[incumbent] = UNMATCHED
            su_of_pu[i] = best
            pu_of_su[best] = i

    return Matching(pu_of_su=pu_of_su, su_of_pu=su_of_pu, proposal_count=proposal_count)


def find_blocking_pairs(matching: Matching, profile: PreferenceProfile) -> list[tuple[int, int]]:
    """All pairs that would jointly defect from ``matching``, in index order.

    A pair ``(i, j)`` blocks when each side finds the other acceptable and
    strictly prefers it to its current situation (any acceptable partner
    beats being unmatched). Empty for a stable matching.
    """
    su_prefs, pu_prefs = profile.su_prefs, profile.pu_prefs
    n_pu, n_su = len(pu_prefs), len(su_prefs)
    if len(matching.su_of_pu) != n_pu or len(matching.pu_of_su) != n_su:
        raise ValueError("matching size does not agree with the preference profile")
    su_rank = [{i: r for r, i in enumerate(prefs)} for prefs in su_prefs]
    pu_rank = [{j: r for r, j in enumerate(prefs)} for prefs in pu_prefs]

    blocking = []
    for i in range(n_pu):
        for j in pu_prefs[i]:
            if i not in su_rank[j]:
                continue
            if _prefers(pu_rank[i], j, matching.su_of_pu[i]) and _prefers(
                su_rank[j], i, matching.pu_of_su[j]
            ):
                blocking.append((i, j))
    blocking.sort()
    return blocking


def enumerate_stable_matchings(profile: PreferenceProfile) -> list[Matching]:
    """Every stable matching of the profile, by exhaustive search.

    Intended as a ground-truth oracle for small instances; refuses
    anything larger than 8 participants per side.
    """
    su_prefs, pu_prefs = profile.su_prefs, profile.pu_prefs
    n_pu, n_su = len(pu_prefs), len(su_prefs)
    if n_pu > _ENUMERATION_LIMIT or n_su > _ENUMERATION_LIMIT:
        raise ValueError(
            f"refusing to enumerate a {n_pu} x {n_su} instance; "
            f"both sides must have at most {_ENUMERATION_LIMIT} participants"
        )
    su_rank = [{i: r for r, i in enumerate(prefs)} for prefs in su_prefs]
    pu_rank = [{j: r for r, j in enumerate(prefs)} for prefs in pu_prefs]
    mutual = [
        [i for i in su_prefs[j] if j in pu_rank[i]] for j in range(n_su)
    ]
    mutual_pairs = [(i, j) for j in range(n_su) for i in mutual[j]]

    stable: list[Matching] = []
    pu_of_su: list[int | None] = [UNMATCHED] * n_su
    used = [False] * n_pu

    def extend(j: int) -> None:
        if j == n_su:
            su_of_pu: list[int | None] = [UNMATCHED] * n_pu
            for sj, si in enumerate(pu_of_su):
                if si is not None:
                    su_of_pu[si] = sj
            for bi, bj in mutual_pairs:
                if _prefers(pu_rank[bi], bj, su_of_pu[bi]) and _prefers(
                    su_rank[bj], bi, pu_of_su[bj]
                ):
                    return  # (bi, bj) blocks
            stable.append(Matching(pu_of_su=list(pu_of_su), su_of_pu=su_of_pu))
            return
        for i in mutual[j]:
            if not used[i]:
                used[i] = True
                pu_of_su[j] = i
                extend(j + 1)
                used[i] = False
        pu_of_su[j] = UNMATCHED
        extend(j + 1)

    extend(0)
    return stable


def _prefers(rank: dict[int, int], candidate: int, current: int | None) -> bool:
    """Strict preference for ``candidate`` over the current partner (or none)."""
    if current is None or current not in rank:
        return True
    return rank[candidate] < rank[current]


def _validate_prefs(prefs: list[list[int]], limit: int, name: str, partner: str) -> None:
    for k, ranking in enumerate(prefs):
        if len(set(ranking)) != len(ranking):
            raise ValueError(f"{name}[{k}] contains duplicate entries")
        for idx in ranking:
            if not isinstance(idx, (int, np.integer)) or isinstance(idx, bool) or not 0 <= idx < limit:
                raise ValueError(f"{name}[{k}] references invalid {partner} index {idx!r}")
