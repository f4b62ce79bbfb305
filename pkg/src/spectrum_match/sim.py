"""Monte Carlo driver: trials, population sweeps, and result emission.

A trial samples one scenario, negotiates all contracts, runs the
matching, and realizes payoffs: a matched primary earns its contract
rate, an unmatched one its direct rate; a matched secondary earns its
contract utility, an unmatched one nothing. A sweep averages trials at
every requested population size.

Reproducibility contract: the scenario seed of a trial is a pure
function of ``(master_seed, n_pu, n_su, trial_index)``, and per-trial
results are reduced in trial order, so a sweep's output is byte-stable
for a given config regardless of worker count.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import repeat
from typing import IO, Iterable

import numpy as np

from .channel import SystemParams, sample_scenario
from .matching import build_preferences, deferred_acceptance

__all__ = [
    "CSV_FIELDS",
    "SweepConfig",
    "TrialResult",
    "SweepRow",
    "trial_seed",
    "run_trial",
    "run_point",
    "summarize_point",
    "run_sweep",
    "emit_results",
]

CSV_FIELDS = (
    "n_pu",
    "n_su",
    "trials",
    "seed",
    "avg_pu_utility",
    "avg_pu_noncoop",
    "avg_su_utility",
    "matched_frac_pu",
    "matched_frac_su",
)

_CHUNK = 32  # trials per worker task


@dataclass(frozen=True)
class SweepConfig:
    """A grid of population sizes to simulate with shared base parameters.

    ``base.n_pu`` and ``base.n_su`` are placeholders; each grid point
    overrides them with one entry of ``n_pu_list`` x ``n_su_list``.
    """

    base: SystemParams
    n_pu_list: tuple[int, ...]
    n_su_list: tuple[int, ...]
    trials: int = 1000
    master_seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_pu_list", "n_su_list"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must not be empty")
            for v in values:
                if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                    raise ValueError(f"{name} entries must be nonnegative integers, got {v!r}")
            object.__setattr__(self, name, values)
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.master_seed, (int, np.integer)) or self.master_seed < 0:
            raise ValueError(f"master_seed must be a nonnegative integer, got {self.master_seed!r}")


@dataclass(frozen=True)
class TrialResult:
    """Raw sums of one trial, ready for exact aggregation."""

    n_pu: int
    n_su: int
    sum_pu_utility: float
    sum_pu_noncoop: float
    sum_su_utility: float
    matched: int
    min_pu_gain: float  # smallest realized-minus-direct gap across primaries


@dataclass(frozen=True)
class SweepRow:
    """One output row of a sweep; field order is the CSV column order."""

    n_pu: int
    n_su: int
    trials: int
    seed: int
    avg_pu_utility: float
    avg_pu_noncoop: float
    avg_su_utility: float
    matched_frac_pu: float
    matched_frac_su: float


def trial_seed(master_seed: int, n_pu: int, n_su: int, trial_index: int) -> int:
    """Scenario seed of one sweep trial.

    Hashes the four keys through ``np.random.SeedSequence`` so every
    (population, trial) cell of a sweep gets an independent stream that
    is reproducible from the master seed alone.
    """
    ss = np.random.SeedSequence([master_seed, n_pu, n_su, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(params: SystemParams, seed: int) -> TrialResult:
    """Sample, negotiate, match, and realize payoffs for one scenario."""
    scenario = sample_scenario(params, seed)
    profile = build_preferences(scenario)
    match = deferred_acceptance(profile)

    realized = profile.r_noncoop.copy()
    for i in range(params.n_pu):
        j = match.su_of_pu[i]
        if j is not None:
            realized[i] = profile.terms.r_coop_pu[i, j]

    sum_su = 0.0
    matched = 0
    for j in range(params.n_su):
        i = match.pu_of_su[j]
        if i is not None:
            sum_su += float(profile.terms.u_su[i, j])
            matched += 1

    min_gain = float((realized - profile.r_noncoop).min()) if params.n_pu else 0.0
    return TrialResult(
        n_pu=params.n_pu,
        n_su=params.n_su,
        sum_pu_utility=float(realized.sum()),
        sum_pu_noncoop=float(profile.r_noncoop.sum()),
        sum_su_utility=sum_su,
        matched=matched,
        min_pu_gain=min_gain,
    )


def _run_chunk(params: SystemParams, seeds: list[int]) -> list[TrialResult]:
    return [run_trial(params, seed) for seed in seeds]


def run_point(
    params: SystemParams, trials: int, master_seed: int, workers: int | None = None
) -> list[TrialResult]:
    """All trial results of one population point, in trial order.

    ``workers`` above 1 fans the trials out over processes in fixed
    chunks; results come back reassembled in trial order, so the output
    does not depend on the worker count.
    """
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    seeds = [trial_seed(master_seed, params.n_pu, params.n_su, t) for t in range(trials)]
    if workers is None or workers <= 1:
        return _run_chunk(params, seeds)
    chunks = [seeds[k : k + _CHUNK] for k in range(0, len(seeds), _CHUNK)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, repeat(params), chunks))
    return [result for part in parts for result in part]


def summarize_point(
    params: SystemParams, trials: int, master_seed: int, results: list[TrialResult]
) -> SweepRow:
    """Reduce one point's trial results to a sweep row (population averages).

    Averages are per participant per trial; an empty side yields 0.0 for
    its averages and fractions. Sums run in trial order for exact
    reproducibility.
    """
    if len(results) != trials:
        raise ValueError(f"expected {trials} results, got {len(results)}")
    pu_population = params.n_pu * trials
    su_population = params.n_su * trials
    sum_pu = sum(r.sum_pu_utility for r in results)
    sum_nc = sum(r.sum_pu_noncoop for r in results)
    sum_su = sum(r.sum_su_utility for r in results)
    matched = sum(r.matched for r in results)
    return SweepRow(
        n_pu=params.n_pu,
        n_su=params.n_su,
        trials=trials,
        seed=master_seed,
        avg_pu_utility=sum_pu / pu_population if pu_population else 0.0,
        avg_pu_noncoop=sum_nc / pu_population if pu_population else 0.0,
        avg_su_utility=sum_su / su_population if su_population else 0.0,
        matched_frac_pu=matched / pu_population if pu_population else 0.0,
        matched_frac_su=matched / su_population if su_population else 0.0,
    )


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """Simulate every population point of the config grid, row per point.

    Rows follow the config order: ``n_pu_list`` outer, ``n_su_list``
    inner.
    """
    rows = []
    for n_pu in config.n_pu_list:
        for n_su in config.n_su_list:
            params = replace(config.base, n_pu=n_pu, n_su=n_su)
            results = run_point(params, config.trials, config.master_seed, workers=workers)
            rows.append(summarize_point(params, config.trials, config.master_seed, results))
    return rows


def emit_results(rows: Iterable[SweepRow], format: str, destination: str | IO[str]) -> None:
    """Write sweep rows as CSV or JSON, byte-stable for identical rows.

    Floats are rendered with 9 significant digits in both formats (JSON
    values are rounded through the same rendering), lines end with a
    bare newline, and the CSV header is exactly ``CSV_FIELDS``.
    ``destination`` may be a path or an open text stream.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("rows must not be empty")
    if format == "csv":
        write = _write_csv
    elif format == "json":
        write = _write_json
    else:
        raise ValueError(f"unknown format {format!r}; expected 'csv' or 'json'")
    if hasattr(destination, "write"):
        write(rows, destination)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            write(rows, fh)


def _float_repr(value: float) -> str:
    return format(value, ".9g")


def _write_csv(rows: list[SweepRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(
            [
                row.n_pu,
                row.n_su,
                row.trials,
                row.seed,
                _float_repr(row.avg_pu_utility),
                _float_repr(row.avg_pu_noncoop),
                _float_repr(row.avg_su_utility),
                _float_repr(row.matched_frac_pu),
                _float_repr(row.matched_frac_su),
            ]
        )


def _write_json(rows: list[SweepRow], fh: IO[str]) -> None:
    payload = []
    for row in rows:
        payload.append(
            {
                "n_pu": row.n_pu,
                "n_su": row.n_su,
                "trials": row.trials,
                "seed": row.seed,
                "avg_pu_utility": float(_float_repr(row.avg_pu_utility)),
                "avg_pu_noncoop": float(_float_repr(row.avg_pu_noncoop)),
                "avg_su_utility": float(_float_repr(row.avg_su_utility)),
                "matched_frac_pu": float(_float_repr(row.matched_frac_pu)),
                "matched_frac_su": float(_float_repr(row.matched_frac_su)),
            }
        )
    json.dump(payload, fh, indent=2)
    fh.write("\n")
