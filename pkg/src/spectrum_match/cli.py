"""Command-line front end: single trials, population sweeps, self-checks.

Option values resolve in precedence order: explicit flag, then the
``SPECTRUM_MATCH_SEED`` environment variable (seed only), then the
``--config`` file, then built-in defaults. Exit codes: 0 success,
1 usage or validation or I/O error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channel import SystemParams, sample_scenario
from .matching import (
    build_preferences,
    deferred_acceptance,
    enumerate_stable_matchings,
    find_blocking_pairs,
)
from .sim import SweepConfig, emit_results, run_sweep

__all__ = ["ENV_SEED", "parse_and_dispatch", "main"]

ENV_SEED = "SPECTRUM_MATCH_SEED"

_CONFIG_KEYS = {
    "pus",
    "sus",
    "trials",
    "seed",
    "pp",
    "pmax",
    "cost",
    "noise",
    "sigma",
    "out",
    "format",
    "threads",
    "instances",
    "max_size",
}


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems with exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` (default: process args) and run the subcommand."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    """Console entry point."""
    raise SystemExit(parse_and_dispatch(sys.argv[1:]))


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pp", type=float, help="primary transmit power, linear units (default 1.0)")
    common.add_argument("--pmax", type=float, help="secondary transmit power cap, linear units (default 1.0)")
    common.add_argument("--cost", type=float, help="secondary cost per unit of transmit energy (default 0.2)")
    common.add_argument("--noise", type=float, help="receiver noise power, linear units (default 0.1)")
    common.add_argument("--sigma", type=float, help="Rayleigh amplitude scale of every link (default 0.5)")
    common.add_argument("--seed", type=_nonneg_int, help=f"master seed (default: ${ENV_SEED}, then 0)")
    common.add_argument("--config", metavar="PATH", help="flat 'key = value' file supplying option defaults")

    parser = _Parser(
        prog="spectrum-match",
        description="Simulate cooperative spectrum sharing: negotiated relaying contracts plus stable matching.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="{trial,sweep,verify}")

    trial = sub.add_parser("trial", parents=[common], help="run one scenario and print the outcome")
    trial.add_argument("--pus", type=_nonneg_int, help="number of primary pairs (default 1)")
    trial.add_argument("--sus", type=_nonneg_int, help="number of secondary pairs (default 1)")
    trial.set_defaults(handler=_cmd_trial)

    sweep = sub.add_parser("sweep", parents=[common], help="average many trials over a population grid")
    sweep.add_argument("--pus", type=_parse_int_list, help="primary counts: '20,30' or start:stop:step (default 20,30)")
    sweep.add_argument("--sus", type=_parse_int_list, help="secondary counts: '5,10' or start:stop:step (default 5:50:5)")
    sweep.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per grid point (default 1000)")
    sweep.add_argument("--out", metavar="PATH", help="output path, '-' for stdout (default '-')")
    sweep.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    sweep.add_argument("--threads", type=_positive_int, help="worker processes (default: machine CPU count)")
    sweep.set_defaults(handler=_cmd_sweep)

    verify = sub.add_parser("verify", parents=[common], help="check matchings against a brute-force oracle")
    verify.add_argument("--instances", type=_positive_int, help="random instances to check (default 500)")
    verify.add_argument("--max-size", type=_positive_int, help="largest population per side, at most 8 (default 5)")
    verify.set_defaults(handler=_cmd_verify)

    return parser


def _cmd_trial(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    params = _resolve_params(args, cfg, n_pu=_opt(args, cfg, "pus", int, 1), n_su=_opt(args, cfg, "sus", int, 1))
    seed = _resolve_seed(args, cfg)

    scenario = sample_scenario(params, seed)
    profile = build_preferences(scenario)
    match = deferred_acceptance(profile)

    print(
        f"trial: n_pu={params.n_pu} n_su={params.n_su} seed={seed} "
        f"pp={params.p_primary:g} pmax={params.p_max:g} cost={params.cost_per_energy:g} "
        f"noise={params.noise_power:g} sigma={params.rayleigh_sigma:g} (rates in nats/slot)"
    )
    for i in range(params.n_pu):
        direct = float(profile.r_noncoop[i])
        j = match.su_of_pu[i]
        if j is None:
            print(f"PU {i}: direct rate {direct:.9g}, unmatched, utility {direct:.9g}")
        else:
            t = profile.terms.at(i, j)
            print(
                f"PU {i}: direct rate {direct:.9g}, matched SU {j} "
                f"(alpha={t.alpha:.6f} beta={t.beta:.6f} p_su={t.p_su:.6f}), "
                f"utility {t.r_coop_pu:.9g}"
            )
    for j in range(params.n_su):
        i = match.pu_of_su[j]
        if i is None:
            print(f"SU {j}: unmatched, utility 0")
        else:
            print(f"SU {j}: matched PU {i}, utility {float(profile.terms.u_su[i, j]):.9g}")
    matched = sum(1 for i in match.pu_of_su if i is not None)
    print(
        f"matched {matched} of {min(params.n_pu, params.n_su)} possible pairs "
        f"in {match.proposal_count} proposals"
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    config = SweepConfig(
        base=_resolve_params(args, cfg, n_pu=0, n_su=0),
        n_pu_list=_opt(args, cfg, "pus", _parse_int_list, [20, 30]),
        n_su_list=_opt(args, cfg, "sus", _parse_int_list, list(range(5, 51, 5))),
        trials=_opt(args, cfg, "trials", int, 1000),
        master_seed=_resolve_seed(args, cfg),
    )
    workers = _opt(args, cfg, "threads", int, None) or os.cpu_count()
    rows = run_sweep(config, workers=workers)

    out = _opt(args, cfg, "out", str, "-")
    fmt = _opt(args, cfg, "format", str, "csv")
    if out == "-":
        emit_results(rows, fmt, sys.stdout)
    else:
        emit_results(rows, fmt, out)
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    instances = _opt(args, cfg, "instances", int, 500)
    max_size = _opt(args, cfg, "max_size", int, 5)
    if not 1 <= max_size <= 8:
        raise ValueError(f"max-size must lie in [1, 8], got {max_size}")
    seed = _resolve_seed(args, cfg)
    base = _resolve_params(args, cfg, n_pu=1, n_su=1)

    rng = np.random.default_rng(seed)
    blocking = outside = suboptimal = 0
    for _ in range(instances):
        n_pu = int(rng.integers(1, max_size + 1))
        n_su = int(rng.integers(1, max_size + 1))
        scenario_seed = int(rng.integers(0, 2**63))
        scenario = sample_scenario(replace(base, n_pu=n_pu, n_su=n_su), scenario_seed)
        profile = build_preferences(scenario)
        match = deferred_acceptance(profile)

        blocking += len(find_blocking_pairs(match, profile))
        stable = enumerate_stable_matchings(profile)
        if match not in stable:
            outside += 1
        su_rank = [{i: r for r, i in enumerate(prefs)} for prefs in profile.su_prefs]

        def rank_of(j: int, partner: int | None) -> int:
            return len(profile.su_prefs[j]) if partner is None else su_rank[j][partner]

        da_ranks = [rank_of(j, match.pu_of_su[j]) for j in range(n_su)]
        if any(
            da_ranks[j] > rank_of(j, other.pu_of_su[j])
            for other in stable
            for j in range(n_su)
        ):
            suboptimal += 1

    if blocking == 0 and outside == 0 and suboptimal == 0:
        print(
            f"verified {instances} instances (sizes up to {max_size}): "
            "0 blocking pairs, SU-optimality holds"
        )
        return 0
    print(
        f"verification FAILED over {instances} instances: {blocking} blocking pairs, "
        f"{outside} matchings outside the stable set, {suboptimal} SU-optimality violations"
    )
    return 2


def _resolve_params(args: argparse.Namespace, cfg: dict[str, str], n_pu: int, n_su: int) -> SystemParams:
    return SystemParams(
        n_pu=n_pu,
        n_su=n_su,
        p_primary=_opt(args, cfg, "pp", float, 1.0),
        p_max=_opt(args, cfg, "pmax", float, 1.0),
        cost_per_energy=_opt(args, cfg, "cost", float, 0.2),
        noise_power=_opt(args, cfg, "noise", float, 0.1),
        rayleigh_sigma=_opt(args, cfg, "sigma", float, 0.5),
    )


def _resolve_seed(args: argparse.Namespace, cfg: dict[str, str]) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return _cast_value("seed", env.strip(), _nonneg_int)
    if "seed" in cfg:
        return _cast_value("seed", cfg["seed"], _nonneg_int)
    return 0


def _opt(args: argparse.Namespace, cfg: dict[str, str], key: str, cast: Callable, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in cfg:
        return _cast_value(key, cfg[key], cast)
    return default


def _cast_value(key: str, value: str, cast: Callable):
    try:
        return cast(value)
    except ValueError as exc:
        raise ValueError(f"invalid value {value!r} for option {key}: {exc}") from None


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if not value:
            raise ValueError(f"{path}:{lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def _parse_int_list(text: str) -> list[int]:
    """Population list: comma-separated values or an inclusive start:stop:step range."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (int(p) for p in parts)
            if step <= 0:
                raise ValueError("step must be positive")
            values = list(range(start, stop + 1, step))
        else:
            values = [int(item) for item in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse population list {text!r}: {exc}") from None
    if not values:
        raise ValueError(f"population list {text!r} is empty")
    if any(v < 0 for v in values):
        raise ValueError(f"population list {text!r} contains negative entries")
    return values


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"expected a nonnegative integer, got {value}")
    return value
