"""Command-line behavior: flags, config files, env fallback, exit codes."""

from __future__ import annotations

import csv
import json

from spectrum_match import (
    SystemParams,
    build_preferences,
    deferred_acceptance,
    noncooperative_rate,
    sample_scenario,
)
from spectrum_match.cli import ENV_SEED, parse_and_dispatch


def run_cli(args, capsys):
    code = parse_and_dispatch(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_sweep_writes_the_requested_grid(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code, _, err = run_cli(
        ["sweep", "--pus", "2,3", "--sus", "1:3:1", "--trials", "4", "--seed", "1",
         "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert "wrote 6 rows" in err
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [(r["n_pu"], r["n_su"]) for r in rows] == [
        ("2", "1"), ("2", "2"), ("2", "3"), ("3", "1"), ("3", "2"), ("3", "3"),
    ]
    assert all(r["trials"] == "4" and r["seed"] == "1" for r in rows)


def test_sweep_defaults_to_stdout(capsys):
    code, out, _ = run_cli(
        ["sweep", "--pus", "2", "--sus", "2", "--trials", "3", "--seed", "0"], capsys
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("n_pu,n_su,trials,seed,")
    assert len(lines) == 2


def test_sweep_json_format(capsys):
    code, out, _ = run_cli(
        ["sweep", "--pus", "2", "--sus", "2,3", "--trials", "3", "--format", "json"],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    assert [entry["n_su"] for entry in payload] == [2, 3]


def test_sweep_reads_config_file(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "# headline grid, shrunk\n"
        "pus = 2\n"
        "sus = 1,2\n"
        "trials = 4\n"
        "seed = 8\n"
        "noise = 0.2\n"
    )
    out_flags = tmp_path / "flags.csv"
    out_config = tmp_path / "config.csv"
    code_a, _, _ = run_cli(
        ["sweep", "--pus", "2", "--sus", "1,2", "--trials", "4", "--seed", "8",
         "--noise", "0.2", "--out", str(out_flags)],
        capsys,
    )
    code_b, _, _ = run_cli(
        ["sweep", "--config", str(cfg), "--out", str(out_config)], capsys
    )
    assert code_a == code_b == 0
    assert out_flags.read_bytes() == out_config.read_bytes()


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("pus = 2\nsus = 2\ntrials = 9\n")
    code, out, _ = run_cli(
        ["sweep", "--config", str(cfg), "--trials", "3"], capsys
    )
    assert code == 0
    assert out.split("\n")[1].split(",")[2] == "3"


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("puss = 2\n")
    code, _, err = run_cli(["sweep", "--config", str(cfg)], capsys)
    assert code == 1
    assert "puss" in err and "bad.cfg:1" in err


def test_missing_config_file_fails_cleanly(tmp_path, capsys):
    code, _, err = run_cli(
        ["sweep", "--config", str(tmp_path / "nope.cfg")], capsys
    )
    assert code == 1
    assert "error" in err


def test_seed_env_fallback_and_flag_priority(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(ENV_SEED, "9")
    code, out_env, _ = run_cli(["sweep", "--pus", "2", "--sus", "2", "--trials", "3"], capsys)
    assert code == 0
    monkeypatch.delenv(ENV_SEED)
    _, out_flag, _ = run_cli(
        ["sweep", "--pus", "2", "--sus", "2", "--trials", "3", "--seed", "9"], capsys
    )
    assert out_env == out_flag
    # explicit flag wins over the environment
    monkeypatch.setenv(ENV_SEED, "1234")
    _, out_override, _ = run_cli(
        ["sweep", "--pus", "2", "--sus", "2", "--trials", "3", "--seed", "9"], capsys
    )
    assert out_override == out_flag


def test_env_seed_must_be_valid(monkeypatch, capsys):
    monkeypatch.setenv(ENV_SEED, "not-a-seed")
    code, _, err = run_cli(["sweep", "--pus", "2", "--sus", "2", "--trials", "3"], capsys)
    assert code == 1
    assert "seed" in err


def test_trial_reports_direct_rate_for_lonely_primary(capsys):
    code, out, _ = run_cli(["trial", "--pus", "1", "--sus", "0", "--seed", "3"], capsys)
    assert code == 0
    params = SystemParams(n_pu=1, n_su=0)
    direct = noncooperative_rate(sample_scenario(params, 3), 0)
    assert f"direct rate {direct:.9g}" in out
    assert "unmatched" in out
    assert "matched 0 of 0 possible" in out


def test_trial_agrees_with_library_matching(capsys):
    code, out, _ = run_cli(["trial", "--pus", "2", "--sus", "6", "--seed", "7"], capsys)
    assert code == 0
    params = SystemParams(n_pu=2, n_su=6)
    match = deferred_acceptance(build_preferences(sample_scenario(params, 7)))
    for j, i in enumerate(match.pu_of_su):
        if i is None:
            assert f"SU {j}: unmatched" in out
        else:
            assert f"SU {j}: matched PU {i}," in out
    assert f"in {match.proposal_count} proposals" in out


def test_trial_honors_parameter_flags(capsys):
    code, out, _ = run_cli(
        ["trial", "--pus", "1", "--sus", "1", "--seed", "3", "--noise", "0.7",
         "--pp", "2.5", "--sigma", "0.9"],
        capsys,
    )
    assert code == 0
    params = SystemParams(n_pu=1, n_su=1, p_primary=2.5, noise_power=0.7, rayleigh_sigma=0.9)
    direct = noncooperative_rate(sample_scenario(params, 3), 0)
    assert f"direct rate {direct:.9g}" in out


def test_verify_reports_clean_oracle_run(capsys):
    code, out, _ = run_cli(
        ["verify", "--instances", "25", "--max-size", "4", "--seed", "9"], capsys
    )
    assert code == 0
    assert "0 blocking pairs, SU-optimality holds" in out


def test_verify_rejects_oversized_request(capsys):
    code, _, err = run_cli(["verify", "--max-size", "9"], capsys)
    assert code == 1
    assert "max-size" in err


def test_unknown_flag_exits_one(capsys):
    code, _, err = run_cli(["sweep", "--bogus", "1"], capsys)
    assert code == 1
    assert "usage" in err


def test_missing_subcommand_exits_one(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 1
    assert "usage" in err


def test_invalid_parameter_value_exits_one(capsys):
    code, _, err = run_cli(["sweep", "--pus", "2", "--sus", "2", "--noise", "0"], capsys)
    assert code == 1
    assert "noise" in err


def test_malformed_population_list_exits_one(capsys):
    code, _, err = run_cli(["sweep", "--sus", "5:50"], capsys)
    assert code == 1
    assert "5:50" in err


def test_help_exits_zero(capsys):
    code, out, _ = run_cli(["--help"], capsys)
    assert code == 0
    assert "usage" in out
    for name in ("trial", "sweep", "verify"):
        assert name in out


def test_threads_flag_does_not_change_output(capsys):
    args = ["sweep", "--pus", "2", "--sus", "2", "--trials", "6", "--seed", "2"]
    _, out_one, _ = run_cli(args + ["--threads", "1"], capsys)
    _, out_two, _ = run_cli(args + ["--threads", "2"], capsys)
    assert out_one == out_two
