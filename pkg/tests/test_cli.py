import json

import pytest
from click.testing import CliRunner

from taxlab.cli import cli
from taxlab.population import load_population


@pytest.fixture()
def runner():
    return CliRunner()


def test_simulate_family_under_nit(runner, family_csv_path):
    result = runner.invoke(
        cli, ["simulate", "--population", str(family_csv_path), "--preset", "nit_2016"]
    )
    assert result.exit_code == 0
    assert "revenue -300.00 BGN" in result.output


def test_simulate_requires_a_population_source(runner):
    result = runner.invoke(cli, ["simulate", "--preset", "flat_2008"])
    assert result.exit_code == 1
    assert "population source" in result.output


def test_simulate_rejects_both_sources(runner, family_csv_path):
    result = runner.invoke(
        cli,
        [
            "simulate",
            "--population", str(family_csv_path),
            "--synth", "seed=1,n=10",
            "--preset", "flat_2008",
        ],
    )
    assert result.exit_code == 1


def test_simulate_is_byte_identical(runner):
    args = ["simulate", "--synth", "seed=7,n=1000", "--preset", "flat_2008"]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.exit_code == second.exit_code == 0
    assert first.output == second.output


def test_simulate_unknown_preset_exits_1(runner):
    result = runner.invoke(
        cli, ["simulate", "--synth", "seed=1,n=10", "--preset", "flat_2009"]
    )
    assert result.exit_code == 1
    assert "unknown preset" in result.output


def test_simulate_missing_file_exits_2(runner):
    result = runner.invoke(
        cli,
        ["simulate", "--population", "/no/such/file.csv", "--preset", "flat_2008"],
    )
    assert result.exit_code == 2


def test_simulate_jsonl(runner):
    result = runner.invoke(
        cli,
        [
            "simulate",
            "--synth", "seed=3,n=50",
            "--preset", "flat_2008",
            "--preset", "nit_2016",
            "--format", "jsonl",
        ],
    )
    assert result.exit_code == 0
    lines = result.output.strip().split("\n")
    assert len(lines) == 2
    records = [json.loads(line) for line in lines]
    assert [r["policy"] for r in records] == ["flat_2008", "nit_2016"]


def test_simulate_csv_header(runner):
    result = runner.invoke(
        cli,
        ["simulate", "--synth", "seed=3,n=50", "--preset", "flat_2008",
         "--format", "csv"],
    )
    assert result.exit_code == 0
    assert result.output.startswith("policy,households,persons,total_income_bgn")


def test_bad_synth_spec(runner):
    for spec in ("seed=1", "n=10", "seed=x,n=10", "seed=1,n=10,unknown=3"):
        result = runner.invoke(
            cli, ["simulate", "--synth", spec, "--preset", "flat_2008"]
        )
        assert result.exit_code == 1, spec


def test_compare_needs_two_policies(runner):
    result = runner.invoke(
        cli, ["compare", "--synth", "seed=1,n=20", "--preset", "flat_2008"]
    )
    assert result.exit_code == 1
    ok = runner.invoke(
        cli,
        ["compare", "--synth", "seed=1,n=20", "--preset", "flat_2008",
         "--preset", "proposed_progressive"],
    )
    assert ok.exit_code == 0
    assert "proposed_progressive vs flat_2008" in ok.output


def test_solve_jsonl(runner):
    result = runner.invoke(
        cli,
        ["solve", "--synth", "seed=3,n=50", "--preset", "flat_2008",
         "--target", "0.00", "--format", "jsonl"],
    )
    assert result.exit_code == 0
    record = json.loads(result.output)
    assert record["scale"] == "0.000000000"
    assert record["revenue_bgn"] == "0.00"


def test_solve_unreachable_exits_1(runner):
    result = runner.invoke(
        cli,
        ["solve", "--synth", "seed=3,n=50", "--preset", "flat_2008",
         "--target", "99999999.00"],
    )
    assert result.exit_code == 1
    assert "outside the reachable" in result.output


def test_sweep_csv(runner):
    result = runner.invoke(
        cli,
        ["sweep", "--synth", "seed=3,n=50", "--preset", "flat_2008",
         "--parameter", "collection_rate", "--values", "0.9,1.0",
         "--format", "csv"],
    )
    assert result.exit_code == 0
    lines = result.output.strip().split("\n")
    assert lines[0].startswith("parameter,value,policy")
    assert len(lines) == 3


def test_synth_writes_loadable_csv(runner, tmp_path):
    out = tmp_path / "pop.csv"
    result = runner.invoke(
        cli, ["synth", "--seed", "5", "--households", "30", "--out", str(out)]
    )
    assert result.exit_code == 0
    households = load_population(out)
    assert len(households) == 30


def test_synth_stdout_deterministic(runner):
    args = ["synth", "--seed", "5", "--households", "30"]
    assert runner.invoke(cli, args).output == runner.invoke(cli, args).output


def test_presets_listing_and_export(runner):
    listing = runner.invoke(cli, ["presets"])
    assert listing.exit_code == 0
    for name in ("flat_2008", "proposed_progressive", "nit_2016", "socialist_1970s"):
        assert name in listing.output

    exported = runner.invoke(cli, ["presets", "--export", "nit_2016"])
    assert exported.exit_code == 0
    record = json.loads(exported.output)
    assert record["name"] == "nit_2016"
    assert record["social_minimum_bgn"] == "300.00"


def test_policy_file_round_trip(runner, tmp_path):
    exported = runner.invoke(cli, ["presets", "--export", "proposed_progressive"])
    policy_path = tmp_path / "prog.json"
    policy_path.write_text(exported.output)
    result = runner.invoke(
        cli,
        ["simulate", "--synth", "seed=3,n=50", "--policy-file", str(policy_path)],
    )
    assert result.exit_code == 0
    assert "policy proposed_progressive" in result.output
