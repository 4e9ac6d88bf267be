"""Command line interface.

Exit codes: 0 on success, 1 on validation problems (bad flags, malformed
files, unknown presets, unreachable solver targets), 2 on I/O failures.
Output for a fixed command line and seed is byte-identical across runs.
"""

from __future__ import annotations

import csv
import functools
import json
import sys

import click

from .errors import InputError, SolverError, UnreachableTargetError
from .lab import (
    comparison_to_record,
    compare,
    revenue_neutral_scale,
    solve_to_record,
    sweep,
    sweep_to_record,
)
from .metrics import MetricsReport, build_report, report_to_record
from .money import fraction_from_decimal, fraction_to_decimal, from_bgn, to_bgn
from .policy import Policy, policy_dumps, policy_loads, preset, preset_names
from .population import SynthesisParams, export_population_text, load_population, synthesize


def main() -> None:
    cli(prog_name="taxlab")


def _reported(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except (InputError, UnreachableTargetError, SolverError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(1)
        except OSError as err:
            click.echo(f"io error: {err}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def cli() -> None:
    """Tax-policy microsimulation over 2+N households."""


_population_options = [
    click.option("--population", "population_path", type=click.Path(), default=None,
                 help="Population CSV file."),
    click.option("--synth", "synth_spec", default=None,
                 help="Synthesize instead: seed=S,n=N[,median=B,sigma=F,floor=B"
                      ",whole_bgn=0|1,child_relief=0|1,capacity_share=F]."),
]

_policy_options = [
    click.option("--preset", "presets", multiple=True,
                 help="Bundled policy name (repeatable)."),
    click.option("--policy-file", "policy_files", multiple=True, type=click.Path(),
                 help="Policy JSON file (repeatable)."),
]


def _with(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return wrap


def _parse_synth(spec: str) -> SynthesisParams:
    fields: dict[str, str] = {}
    for part in spec.split(","):
        if "=" not in part:
            raise InputError(f"synth spec entries look like key=value, got {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {
        "seed", "n", "median", "sigma", "floor", "whole_bgn", "child_relief",
        "capacity_share",
    }
    if unknown:
        raise InputError(f"unknown synth keys: {', '.join(sorted(unknown))}")
    if "seed" not in fields or "n" not in fields:
        raise InputError("synth spec needs at least seed= and n=")
    try:
        return SynthesisParams(
            household_count=int(fields["n"]),
            seed=int(fields["seed"]),
            median_income_bgn=float(fields.get("median", 900.0)),
            income_sigma=float(fields.get("sigma", 0.75)),
            income_floor=from_bgn(fields["floor"]) if "floor" in fields else 0,
            whole_bgn=fields.get("whole_bgn", "1") == "1",
            claim_child_relief=fields.get("child_relief", "1") == "1",
            reduced_capacity_share=float(fields.get("capacity_share", 0.0)),
        )
    except ValueError as err:
        raise InputError(f"bad synth value: {err}") from None


def _households(population_path: str | None, synth_spec: str | None):
    if (population_path is None) == (synth_spec is None):
        raise InputError("give exactly one population source: --population or --synth")
    if population_path is not None:
        return load_population(population_path)
    return synthesize(_parse_synth(synth_spec))


def _policies(presets: tuple[str, ...], policy_files: tuple[str, ...]) -> list[Policy]:
    policies = [preset(name) for name in presets]
    for path in policy_files:
        with open(path, encoding="utf-8") as handle:
            policies.append(policy_loads(handle.read()))
    if not policies:
        raise InputError("give at least one policy: --preset or --policy-file")
    return policies


def _bgn_flag(text: str, flag: str) -> int:
    try:
        return from_bgn(text)
    except ValueError as err:
        raise InputError(f"{flag}: {err}") from None


def _percent(bp: int) -> str:
    return f"{bp // 100}.{bp % 100:02d}%"


def _print_report(r: MetricsReport) -> None:
    click.echo(f"policy {r.policy_name} ({r.period})")
    click.echo(f"  households {r.household_count}  persons {r.person_count}")
    click.echo(f"  total income   {to_bgn(r.total_income)} BGN")
    click.echo(
        f"  total tax      {to_bgn(r.total_tax)} BGN"
        f"  revenue {to_bgn(r.total_revenue)} BGN"
        f" (collection {_percent(r.collection_rate_bp)})"
    )
    if r.gini_pre is not None and r.gini_post is not None:
        click.echo(
            f"  gini pre {fraction_to_decimal(r.gini_pre, 6)}"
            f"  post {fraction_to_decimal(r.gini_post, 6)}"
            f"  redistribution {fraction_to_decimal(r.redistribution, 6)}"
        )
    for label, shares in (("pre", r.top_shares_pre), ("post", r.top_shares_post)):
        if shares:
            rendered = "  ".join(
                f"top {fraction_to_decimal(p * 100, 0)}%:"
                f" {fraction_to_decimal(share, 6)}"
                for p, share in shares
            )
            click.echo(f"  shares {label}  {rendered}")
    rates = "  ".join(
        "-" if rate is None else fraction_to_decimal(rate * 100, 2)
        for rate in r.decile_rates
    )
    click.echo(f"  decile effective rates (%)  {rates}")


_REPORT_CSV_COLUMNS = (
    "policy", "households", "persons", "total_income_bgn", "total_tax_bgn",
    "total_revenue_bgn", "gini_pre", "gini_post", "redistribution",
)


def _emit_reports(reports: list[MetricsReport], fmt: str) -> None:
    if fmt == "table":
        for r in reports:
            _print_report(r)
        return
    if fmt == "jsonl":
        for r in reports:
            click.echo(json.dumps(report_to_record(r), separators=(",", ":")))
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(_REPORT_CSV_COLUMNS)
    for r in reports:
        record = report_to_record(r)
        writer.writerow([record[column] for column in _REPORT_CSV_COLUMNS])


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["table", "jsonl", "csv"]), default="table",
    help="Output format.",
)


@cli.command()
@_with(_population_options)
@_with(_policy_options)
@_format_option
@_reported
def simulate(population_path, synth_spec, presets, policy_files, fmt) -> None:
    """Evaluate one or more policies over a population."""
    households = _households(population_path, synth_spec)
    policies = _policies(presets, policy_files)
    _emit_reports([build_report(households, p) for p in policies], fmt)


@cli.command(name="compare")
@_with(_population_options)
@_with(_policy_options)
@_format_option
@_reported
def compare_command(population_path, synth_spec, presets, policy_files, fmt) -> None:
    """Compare policies; the first one is the baseline."""
    households = _households(population_path, synth_spec)
    policies = _policies(presets, policy_files)
    if len(policies) < 2:
        raise InputError("compare needs at least two policies")
    result = compare(households, policies)
    if fmt == "jsonl":
        record = comparison_to_record(result)
        for report in record["reports"]:
            click.echo(json.dumps(report, separators=(",", ":")))
        for pair in record["against_baseline"]:
            click.echo(json.dumps(pair, separators=(",", ":")))
        return
    if fmt == "csv":
        _emit_reports(list(result.reports), fmt)
        return
    _emit_reports(list(result.reports), fmt)
    for w in result.against_baseline:
        click.echo(
            f"{w.policy_b} vs {w.policy_a}:"
            f" winners {w.winners}  losers {w.losers}  unchanged {w.unchanged}"
        )


@cli.command(name="sweep")
@_with(_population_options)
@_with(_policy_options)
@click.option("--parameter", required=True,
              help="collection_rate, rate_scale, social_minimum or population_scale.")
@click.option("--values", "values_text", required=True,
              help="Comma-separated decimal values.")
@_format_option
@_reported
def sweep_command(population_path, synth_spec, presets, policy_files,
                  parameter, values_text, fmt) -> None:
    """Evaluate one policy across a series of parameter values."""
    households = _households(population_path, synth_spec)
    policies = _policies(presets, policy_files)
    if len(policies) != 1:
        raise InputError("sweep takes exactly one policy")
    try:
        values = [fraction_from_decimal(v.strip()) for v in values_text.split(",") if v.strip()]
    except ValueError as err:
        raise InputError(f"--values: {err}") from None
    points = sweep(households, policies[0], parameter, values)
    if fmt == "jsonl":
        for record in sweep_to_record(points):
            click.echo(json.dumps(record, separators=(",", ":")))
        return
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(("parameter", "value") + _REPORT_CSV_COLUMNS)
        for p in points:
            record = report_to_record(p.report)
            writer.writerow(
                [p.parameter, fraction_to_decimal(p.value, 6)]
                + [record[column] for column in _REPORT_CSV_COLUMNS]
            )
        return
    for p in points:
        click.echo(f"{p.parameter} = {fraction_to_decimal(p.value, 6)}")
        _print_report(p.report)


@cli.command(name="solve")
@_with(_population_options)
@_with(_policy_options)
@click.option("--target", "target_text", required=True,
              help="Target monthly revenue in BGN.")
@click.option("--tolerance", "tolerance_text", default="1.00",
              help="Revenue tolerance in BGN (default 1.00).")
@_format_option
@_reported
def solve_command(population_path, synth_spec, presets, policy_files,
                  target_text, tolerance_text, fmt) -> None:
    """Find the uniform rate scaling that meets a revenue target."""
    households = _households(population_path, synth_spec)
    policies = _policies(presets, policy_files)
    if len(policies) != 1:
        raise InputError("solve takes exactly one policy")
    result = revenue_neutral_scale(
        policies[0],
        households,
        _bgn_flag(target_text, "--target"),
        _bgn_flag(tolerance_text, "--tolerance"),
    )
    record = solve_to_record(result)
    if fmt == "jsonl":
        click.echo(json.dumps(record, separators=(",", ":")))
        return
    click.echo(f"scale {record['scale']}")
    click.echo(f"  revenue {record['revenue_bgn']} BGN (target {record['target_bgn']})")
    click.echo(f"  residual {record['residual_bgn']} BGN within {record['tolerance_bgn']}")
    click.echo(f"  iterations {record['iterations']}")


@cli.command(name="synth")
@click.option("--seed", type=int, required=True)
@click.option("--households", "household_count", type=int, required=True)
@click.option("--median", type=float, default=900.0, help="Median income, BGN.")
@click.option("--sigma", type=float, default=0.75, help="Log-scale spread.")
@click.option("--floor", "floor_text", default=None, help="Income floor, BGN.")
@click.option("--stotinki-incomes", is_flag=True,
              help="Keep stotinka-level draws instead of whole levs.")
@click.option("--child-relief/--no-child-relief", default=True,
              help="Claim child reliefs on the first adult.")
@click.option("--capacity-share", type=float, default=0.0,
              help="Share of adults with a reduced-capacity claim.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write CSV here instead of standard output.")
@_reported
def synth_command(seed, household_count, median, sigma, floor_text,
                  stotinki_incomes, child_relief, capacity_share, out_path) -> None:
    """Generate a synthetic population CSV."""
    params = SynthesisParams(
        household_count=household_count,
        seed=seed,
        median_income_bgn=median,
        income_sigma=sigma,
        income_floor=_bgn_flag(floor_text, "--floor") if floor_text else 0,
        whole_bgn=not stotinki_incomes,
        claim_child_relief=child_relief,
        reduced_capacity_share=capacity_share,
    )
    text = export_population_text(synthesize(params))
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


@cli.command(name="presets")
@click.option("--export", "export_name", default=None,
              help="Print one preset as a policy JSON file.")
@_reported
def presets_command(export_name) -> None:
    """List bundled policies, or export one."""
    if export_name is not None:
        click.echo(policy_dumps(preset(export_name)), nl=False)
        return
    for name in preset_names():
        p = preset(name)
        brackets = len(p.schedule.brackets)
        click.echo(
            f"{name}: {p.household_mode}, {p.schedule.mode} {p.schedule.period}"
            f" schedule, {brackets} bracket{'s' if brackets != 1 else ''},"
            f" collection {_percent(p.collection_rate_bp)}"
        )


@cli.command(name="serve")
@click.option("--host", default=None, help="Bind address.")
@click.option("--port", type=int, default=None, help="Bind port.")
@_reported
def serve_command(host, port) -> None:
    """Run the HTTP API (TAXLAB_LISTEN=host:port sets the default bind)."""
    import os

    import uvicorn

    from .api import create_app

    listen = os.environ.get("TAXLAB_LISTEN", "127.0.0.1:8000")
    if ":" not in listen:
        raise InputError("TAXLAB_LISTEN must look like host:port")
    env_host, env_port = listen.rsplit(":", 1)
    try:
        resolved_port = port if port is not None else int(env_port)
    except ValueError:
        raise InputError(f"bad port in TAXLAB_LISTEN: {env_port!r}") from None
    uvicorn.run(create_app(), host=host or env_host, port=resolved_port)
