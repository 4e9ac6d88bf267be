"""Policies: a schedule plus relief rules, household mode, and collection rate.

Ships four presets:

- ``flat_2008``: the 10% flat tax in force since 2008, with the 2016 relief
  catalogue, taxing members individually on annual bases.
- ``proposed_progressive``: a per-member monthly scale: 0% below 300 BGN,
  10% from 300, 12% from 1,000, 14% from 2,000, 16% from 4,000, 18% from
  6,000 and 20% from 8,000 up. Slab by default, marginal available. Band
  bounds are normalized to lower-bound-inclusive brackets (a quoted
  "1,001-2,000" band starts at 1,000.01 only because of whole-lev wording;
  stotinka granularity would otherwise leave a 1-lev gap).
- ``nit_2016``: negative income tax against a social minimum of 300 BGN per
  member per month; income above the minimum is taxed at a flat 10%.
- ``socialist_1970s``: a 1970s wage tax: monthly threshold of 120 BGN,
  slab rates from 8% (120 BGN) to 14% (over 340 BGN), 99% collection. Only
  the 8% and 14% endpoints are documented; the interior steps here are an
  even 1-point staircase and are illustrative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any

from .errors import InputError
from .household import (
    Household,
    NitParams,
    individual_tax,
    nit_tax,
    per_member_tax,
    pooled_tax,
)
from .money import BP_SCALE, bgn, from_bgn, to_bgn
from .reliefs import ReliefRules
from .schedule import (
    ANNUAL,
    MARGINAL,
    MONTHLY,
    SLAB,
    Schedule,
    schedule,
    schedule_from_record,
    schedule_to_record,
    validate_schedule,
)

INDIVIDUAL = "individual"
NIT = "nit"
PER_MEMBER = "per_member"
HOUSEHOLD_MODES = (INDIVIDUAL, NIT, PER_MEMBER)

_MODE_PERIOD = {INDIVIDUAL: ANNUAL, NIT: MONTHLY, PER_MEMBER: MONTHLY}


@dataclass(frozen=True)
class Policy:
    name: str
    schedule: Schedule
    household_mode: str
    relief_rules: ReliefRules | None = None
    social_minimum_per_capita: int | None = None
    transfer_slope_bp: int = BP_SCALE
    collection_rate_bp: int = BP_SCALE
    pooled: bool = False


def validate_policy(p: Policy) -> list[str]:
    violations = [f"schedule: {v}" for v in validate_schedule(p.schedule)]
    if p.household_mode not in HOUSEHOLD_MODES:
        violations.append(f"unknown household mode {p.household_mode!r}")
    else:
        wanted = _MODE_PERIOD[p.household_mode]
        if p.schedule.period != wanted:
            violations.append(
                f"{p.household_mode} mode needs a {wanted} schedule, got {p.schedule.period}"
            )
    if p.household_mode == NIT:
        if p.social_minimum_per_capita is None:
            violations.append("nit mode needs social_minimum_per_capita")
        elif p.social_minimum_per_capita < 0:
            violations.append("social_minimum_per_capita must be >= 0")
    if not 0 <= p.transfer_slope_bp <= BP_SCALE:
        violations.append("transfer_slope_bp out of range 0..10000")
    if not 0 <= p.collection_rate_bp <= BP_SCALE:
        violations.append("collection_rate_bp out of range 0..10000")
    if p.pooled and p.household_mode != PER_MEMBER:
        violations.append("pooled applies to per_member mode only")
    return violations


def require_valid_policy(p: Policy) -> Policy:
    violations = validate_policy(p)
    if violations:
        raise InputError(f"invalid policy {p.name!r}: " + "; ".join(violations))
    return p


def nit_params(p: Policy) -> NitParams:
    if p.social_minimum_per_capita is None:
        raise InputError(f"policy {p.name!r} has no social minimum")
    return NitParams(
        schedule=p.schedule,
        social_minimum_per_capita=p.social_minimum_per_capita,
        transfer_slope_bp=p.transfer_slope_bp,
    )


def household_tax(h: Household, p: Policy) -> int:
    """Monthly household tax under the policy's mode (stotinki, may be negative).

    Collection efficiency is not applied here; it scales aggregate revenue
    only.
    """
    if p.household_mode == INDIVIDUAL:
        return individual_tax(h, p.schedule, p.relief_rules)
    if p.household_mode == NIT:
        return nit_tax(h, nit_params(p))
    if p.household_mode == PER_MEMBER:
        if p.pooled:
            return pooled_tax(h, p.schedule)
        return per_member_tax(h, p.schedule)
    raise InputError(f"unknown household mode {p.household_mode!r}")


def scale_policy(p: Policy, factor: Fraction) -> Policy:
    """Multiply every bracket rate by ``factor`` (rounded to basis points)."""
    return replace(p, schedule=p.schedule.scaled(factor))


# --- presets -----------------------------------------------------------------

PROPOSED_BRACKETS = (
    (0, 0),
    (bgn(300), 1_000),
    (bgn(1_000), 1_200),
    (bgn(2_000), 1_400),
    (bgn(4_000), 1_600),
    (bgn(6_000), 1_800),
    (bgn(8_000), 2_000),
)

# Endpoints documented: 8% for 120-130 BGN, 14% over 340 BGN. The 42-lev
# interior steps are an even interpolation, not a sourced scale.
SOCIALIST_WAGE_BRACKETS = (
    (0, 0),
    (bgn(120), 800),
    (bgn(130), 900),
    (bgn(172), 1_000),
    (bgn(214), 1_100),
    (bgn(256), 1_200),
    (bgn(298), 1_300),
    (bgn(340), 1_400),
)


def flat_2008() -> Policy:
    return Policy(
        name="flat_2008",
        schedule=schedule(((0, 1_000),), mode=MARGINAL, period=ANNUAL),
        household_mode=INDIVIDUAL,
        relief_rules=ReliefRules(),
    )


def proposed_progressive(mode: str = SLAB) -> Policy:
    return Policy(
        name="proposed_progressive",
        schedule=schedule(PROPOSED_BRACKETS, mode=mode, period=MONTHLY),
        household_mode=PER_MEMBER,
    )


def nit_2016() -> Policy:
    return Policy(
        name="nit_2016",
        schedule=schedule(((0, 1_000),), mode=MARGINAL, period=MONTHLY),
        household_mode=NIT,
        social_minimum_per_capita=bgn(300),
    )


def socialist_1970s() -> Policy:
    return Policy(
        name="socialist_1970s",
        schedule=schedule(SOCIALIST_WAGE_BRACKETS, mode=SLAB, period=MONTHLY),
        household_mode=PER_MEMBER,
        collection_rate_bp=9_900,
    )


# Era side schedules, shipped as reference data and not wired into any preset:
# fee income of scientists/artists was taxed annually, "reaching up to 50 per
# cent for an annual income of over BGN 40,000" (interior rates unsourced);
# rents ran from 9% to 81% (no documented bounds); the childless paid a
# flat 10% "bachelor" surtax.
SOCIALIST_FEE_SCHEDULE = schedule(
    ((0, 1_400), (bgn(40_000), 5_000)), mode=MARGINAL, period=ANNUAL
)
SOCIALIST_RENT_SCHEDULE = schedule(
    ((0, 900), (bgn(40_000), 8_100)), mode=MARGINAL, period=ANNUAL
)
SOCIALIST_BACHELOR_SCHEDULE = schedule(((0, 1_000),), mode=MARGINAL, period=MONTHLY)

_PRESETS = {
    "flat_2008": flat_2008,
    "proposed_progressive": proposed_progressive,
    "nit_2016": nit_2016,
    "socialist_1970s": socialist_1970s,
}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def preset(name: str) -> Policy:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise InputError(
            f"unknown preset {name!r}; available: {', '.join(_PRESETS)}"
        ) from None
    return factory()


# --- serialization -----------------------------------------------------------

def relief_rules_to_record(rules: ReliefRules) -> dict[str, Any]:
    return {
        "voluntary_pension_cap_bp": rules.voluntary_pension_cap_bp,
        "insurance_cap_bp": rules.insurance_cap_bp,
        "donation_cap_bp": rules.donation_cap_bp,
        "mortgage_principal_cap_bgn": to_bgn(rules.mortgage_principal_cap),
        "child_relief_bgn": [to_bgn(v) for v in rules.child_relief],
        "disabled_child_relief_bgn": to_bgn(rules.disabled_child_relief),
        "reduced_capacity_relief_bgn": to_bgn(rules.reduced_capacity_relief),
        "reduced_capacity_threshold_pct": rules.reduced_capacity_threshold_pct,
    }


def relief_rules_from_record(record: dict[str, Any]) -> ReliefRules:
    try:
        child = record["child_relief_bgn"]
        if not isinstance(child, list) or len(child) != 3:
            raise InputError("child_relief_bgn must list three amounts")
        return ReliefRules(
            voluntary_pension_cap_bp=int(record["voluntary_pension_cap_bp"]),
            insurance_cap_bp=int(record["insurance_cap_bp"]),
            donation_cap_bp=int(record["donation_cap_bp"]),
            mortgage_principal_cap=from_bgn(record["mortgage_principal_cap_bgn"]),
            child_relief=tuple(from_bgn(v) for v in child),
            disabled_child_relief=from_bgn(record["disabled_child_relief_bgn"]),
            reduced_capacity_relief=from_bgn(record["reduced_capacity_relief_bgn"]),
            reduced_capacity_threshold_pct=int(record["reduced_capacity_threshold_pct"]),
        )
    except KeyError as missing:
        raise InputError(f"relief rules record missing {missing}") from None
    except InputError:
        raise
    except (TypeError, ValueError) as err:
        raise InputError(f"malformed relief rules record: {err}") from None


def policy_to_record(p: Policy) -> dict[str, Any]:
    return {
        "name": p.name,
        "household_mode": p.household_mode,
        "schedule": schedule_to_record(p.schedule),
        "relief_rules": None if p.relief_rules is None else relief_rules_to_record(p.relief_rules),
        "social_minimum_bgn": None
        if p.social_minimum_per_capita is None
        else to_bgn(p.social_minimum_per_capita),
        "transfer_slope_bp": p.transfer_slope_bp,
        "collection_rate_bp": p.collection_rate_bp,
        "pooled": p.pooled,
    }


def policy_from_record(record: dict[str, Any]) -> Policy:
    if not isinstance(record, dict):
        raise InputError("policy record must be an object")
    try:
        name = record["name"]
        mode = record["household_mode"]
        sched = schedule_from_record(record["schedule"])
    except KeyError as missing:
        raise InputError(f"policy record missing {missing}") from None
    if not isinstance(name, str) or not name:
        raise InputError("policy name must be a non-empty string")
    rules_record = record.get("relief_rules")
    minimum = record.get("social_minimum_bgn")
    try:
        p = Policy(
            name=name,
            schedule=sched,
            household_mode=mode,
            relief_rules=None if rules_record is None else relief_rules_from_record(rules_record),
            social_minimum_per_capita=None if minimum is None else from_bgn(minimum),
            transfer_slope_bp=int(record.get("transfer_slope_bp", BP_SCALE)),
            collection_rate_bp=int(record.get("collection_rate_bp", BP_SCALE)),
            pooled=bool(record.get("pooled", False)),
        )
    except InputError:
        raise
    except (TypeError, ValueError) as err:
        raise InputError(f"malformed policy record: {err}") from None
    return require_valid_policy(p)


def policy_dumps(p: Policy) -> str:
    """Canonical policy-file text: stable key order, two-space indent."""
    return json.dumps(policy_to_record(p), indent=2) + "\n"


def policy_loads(text: str) -> Policy:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"policy file is not valid JSON: {err}") from None
    return policy_from_record(record)
