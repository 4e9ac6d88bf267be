"""2+N households and the household-level tax routes.

Three routes, all returning a monthly tax in stotinki:

- ``individual_tax``: each member is taxed alone on an annualized base
  (monthly income x 12) after personal reliefs, under an annual schedule;
  the member's annual tax is converted back to a monthly figure with a
  single half-up rounding.
- ``nit_tax``: the household is taxed jointly against a social minimum of
  ``social_minimum_per_capita`` x household size. Below the minimum the tax
  is the (negative) shortfall, i.e. a transfer; above it the schedule
  applies to the excess only.
- ``per_member_tax``: each member's monthly income goes through a monthly
  schedule and the per-member taxes are summed. A pooled variant taxes the
  joint household income as one base instead.

Policy-level dispatch across the routes lives in the policy module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, PopulationError
from .money import BP_SCALE, bgn, round_half_up
from .reliefs import NO_CLAIMS, ReliefClaims, ReliefRules, apply_reliefs, validate_claims
from .schedule import ANNUAL, MONTHLY, Schedule, compute_tax, require_valid, tax_exact

ADULT = "adult"
CHILD = "child"
ROLES = (ADULT, CHILD)

MONTHS_PER_YEAR = 12


@dataclass(frozen=True)
class Member:
    """One person: a role, a monthly income in stotinki, and relief claims."""

    id: str
    role: str
    monthly_income: int
    claims: ReliefClaims = NO_CLAIMS


@dataclass(frozen=True)
class Household:
    id: str
    members: tuple[Member, ...]

    @property
    def monthly_income(self) -> int:
        return sum(m.monthly_income for m in self.members)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class NitParams:
    """Negative-income-tax parameters.

    ``transfer_slope_bp`` sets the claw-back slope below the minimum in basis
    points; 10,000 means the transfer covers the full shortfall.
    """

    schedule: Schedule
    social_minimum_per_capita: int = bgn(300)
    transfer_slope_bp: int = BP_SCALE


def validate_household(h: Household) -> list[str]:
    violations: list[str] = []
    if not h.members:
        violations.append("household has no members")
    if not any(m.role == ADULT for m in h.members):
        violations.append("household has no adult")
    seen: set[str] = set()
    for m in h.members:
        if m.role not in ROLES:
            violations.append(f"member {m.id}: unknown role {m.role!r}")
        if m.monthly_income < 0:
            violations.append(f"member {m.id}: negative income")
        if m.id in seen:
            violations.append(f"duplicate member id {m.id}")
        seen.add(m.id)
        for problem in validate_claims(m.claims):
            violations.append(f"member {m.id}: {problem}")
    return violations


def require_valid_household(h: Household) -> Household:
    violations = validate_household(h)
    if violations:
        raise PopulationError(
            f"invalid household {h.id}: " + "; ".join(violations), household_id=h.id
        )
    return h


def household_minimum(h: Household, params: NitParams) -> int:
    """Monthly social minimum for the whole household (stotinki)."""
    return params.social_minimum_per_capita * h.size


def nit_taxable_excess(h: Household, params: NitParams) -> int:
    """Monthly income above the household minimum; 0 when below it."""
    return max(0, h.monthly_income - household_minimum(h, params))


def nit_tax(h: Household, params: NitParams) -> int:
    """Monthly household tax; negative values are transfers."""
    if params.schedule.period != MONTHLY:
        raise InputError("NIT schedules apply monthly")
    if params.social_minimum_per_capita < 0:
        raise InputError("social minimum must be >= 0")
    income = h.monthly_income
    minimum = household_minimum(h, params)
    if income < minimum:
        shortfall = income - minimum
        if params.transfer_slope_bp == BP_SCALE:
            return shortfall
        return round_half_up(Fraction(params.transfer_slope_bp * shortfall, BP_SCALE))
    return compute_tax(params.schedule, income - minimum)


def per_member_tax(h: Household, s: Schedule) -> int:
    """Sum of each member's monthly tax under a monthly schedule."""
    if s.period != MONTHLY:
        raise InputError("per-member schedules apply monthly")
    return sum(compute_tax(s, m.monthly_income) for m in h.members)


def pooled_tax(h: Household, s: Schedule) -> int:
    """Joint household income taxed as a single monthly base."""
    if s.period != MONTHLY:
        raise InputError("pooled schedules apply monthly")
    return compute_tax(s, h.monthly_income)


def member_annual_tax_exact(m: Member, s: Schedule, rules: ReliefRules | None) -> Fraction:
    """Pre-rounding annual tax for one member under an annual schedule."""
    if s.period != ANNUAL:
        raise InputError("individual taxation needs an annual schedule")
    annual_base = m.monthly_income * MONTHS_PER_YEAR
    if rules is None:
        taxable = annual_base
    else:
        taxable = apply_reliefs(annual_base, m.claims, rules).taxable_base
    return tax_exact(s, taxable)


def individual_tax(h: Household, s: Schedule, rules: ReliefRules | None) -> int:
    """Monthly household total of per-member individual taxation.

    Each member's exact annual tax is divided by 12 and rounded once, so a
    constant monthly income yields the quoted monthly figure with no
    annualization drift.
    """
    require_valid(s)
    total = 0
    for m in h.members:
        total += round_half_up(member_annual_tax_exact(m, s, rules) / MONTHS_PER_YEAR)
    return total
