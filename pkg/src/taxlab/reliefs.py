"""Statutory relief rules (Bulgarian 2016 catalogue) applied to an annual base.

The deductions, with their default parameters:

- voluntary pension contributions, capped at 10% of the annual base
- voluntary health/life insurance, capped at 10% of the annual base
- purchase of insurable length of service near retirement, uncapped
- donations, capped at 5% of the annual base
- mortgage interest for eligible young families, prorated to the first
  100,000 BGN of principal
- children: 200 / 400 / 600 BGN for 1 / 2 / 3+ children
- disabled children: 2,000 BGN each (counted separately from the scale above)
- reduced working capacity of 50% or more: 7,920 BGN

Percentage caps are all computed against the pre-relief annual base,
independently, and floored to whole stotinki. The taxable base never goes
below zero.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .errors import InputError
from .money import BP_SCALE, bgn, round_half_up
from .schedule import ANNUAL, Schedule, compute_tax


@dataclass(frozen=True)
class ReliefRules:
    """Relief parameters. Money in stotinki, percentage caps in basis points."""

    voluntary_pension_cap_bp: int = 1_000
    insurance_cap_bp: int = 1_000
    donation_cap_bp: int = 500
    mortgage_principal_cap: int = bgn(100_000)
    child_relief: tuple[int, int, int] = (bgn(200), bgn(400), bgn(600))
    disabled_child_relief: int = bgn(2_000)
    reduced_capacity_relief: int = bgn(7_920)
    reduced_capacity_threshold_pct: int = 50


@dataclass(frozen=True)
class ReliefClaims:
    """One person's claims for a year. Money in stotinki; money flows are
    per-year amounts."""

    voluntary_pension_paid: int = 0
    insurance_paid: int = 0
    service_purchase_paid: int = 0
    donations: int = 0
    mortgage_interest_paid: int = 0
    mortgage_principal: int = 0
    children: int = 0
    disabled_children: int = 0
    reduced_capacity_pct: int = 0
    young_family_eligible: bool = False


NO_CLAIMS = ReliefClaims()


@dataclass(frozen=True)
class ReliefBreakdown:
    """Itemized deductions (stotinki) and the resulting taxable base."""

    annual_base: int
    voluntary_pension: int
    insurance: int
    service_purchase: int
    donations: int
    mortgage_interest: int
    children: int
    disabled_children: int
    reduced_capacity: int
    taxable_base: int

    @property
    def total_deductions(self) -> int:
        return (
            self.voluntary_pension
            + self.insurance
            + self.service_purchase
            + self.donations
            + self.mortgage_interest
            + self.children
            + self.disabled_children
            + self.reduced_capacity
        )


def validate_claims(claims: ReliefClaims) -> list[str]:
    violations: list[str] = []
    for f in fields(claims):
        value = getattr(claims, f.name)
        if f.name == "young_family_eligible":
            continue
        if value < 0:
            violations.append(f"{f.name} must be >= 0, got {value}")
    if claims.disabled_children > claims.children:
        violations.append("disabled_children cannot exceed children")
    if claims.reduced_capacity_pct > 100:
        violations.append("reduced_capacity_pct must be <= 100")
    return violations


def _pct_cap(annual_base: int, cap_bp: int) -> int:
    # Floored so the capped deduction never exceeds the exact percentage.
    return annual_base * cap_bp // BP_SCALE


def apply_reliefs(annual_base: int, claims: ReliefClaims, rules: ReliefRules) -> ReliefBreakdown:
    """Deduct every claimed relief from ``annual_base`` (stotinki/year)."""
    if annual_base < 0:
        raise InputError(f"annual base must be >= 0, got {annual_base}")
    violations = validate_claims(claims)
    if violations:
        raise InputError("invalid relief claims: " + "; ".join(violations))

    pension = min(claims.voluntary_pension_paid, _pct_cap(annual_base, rules.voluntary_pension_cap_bp))
    insurance = min(claims.insurance_paid, _pct_cap(annual_base, rules.insurance_cap_bp))
    donations = min(claims.donations, _pct_cap(annual_base, rules.donation_cap_bp))

    mortgage = 0
    if claims.young_family_eligible and claims.mortgage_interest_paid > 0:
        if claims.mortgage_principal <= rules.mortgage_principal_cap:
            mortgage = claims.mortgage_interest_paid
        else:
            # Interest prorated to the capped share of the principal.
            mortgage = round_half_up(
                Fraction(claims.mortgage_interest_paid * rules.mortgage_principal_cap,
                         claims.mortgage_principal)
            )

    plain_children = claims.children - claims.disabled_children
    child_relief = rules.child_relief[min(plain_children, 3) - 1] if plain_children > 0 else 0
    disabled_relief = claims.disabled_children * rules.disabled_child_relief

    reduced = (
        rules.reduced_capacity_relief
        if claims.reduced_capacity_pct >= rules.reduced_capacity_threshold_pct
        else 0
    )

    breakdown = ReliefBreakdown(
        annual_base=annual_base,
        voluntary_pension=pension,
        insurance=insurance,
        service_purchase=claims.service_purchase_paid,
        donations=donations,
        mortgage_interest=mortgage,
        children=child_relief,
        disabled_children=disabled_relief,
        reduced_capacity=reduced,
        taxable_base=0,
    )
    taxable = max(0, annual_base - breakdown.total_deductions)
    return replace(breakdown, taxable_base=taxable)


def annual_tax(annual_base: int, claims: ReliefClaims, rules: ReliefRules, s: Schedule) -> int:
    """Tax on the post-relief base under an annual schedule."""
    if s.period != ANNUAL:
        raise InputError("annual_tax requires an annual schedule; annualize monthly bounds x12")
    return compute_tax(s, apply_reliefs(annual_base, claims, rules).taxable_base)
