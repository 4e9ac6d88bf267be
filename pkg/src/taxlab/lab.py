"""Policy experiments: revenue-neutral scaling, comparisons, parameter sweeps.

The solver bisects on a uniform multiplier applied to every bracket rate.
Rates are scaled as exact rationals during the search (no re-rounding to
whole basis points), so revenue moves in 1-stotinka steps and is monotone in
the multiplier; only an exported policy rounds its rates back to basis
points. Per-household numerators are scale-free and get precomputed once,
which keeps each bisection step at integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .errors import InputError, SolverError, UnreachableTargetError
from .household import (
    Household,
    household_minimum,
    member_annual_tax_exact,
    require_valid_household,
)
from .metrics import (
    MetricsReport,
    WinnersLosers,
    build_report,
    report_to_record,
    winners_losers,
    winners_to_record,
)
from .money import BP_SCALE, fraction_to_decimal, round_half_up, to_bgn
from .policy import (
    INDIVIDUAL,
    NIT,
    PER_MEMBER,
    Policy,
    household_tax,
    nit_params,
    require_valid_policy,
    scale_policy,
)
from .population import scale_population
from .reliefs import ReliefBreakdown, apply_reliefs
from .schedule import BracketSlice, bracket_slices, compute_tax, tax_numerator

MAX_BISECTION_STEPS = 64


def _linear_terms(households: Sequence[Household], p: Policy) -> tuple[list[tuple[int, int]], int]:
    """Decompose total tax at rate scale s into rounding units plus a constant.

    Each unit is a (numerator, denominator) pair whose tax at scale s is
    round_half_up(s * numerator / denominator); the constant collects NIT
    transfers, which rates do not touch. Valid because bracket portions and
    relief deductions depend on the base only, never on the rates.
    """
    units: list[tuple[int, int]] = []
    constant = 0
    if p.household_mode == INDIVIDUAL:
        for h in households:
            for m in h.members:
                annual_base = m.monthly_income * 12
                if p.relief_rules is None:
                    taxable = annual_base
                else:
                    taxable = apply_reliefs(annual_base, m.claims, p.relief_rules).taxable_base
                units.append((tax_numerator(p.schedule, taxable), BP_SCALE * 12))
        return units, constant
    if p.household_mode == NIT:
        params = nit_params(p)
        for h in households:
            income = h.monthly_income
            minimum = household_minimum(h, params)
            if income < minimum:
                constant += household_tax(h, p)
            else:
                units.append((tax_numerator(p.schedule, income - minimum), BP_SCALE))
        return units, constant
    if p.household_mode == PER_MEMBER:
        for h in households:
            if p.pooled:
                units.append((tax_numerator(p.schedule, h.monthly_income), BP_SCALE))
            else:
                for m in h.members:
                    units.append((tax_numerator(p.schedule, m.monthly_income), BP_SCALE))
        return units, constant
    raise InputError(f"unknown household mode {p.household_mode!r}")


def _revenue_at(
    units: Sequence[tuple[int, int]], constant: int, collection_rate_bp: int, s: Fraction
) -> int:
    num, den = s.numerator, s.denominator
    total = constant
    for unit_num, unit_den in units:
        x = num * unit_num
        d = den * unit_den
        total += (2 * x + d) // (2 * d)
    return round_half_up(Fraction(total * collection_rate_bp, BP_SCALE))


@dataclass(frozen=True)
class SolveResult:
    scale: Fraction
    revenue: int
    target: int
    tolerance: int
    iterations: int

    @property
    def residual(self) -> int:
        return self.revenue - self.target


def revenue_neutral_scale(
    base_policy: Policy,
    households: Sequence[Household],
    target_revenue: int,
    tolerance: int = 100,
) -> SolveResult:
    """Find the uniform rate multiplier whose monthly revenue hits the target.

    Searches s in [0, s_max] where s_max caps the top scaled rate at 100%.
    Revenue is a monotone step function of s, so the target is met on an
    interval; the solver bisects both edges of that interval and returns its
    midpoint, which centers the answer instead of leaning on whichever
    rounding step the search hit first. ``tolerance`` is in stotinki and
    doubles as the convergence knob: each edge search narrows its interval
    below tolerance / max(1, total income) before the residual check.
    """
    require_valid_policy(base_policy)
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    ordered = sorted(households, key=lambda h: h.id)
    units, constant = _linear_terms(ordered, base_policy)

    def rev(s: Fraction) -> int:
        return _revenue_at(units, constant, base_policy.collection_rate_bp, s)

    max_rate = base_policy.schedule.max_rate_bp()
    if max_rate == 0:
        flat = rev(Fraction(0))
        if abs(flat - target_revenue) <= tolerance:
            return SolveResult(Fraction(1), flat, target_revenue, tolerance, 0)
        raise UnreachableTargetError(
            "all rates are zero; revenue is fixed at "
            f"{to_bgn(flat)} BGN and cannot reach {to_bgn(target_revenue)}"
        )

    s_max = Fraction(BP_SCALE, max_rate)
    rev_lo, rev_hi = rev(Fraction(0)), rev(s_max)
    if rev_lo > rev_hi:
        raise SolverError("revenue decreased between scale 0 and the maximum scale")
    if target_revenue < rev_lo - tolerance or target_revenue > rev_hi + tolerance:
        raise UnreachableTargetError(
            f"target {to_bgn(target_revenue)} BGN outside the reachable revenue range"
            f" [{to_bgn(rev_lo)}, {to_bgn(rev_hi)}] for scales in [0, {s_max}]"
        )
    if rev_lo >= target_revenue:
        return SolveResult(Fraction(0), rev_lo, target_revenue, tolerance, 0)
    if rev_hi <= target_revenue:
        return SolveResult(s_max, rev_hi, target_revenue, tolerance, 0)

    total_income = sum(h.monthly_income for h in ordered)
    width_target = Fraction(tolerance, max(1, total_income))
    step_budget = MAX_BISECTION_STEPS // 2
    iterations = 0

    def edge(above_counts: bool) -> Fraction:
        # Boundary between rev(s) "below target" and "at or above" it; with
        # above_counts=False, between "at or below" and "above". Monotone
        # rev makes either predicate a clean bisection split.
        nonlocal iterations
        lo, hi = Fraction(0), s_max
        for _ in range(step_budget):
            if hi - lo < width_target:
                break
            mid = (lo + hi) / 2
            iterations += 1
            value = rev(mid)
            reached = value >= target_revenue if above_counts else value > target_revenue
            if reached:
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2

    final = (edge(True) + edge(False)) / 2
    achieved = rev(final)
    if abs(achieved - target_revenue) > tolerance:
        raise SolverError(
            f"no scale within tolerance: best {achieved} vs target {target_revenue}"
            f" after {iterations} iterations"
        )
    return SolveResult(final, achieved, target_revenue, tolerance, iterations)


@dataclass(frozen=True)
class Comparison:
    reports: tuple[MetricsReport, ...]
    against_baseline: tuple[WinnersLosers, ...]


def compare(households: Sequence[Household], policies: Sequence[Policy]) -> Comparison:
    """Metrics per policy plus winners/losers of each policy vs the first."""
    if not policies:
        raise InputError("compare needs at least one policy")
    reports = tuple(build_report(households, p) for p in policies)
    baseline = policies[0]
    pairwise = tuple(winners_losers(households, baseline, p) for p in policies[1:])
    return Comparison(reports=reports, against_baseline=pairwise)


def _slice_records(slices: tuple[BracketSlice, ...]) -> list[dict]:
    return [
        {
            "lower_bgn": to_bgn(s.lower),
            "upper_bgn": None if s.upper is None else to_bgn(s.upper),
            "rate_bp": s.rate_bp,
            "amount_bgn": to_bgn(s.amount),
            "tax_bgn": to_bgn(s.tax),
        }
        for s in slices
    ]


def _relief_record(b: ReliefBreakdown) -> dict:
    return {
        "annual_base_bgn": to_bgn(b.annual_base),
        "voluntary_pension_bgn": to_bgn(b.voluntary_pension),
        "insurance_bgn": to_bgn(b.insurance),
        "service_purchase_bgn": to_bgn(b.service_purchase),
        "donations_bgn": to_bgn(b.donations),
        "mortgage_interest_bgn": to_bgn(b.mortgage_interest),
        "children_bgn": to_bgn(b.children),
        "disabled_children_bgn": to_bgn(b.disabled_children),
        "reduced_capacity_bgn": to_bgn(b.reduced_capacity),
        "total_deductions_bgn": to_bgn(b.total_deductions),
        "taxable_base_bgn": to_bgn(b.taxable_base),
    }


def household_breakdown(h: Household, p: Policy) -> dict:
    """Itemized monthly tax for one household: reliefs, bracket-by-bracket
    amounts, and the NIT transfer where applicable. Slice taxes are rounded
    per slice for display; ``tax_bgn`` carries the authoritative total."""
    require_valid_policy(p)
    require_valid_household(h)
    total = household_tax(h, p)
    record: dict = {
        "policy": p.name,
        "household_mode": p.household_mode,
        "period": "monthly",
        "household_id": h.id,
        "household_size": h.size,
        "monthly_income_bgn": to_bgn(h.monthly_income),
        "tax_bgn": to_bgn(total),
        "post_tax_income_bgn": to_bgn(h.monthly_income - total),
        "members": [],
        "nit": None,
        "pooled": None,
    }
    if p.household_mode == INDIVIDUAL:
        for m in h.members:
            annual_base = m.monthly_income * 12
            reliefs = None
            taxable = annual_base
            if p.relief_rules is not None:
                breakdown = apply_reliefs(annual_base, m.claims, p.relief_rules)
                reliefs = _relief_record(breakdown)
                taxable = breakdown.taxable_base
            exact = member_annual_tax_exact(m, p.schedule, p.relief_rules)
            record["members"].append(
                {
                    "member_id": m.id,
                    "role": m.role,
                    "monthly_income_bgn": to_bgn(m.monthly_income),
                    "annual_base_bgn": to_bgn(annual_base),
                    "reliefs": reliefs,
                    "taxable_base_bgn": to_bgn(taxable),
                    "slice_period": "annual",
                    "slices": _slice_records(bracket_slices(p.schedule, taxable)),
                    "annual_tax_bgn": to_bgn(round_half_up(exact)),
                    "monthly_tax_bgn": to_bgn(round_half_up(exact / 12)),
                }
            )
    elif p.household_mode == NIT:
        params = nit_params(p)
        minimum = household_minimum(h, params)
        excess = max(0, h.monthly_income - minimum)
        record["nit"] = {
            "social_minimum_per_capita_bgn": to_bgn(params.social_minimum_per_capita),
            "household_minimum_bgn": to_bgn(minimum),
            "taxable_excess_bgn": to_bgn(excess),
            "transfer_bgn": to_bgn(-total) if total < 0 else "0.00",
            "slice_period": "monthly",
            "slices": _slice_records(bracket_slices(p.schedule, excess)),
        }
    elif p.pooled:
        record["pooled"] = {
            "base_bgn": to_bgn(h.monthly_income),
            "slice_period": "monthly",
            "slices": _slice_records(bracket_slices(p.schedule, h.monthly_income)),
        }
    else:
        for m in h.members:
            record["members"].append(
                {
                    "member_id": m.id,
                    "role": m.role,
                    "monthly_income_bgn": to_bgn(m.monthly_income),
                    "slice_period": "monthly",
                    "slices": _slice_records(bracket_slices(p.schedule, m.monthly_income)),
                    "monthly_tax_bgn": to_bgn(compute_tax(p.schedule, m.monthly_income)),
                }
            )
    return record


SWEEP_PARAMETERS = ("collection_rate", "rate_scale", "social_minimum", "population_scale")


@dataclass(frozen=True)
class SweepPoint:
    parameter: str
    value: Fraction
    report: MetricsReport


def sweep(
    households: Sequence[Household],
    policy: Policy,
    parameter: str,
    values: Sequence[Fraction],
) -> tuple[SweepPoint, ...]:
    """One report per value of a policy knob or the population scale."""
    require_valid_policy(policy)
    points = []
    for value in values:
        population = households
        if parameter == "collection_rate":
            varied = replace(policy, collection_rate_bp=round_half_up(value * BP_SCALE))
        elif parameter == "rate_scale":
            varied = scale_policy(policy, Fraction(value))
        elif parameter == "social_minimum":
            varied = replace(policy, social_minimum_per_capita=round_half_up(value * 100))
        elif parameter == "population_scale":
            varied = policy
            population = scale_population(list(households), value)
        else:
            raise InputError(
                f"unknown sweep parameter {parameter!r};"
                f" expected one of {', '.join(SWEEP_PARAMETERS)}"
            )
        points.append(
            SweepPoint(
                parameter=parameter,
                value=Fraction(value),
                report=build_report(population, varied),
            )
        )
    return tuple(points)


SCALE_DIGITS = 9


def solve_to_record(result: SolveResult) -> dict:
    return {
        "scale": fraction_to_decimal(result.scale, SCALE_DIGITS),
        "revenue_bgn": to_bgn(result.revenue),
        "target_bgn": to_bgn(result.target),
        "residual_bgn": to_bgn(result.residual),
        "tolerance_bgn": to_bgn(result.tolerance),
        "iterations": result.iterations,
    }


def comparison_to_record(c: Comparison, lorenz_limit: int = 101) -> dict:
    baseline = c.reports[0]
    pairs = []
    for w, report in zip(c.against_baseline, c.reports[1:]):
        pair = winners_to_record(w)
        pair["revenue_delta_bgn"] = to_bgn(report.total_revenue - baseline.total_revenue)
        pairs.append(pair)
    return {
        "reports": [report_to_record(r, lorenz_limit) for r in c.reports],
        "against_baseline": pairs,
    }


def sweep_to_record(points: Sequence[SweepPoint], lorenz_limit: int = 101) -> list[dict]:
    return [
        {
            "parameter": p.parameter,
            "value": fraction_to_decimal(p.value, 6),
            "report": report_to_record(p.report, lorenz_limit),
        }
        for p in points
    ]
