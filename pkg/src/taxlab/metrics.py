"""Inequality and revenue statistics over pre- and post-tax distributions.

Everything here is exact rational arithmetic: the Gini coefficient uses the
mean-absolute-difference definition G = sum_ij |xi - xj| / (2 n^2 mu), which
equals one minus twice the area under the Lorenz polyline; the test suite
checks the two routes against each other as exact fractions.

Reports run on the monthly period: ``household_tax`` already converts
annual-mode policies to monthly figures, so revenue, deltas and post-tax
distributions are all BGN-per-month.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError, UndefinedMetricError
from .household import Household
from .money import BP_SCALE, fraction_to_decimal, round_half_up, to_bgn
from .policy import Policy, household_tax, require_valid_policy

# Historical context for top-share drift under low top rates: the US top 1%
# held about 8% of income in 1970 and about 17% in 2010. Reference data only;
# nothing computes against it.
US_TOP1_SHARE_REFERENCE = ((1970, Fraction(8, 100)), (2010, Fraction(17, 100)))

DEFAULT_TOP_SHARES = (Fraction(1, 100), Fraction(5, 100), Fraction(10, 100))


def _checked(incomes: Sequence[int]) -> int:
    if not incomes:
        raise InputError("income list is empty")
    if any(x < 0 for x in incomes):
        raise InputError("incomes must be >= 0")
    total = sum(incomes)
    if total == 0:
        raise UndefinedMetricError("all incomes are zero")
    return total


def gini(incomes: Sequence[int]) -> Fraction:
    """Gini coefficient as an exact rational in [0, 1)."""
    total = _checked(incomes)
    n = len(incomes)
    ordered = sorted(incomes)
    pair_diff_sum = 0
    running = 0
    for i, x in enumerate(ordered):
        pair_diff_sum += i * x - running
        running += x
    # pair_diff_sum is sum over i<j of (xj - xi); the full double sum is twice
    # that, and G = double_sum / (2 n^2 mu) = pair_diff_sum / (n * total).
    return Fraction(pair_diff_sum, n * total)


def lorenz_points(incomes: Sequence[int]) -> tuple[tuple[Fraction, Fraction], ...]:
    """Cumulative (population share, income share) pairs, ascending by income,
    anchored at (0, 0)."""
    total = _checked(incomes)
    n = len(incomes)
    points = [(Fraction(0), Fraction(0))]
    running = 0
    for i, x in enumerate(sorted(incomes), start=1):
        running += x
        points.append((Fraction(i, n), Fraction(running, total)))
    return tuple(points)


def lorenz_area(points: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    """Area under the Lorenz polyline by exact trapezoids."""
    area = Fraction(0)
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2
    return area


def gini_from_lorenz(points: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    """The independent Gini route: 1 - 2 x Lorenz area."""
    return 1 - 2 * lorenz_area(points)


def top_share(incomes: Sequence[int], p: Fraction) -> Fraction:
    """Share of total income held by the top ceil(p*n) earners.

    Ties are broken by descending income, then by position in the input list,
    so the result is stable for a fixed input order.
    """
    if not 0 < p <= 1:
        raise InputError(f"p must be in (0, 1], got {p}")
    total = _checked(incomes)
    n = len(incomes)
    k = math.ceil(p * Fraction(n))
    order = sorted(range(n), key=lambda i: (-incomes[i], i))
    return Fraction(sum(incomes[i] for i in order[:k]), total)


def decile_effective_rates(
    incomes: Sequence[int], taxes: Sequence[int]
) -> tuple[Fraction | None, ...]:
    """Tax paid over income earned per pre-tax decile (exact rationals).

    Households are sorted by pre-tax income (ties by position); decile d is
    the index slice [d*n//10, (d+1)*n//10). A decile with no households or no
    income reports None.
    """
    if len(incomes) != len(taxes):
        raise InputError("incomes and taxes must align")
    n = len(incomes)
    order = sorted(range(n), key=lambda i: (incomes[i], i))
    rates: list[Fraction | None] = []
    for d in range(10):
        members = order[d * n // 10 : (d + 1) * n // 10]
        income = sum(incomes[i] for i in members)
        if not members or income == 0:
            rates.append(None)
            continue
        rates.append(Fraction(sum(taxes[i] for i in members), income))
    return tuple(rates)


def _taxes_by_household(households: Sequence[Household], policy: Policy) -> list[int]:
    require_valid_policy(policy)
    return [household_tax(h, policy) for h in households]


def revenue(households: Sequence[Household], policy: Policy) -> int:
    """Monthly revenue in stotinki: collection rate x the sum of household
    taxes, negative NIT transfers included. Summation runs in ascending
    household id order so the figure is deterministic."""
    ordered = sorted(households, key=lambda h: h.id)
    total = sum(_taxes_by_household(ordered, policy))
    return round_half_up(Fraction(total * policy.collection_rate_bp, BP_SCALE))


@dataclass(frozen=True)
class MetricsReport:
    policy_name: str
    period: str
    household_count: int
    person_count: int
    total_income: int
    total_tax: int
    total_revenue: int
    collection_rate_bp: int
    gini_pre: Fraction | None
    gini_post: Fraction | None
    redistribution: Fraction | None
    lorenz_pre: tuple[tuple[Fraction, Fraction], ...]
    lorenz_post: tuple[tuple[Fraction, Fraction], ...]
    top_shares_pre: tuple[tuple[Fraction, Fraction], ...]
    top_shares_post: tuple[tuple[Fraction, Fraction], ...]
    decile_rates: tuple[Fraction | None, ...]


def build_report(
    households: Sequence[Household],
    policy: Policy,
    top_ps: Sequence[Fraction] = DEFAULT_TOP_SHARES,
) -> MetricsReport:
    """Evaluate a policy over a population on household-level distributions."""
    ordered = sorted(households, key=lambda h: h.id)
    taxes = _taxes_by_household(ordered, policy)
    pre = [h.monthly_income for h in ordered]
    post = [income - tax for income, tax in zip(pre, taxes)]
    total_tax = sum(taxes)

    def quiet(fn, *args):
        try:
            return fn(*args)
        except (UndefinedMetricError, InputError):
            return None

    lorenz_pre = quiet(lorenz_points, pre) or ()
    lorenz_post = quiet(lorenz_points, post) or ()
    gini_pre = quiet(gini, pre)
    gini_post = quiet(gini, post)
    shares_pre = tuple(
        (p, share) for p in top_ps if (share := quiet(top_share, pre, p)) is not None
    )
    shares_post = tuple(
        (p, share) for p in top_ps if (share := quiet(top_share, post, p)) is not None
    )
    return MetricsReport(
        policy_name=policy.name,
        period="monthly",
        household_count=len(ordered),
        person_count=sum(h.size for h in ordered),
        total_income=sum(pre),
        total_tax=total_tax,
        total_revenue=round_half_up(
            Fraction(total_tax * policy.collection_rate_bp, BP_SCALE)
        ),
        collection_rate_bp=policy.collection_rate_bp,
        gini_pre=gini_pre,
        gini_post=gini_post,
        redistribution=None
        if gini_pre is None or gini_post is None
        else gini_pre - gini_post,
        lorenz_pre=lorenz_pre,
        lorenz_post=lorenz_post,
        top_shares_pre=shares_pre,
        top_shares_post=shares_post,
        decile_rates=decile_effective_rates(pre, taxes),
    )


@dataclass(frozen=True)
class HouseholdDelta:
    household_id: str
    monthly_income: int
    tax_a: int
    tax_b: int
    delta: int


@dataclass(frozen=True)
class WinnersLosers:
    policy_a: str
    policy_b: str
    deltas: tuple[HouseholdDelta, ...]
    winners: int
    losers: int
    unchanged: int


def winners_losers(
    households: Sequence[Household], policy_a: Policy, policy_b: Policy
) -> WinnersLosers:
    """Per-household monthly tax change moving from policy_a to policy_b.

    Negative delta means the household pays less under policy_b (a winner).
    """
    ordered = sorted(households, key=lambda h: h.id)
    taxes_a = _taxes_by_household(ordered, policy_a)
    taxes_b = _taxes_by_household(ordered, policy_b)
    deltas = tuple(
        HouseholdDelta(
            household_id=h.id,
            monthly_income=h.monthly_income,
            tax_a=a,
            tax_b=b,
            delta=b - a,
        )
        for h, a, b in zip(ordered, taxes_a, taxes_b)
    )
    return WinnersLosers(
        policy_a=policy_a.name,
        policy_b=policy_b.name,
        deltas=deltas,
        winners=sum(1 for d in deltas if d.delta < 0),
        losers=sum(1 for d in deltas if d.delta > 0),
        unchanged=sum(1 for d in deltas if d.delta == 0),
    )


# --- stable records for the CLI and the API ----------------------------------

RATE_DIGITS = 6


def _rate(value: Fraction | None) -> str | None:
    return None if value is None else fraction_to_decimal(value, RATE_DIGITS)


def lorenz_record(
    points: Sequence[tuple[Fraction, Fraction]], limit: int = 101
) -> list[list[str]]:
    """Lorenz points as decimal-string pairs, downsampled to about ``limit``
    true curve points (always keeping the anchors)."""
    n = len(points) - 1
    if n < 0:
        return []
    if n + 1 <= limit:
        indices: Sequence[int] = range(n + 1)
    else:
        indices = sorted({i * n // (limit - 1) for i in range(limit)} | {n})
    return [
        [fraction_to_decimal(points[i][0], RATE_DIGITS), fraction_to_decimal(points[i][1], RATE_DIGITS)]
        for i in indices
    ]


def _shares_record(shares: Sequence[tuple[Fraction, Fraction]]) -> list[dict]:
    return [
        {"percent": fraction_to_decimal(p * 100, 2), "share": _rate(share)}
        for p, share in shares
    ]


def report_to_record(r: MetricsReport, lorenz_limit: int = 101) -> dict:
    return {
        "policy": r.policy_name,
        "period": r.period,
        "households": r.household_count,
        "persons": r.person_count,
        "total_income_bgn": to_bgn(r.total_income),
        "total_tax_bgn": to_bgn(r.total_tax),
        "total_revenue_bgn": to_bgn(r.total_revenue),
        "collection_rate_bp": r.collection_rate_bp,
        "gini_pre": _rate(r.gini_pre),
        "gini_post": _rate(r.gini_post),
        "redistribution": _rate(r.redistribution),
        "top_shares_pre": _shares_record(r.top_shares_pre),
        "top_shares_post": _shares_record(r.top_shares_post),
        "decile_effective_rates": [_rate(rate) for rate in r.decile_rates],
        "lorenz_pre": lorenz_record(r.lorenz_pre, lorenz_limit),
        "lorenz_post": lorenz_record(r.lorenz_post, lorenz_limit),
    }


def winners_to_record(w: WinnersLosers, max_deltas: int = 0) -> dict:
    record = {
        "policy_a": w.policy_a,
        "policy_b": w.policy_b,
        "households": len(w.deltas),
        "winners": w.winners,
        "losers": w.losers,
        "unchanged": w.unchanged,
    }
    if max_deltas:
        record["deltas"] = [
            {
                "household_id": d.household_id,
                "monthly_income_bgn": to_bgn(d.monthly_income),
                "tax_a_bgn": to_bgn(d.tax_a),
                "tax_b_bgn": to_bgn(d.tax_b),
                "delta_bgn": to_bgn(d.delta),
            }
            for d in w.deltas[:max_deltas]
        ]
    return record
