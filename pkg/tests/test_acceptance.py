"""Release gate: one test per headline behaviour, tolerances pinned.

Everything here runs against public entry points only. The solver and the
inequality-ordering checks use the documented fixed-seed population from
conftest (seed 20160301, 10,000 households).
"""

import random
import time
from fractions import Fraction

from click.testing import CliRunner

from taxlab.cli import cli
from taxlab.household import Household, Member
from taxlab.lab import revenue_neutral_scale
from taxlab.metrics import build_report, gini, gini_from_lorenz, lorenz_points, revenue, top_share
from taxlab.money import bgn
from taxlab.policy import household_tax, preset
from taxlab.reliefs import ReliefClaims, ReliefRules, apply_reliefs
from taxlab.schedule import compute_tax, schedule, tax_numerator

FLAT = preset("flat_2008")
PROGRESSIVE = preset("proposed_progressive")
NIT = preset("nit_2016")


def _single_earner(income: int) -> Household:
    return Household(
        id="h1", members=(Member(id="p1", role="adult", monthly_income=income),)
    )


def _family(income_per_adult: int) -> Household:
    return Household(
        id="h1",
        members=(
            Member(id="a1", role="adult", monthly_income=income_per_adult),
            Member(id="a2", role="adult", monthly_income=income_per_adult),
            Member(id="c1", role="child", monthly_income=0),
            Member(id="c2", role="child", monthly_income=0),
            Member(id="c3", role="child", monthly_income=0),
        ),
    )


def test_flat_tax_monthly_figure_exact_and_fast():
    h = _single_earner(bgn(460))
    household_tax(h, FLAT)  # warm-up: schedule validation, imports
    started = time.perf_counter()
    tax = household_tax(h, FLAT)
    elapsed = time.perf_counter() - started
    assert tax == bgn(46)
    assert elapsed < 0.001


def test_nit_family_transfer_and_taxable_excess():
    from taxlab.household import nit_taxable_excess
    from taxlab.policy import nit_params

    at_1200 = _family(bgn(600))
    assert household_tax(at_1200, NIT) == -bgn(300)

    at_8000 = _family(bgn(4_000))
    assert nit_taxable_excess(at_8000, nit_params(NIT)) == bgn(6_500)
    assert household_tax(at_8000, NIT) == bgn(650)


def test_relief_goldens():
    rules = ReliefRules()

    two_children = apply_reliefs(bgn(12_000), ReliefClaims(children=2), rules)
    assert two_children.taxable_base == bgn(11_600)

    capacity = apply_reliefs(bgn(12_000), ReliefClaims(reduced_capacity_pct=50), rules)
    assert capacity.reduced_capacity == bgn(7_920)

    base = bgn(10_000)
    donated = apply_reliefs(base, ReliefClaims(donations=base), rules)
    assert donated.donations == base * 500 // 10_000  # exactly 5% of the base


def test_progressive_scale_goldens():
    slab = PROGRESSIVE.schedule
    marginal = schedule(
        [(b.lower, b.rate_bp) for b in slab.brackets], mode="marginal", period="monthly"
    )
    assert compute_tax(slab, bgn(250)) == 0
    assert compute_tax(marginal, bgn(250)) == 0
    assert compute_tax(slab, bgn(500)) == bgn(50)
    # hand sum for 1,500: 0% x 300 + 10% x 700 + 12% x 500 = 70 + 60
    assert compute_tax(marginal, bgn(1_500)) == bgn(70) + bgn(60)


def test_metric_property_suite_1000_cases():
    rng = random.Random(424242)
    started = time.perf_counter()
    for _ in range(1_000):
        n = rng.randint(1, 60)
        incomes = [rng.randrange(0, 10**6) for _ in range(n)]
        if sum(incomes) == 0:
            incomes[rng.randrange(n)] = rng.randrange(1, 10**6)
        g = gini(incomes)
        points = lorenz_points(incomes)
        # dual route, exact rational equality
        assert g == gini_from_lorenz(points)
        # scale and replication invariance
        assert gini([7 * x for x in incomes]) == g
        assert gini(incomes * 3) == g
        # convexity of the Lorenz polyline
        increments = [y1 - y0 for (_, y0), (_, y1) in zip(points, points[1:])]
        assert all(b >= a for a, b in zip(increments, increments[1:]))
        # top shares grow with p
        shares = [
            top_share(incomes, p)
            for p in (Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), Fraction(1))
        ]
        assert all(a <= b for a, b in zip(shares, shares[1:]))
    assert time.perf_counter() - started < 10


def test_schedule_oracle_equivalence():
    def stotinka_rate(brackets, x):
        rate = 0
        for lower, rate_bp in brackets:
            if x >= lower:
                rate = rate_bp
        return rate

    rng = random.Random(8128)
    for _ in range(200):
        count = rng.randint(1, 6)
        lowers = sorted(rng.sample(range(1, bgn(100)), count - 1))
        brackets = [(0, rng.randint(0, 5_000))] + [
            (lower, rng.randint(0, 5_000)) for lower in lowers
        ]
        s = schedule(brackets, mode="marginal", period="monthly")
        base = rng.randint(0, bgn(100))
        oracle = sum(stotinka_rate(brackets, x) for x in range(base))
        assert tax_numerator(s, base) == oracle
        # rounded stotinki: within half a stotinka of oracle / 10,000
        assert abs(compute_tax(s, base) * 10_000 - oracle) <= 5_000


def test_revenue_neutral_solver_recovers_linear_scale(acceptance_population):
    current = revenue(acceptance_population, FLAT)
    target = current * 3 // 2
    started = time.perf_counter()
    result = revenue_neutral_scale(FLAT, acceptance_population, target, tolerance=100)
    elapsed = time.perf_counter() - started
    assert abs(result.scale - Fraction(3, 2)) < Fraction(1, 1_000_000)
    assert result.iterations <= 64
    assert abs(result.residual) <= 100
    assert elapsed < 5


def test_progressive_reduces_gini_below_flat(acceptance_population):
    # the population must exercise the whole scale, top bracket included
    top_income = max(
        m.monthly_income for h in acceptance_population for m in h.members
    )
    assert top_income >= bgn(8_000)

    flat = build_report(acceptance_population, FLAT)
    progressive = build_report(acceptance_population, PROGRESSIVE)
    assert flat.gini_pre == progressive.gini_pre
    assert progressive.gini_post < flat.gini_post < flat.gini_pre


def test_simulate_byte_identical():
    runner = CliRunner()
    args = ["simulate", "--synth", "seed=7,n=1000", "--preset", "flat_2008"]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.exit_code == 0 and second.exit_code == 0
    assert first.output == second.output
