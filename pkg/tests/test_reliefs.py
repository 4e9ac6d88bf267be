import pytest

from taxlab.errors import InputError
from taxlab.money import bgn
from taxlab.reliefs import (
    NO_CLAIMS,
    ReliefClaims,
    ReliefRules,
    annual_tax,
    apply_reliefs,
    validate_claims,
)
from taxlab.schedule import schedule

RULES = ReliefRules()
FLAT_ANNUAL = schedule([(0, 1000)], mode="marginal", period="annual")


def test_no_claims_passes_base_through():
    b = apply_reliefs(bgn(12_000), NO_CLAIMS, RULES)
    assert b.total_deductions == 0
    assert b.taxable_base == bgn(12_000)


def test_two_children_deduct_400():
    claims = ReliefClaims(children=2)
    b = apply_reliefs(bgn(12_000), claims, RULES)
    assert b.children == bgn(400)
    assert b.taxable_base == bgn(11_600)


def test_child_relief_scale_saturates_at_three():
    for count, relief in ((1, 200), (2, 400), (3, 600), (4, 600), (7, 600)):
        b = apply_reliefs(bgn(12_000), ReliefClaims(children=count), RULES)
        assert b.children == bgn(relief)


def test_disabled_children_counted_separately():
    # 3 children, 1 disabled: scale position 2 (the plain ones) + 2,000.
    claims = ReliefClaims(children=3, disabled_children=1)
    b = apply_reliefs(bgn(20_000), claims, RULES)
    assert b.children == bgn(400)
    assert b.disabled_children == bgn(2_000)


def test_reduced_capacity_threshold():
    base = bgn(12_000)
    at_60 = apply_reliefs(base, ReliefClaims(reduced_capacity_pct=60), RULES)
    assert at_60.reduced_capacity == bgn(7_920)
    assert at_60.taxable_base == bgn(4_080)
    at_50 = apply_reliefs(base, ReliefClaims(reduced_capacity_pct=50), RULES)
    assert at_50.reduced_capacity == bgn(7_920)
    at_49 = apply_reliefs(base, ReliefClaims(reduced_capacity_pct=49), RULES)
    assert at_49.reduced_capacity == 0


def test_donation_cap_is_5_percent():
    base = bgn(10_000)
    capped = apply_reliefs(base, ReliefClaims(donations=bgn(800)), RULES)
    assert capped.donations == bgn(500)
    under = apply_reliefs(base, ReliefClaims(donations=bgn(300)), RULES)
    assert under.donations == bgn(300)


def test_pct_caps_floor_to_whole_stotinki():
    # 5% of 10.01 BGN is 50.05 st; the cap floors to 50.
    b = apply_reliefs(1001, ReliefClaims(donations=1001), RULES)
    assert b.donations == 50


def test_pension_and_insurance_capped_independently():
    base = bgn(10_000)
    claims = ReliefClaims(
        voluntary_pension_paid=bgn(2_000), insurance_paid=bgn(900)
    )
    b = apply_reliefs(base, claims, RULES)
    assert b.voluntary_pension == bgn(1_000)  # capped at 10%
    assert b.insurance == bgn(900)  # under its own 10% cap


def test_service_purchase_uncapped():
    b = apply_reliefs(bgn(10_000), ReliefClaims(service_purchase_paid=bgn(9_000)), RULES)
    assert b.service_purchase == bgn(9_000)


def test_mortgage_interest_needs_young_family_flag():
    claims = ReliefClaims(
        mortgage_interest_paid=bgn(1_200), mortgage_principal=bgn(80_000)
    )
    assert apply_reliefs(bgn(20_000), claims, RULES).mortgage_interest == 0
    eligible = ReliefClaims(
        mortgage_interest_paid=bgn(1_200),
        mortgage_principal=bgn(80_000),
        young_family_eligible=True,
    )
    assert apply_reliefs(bgn(20_000), eligible, RULES).mortgage_interest == bgn(1_200)


def test_mortgage_interest_prorated_over_principal_cap():
    # 150,000 principal: only the first 100,000 qualifies, so 2/3 of the
    # interest is deductible.
    claims = ReliefClaims(
        mortgage_interest_paid=bgn(1_500),
        mortgage_principal=bgn(150_000),
        young_family_eligible=True,
    )
    assert apply_reliefs(bgn(20_000), claims, RULES).mortgage_interest == bgn(1_000)


def test_taxable_base_never_negative():
    claims = ReliefClaims(reduced_capacity_pct=100)
    b = apply_reliefs(bgn(3_000), claims, RULES)
    assert b.taxable_base == 0
    assert b.total_deductions == bgn(7_920)


def test_validate_claims():
    assert validate_claims(NO_CLAIMS) == []
    assert validate_claims(ReliefClaims(donations=-1))
    assert validate_claims(ReliefClaims(children=1, disabled_children=2))
    assert validate_claims(ReliefClaims(reduced_capacity_pct=101))
    with pytest.raises(InputError):
        apply_reliefs(bgn(1_000), ReliefClaims(donations=-1), RULES)


def test_annual_tax_requires_annual_schedule():
    monthly = schedule([(0, 1000)], mode="marginal", period="monthly")
    with pytest.raises(InputError):
        annual_tax(bgn(12_000), NO_CLAIMS, RULES, monthly)
    assert annual_tax(bgn(12_000), ReliefClaims(children=2), RULES, FLAT_ANNUAL) == bgn(1_160)
