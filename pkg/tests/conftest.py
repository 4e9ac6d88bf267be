from pathlib import Path

import pytest

from taxlab.population import SynthesisParams, synthesize

FIXTURES = Path(__file__).parent / "fixtures"

# The documented fixed-seed population: 10,000 households, whole-lev incomes,
# no child-relief claims, 8% of adults with a reduced-capacity claim. Incomes
# in whole levs keep annual bases divisible by 12, and the 7,920 BGN relief
# is as well, so flat-tax revenue scales without rounding residue.
ACCEPTANCE_SEED = 20160301
ACCEPTANCE_PARAMS = SynthesisParams(
    household_count=10_000,
    seed=ACCEPTANCE_SEED,
    claim_child_relief=False,
    reduced_capacity_share=0.08,
)


@pytest.fixture(scope="session")
def acceptance_population():
    return synthesize(ACCEPTANCE_PARAMS)


@pytest.fixture()
def family_csv_path() -> Path:
    return FIXTURES / "family.csv"
