"""Populations of households: CSV load/export, synthesis, demographic presets.

The CSV carries one person per row. Money columns are decimal BGN with two
fraction digits. ``children`` and ``disabled_children`` are household-level
counts and must repeat identically on every row of the household; on load
they become relief claims of the household's first adult so the relief is
never claimed twice. That first-adult assignment is the canonical form:
populations built by ``load_population`` and ``synthesize`` round-trip
byte-identically through ``export_population``.

Synthesis uses Python's Mersenne Twister (``random.Random``) seeded with the
given 64-bit seed: per household it draws the adult count, the child count,
then one log-normal income per adult, in that order. CPython keeps this
generator stable across platforms, which makes exports byte-identical for a
fixed seed.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

from .errors import InputError, PopulationError
from .household import ADULT, CHILD, Household, Member, validate_household
from .money import from_bgn, round_half_up, to_bgn
from .reliefs import NO_CLAIMS, ReliefClaims

CSV_COLUMNS = (
    "person_id",
    "household_id",
    "role",
    "monthly_income_bgn",
    "children",
    "disabled_children",
    "reduced_capacity_pct",
    "pension_paid",
    "insurance_paid",
    "service_purchase_paid",
    "donations",
    "mortgage_interest",
    "mortgage_principal",
    "young_family",
)


@dataclass(frozen=True)
class DemographicPreset:
    year: int
    population_count: int


DEMOGRAPHIC_PRESETS = (
    DemographicPreset(2015, 7_168_009),
    DemographicPreset(2030, 6_554_784),
    DemographicPreset(2050, 5_813_550),
    DemographicPreset(2070, 5_132_023),
)


def demographic_presets() -> tuple[DemographicPreset, ...]:
    return DEMOGRAPHIC_PRESETS


def demographic_scale_factors(base_year: int = 2015) -> dict[int, float]:
    """Population counts as fractions of a base year, for scaling sweeps."""
    by_year = {p.year: p.population_count for p in DEMOGRAPHIC_PRESETS}
    if base_year not in by_year:
        raise InputError(f"no demographic preset for {base_year}")
    base = by_year[base_year]
    return {year: count / base for year, count in by_year.items()}


def _parse_int(raw: str, column: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise PopulationError(
            f"line {line}: {column} must be an integer, got {raw!r}", line=line
        ) from None


def _parse_money(raw: str, column: str, line: int) -> int:
    try:
        value = from_bgn(raw)
    except ValueError:
        raise PopulationError(
            f"line {line}: {column} must be a decimal BGN amount, got {raw!r}", line=line
        ) from None
    if value < 0:
        raise PopulationError(f"line {line}: {column} must be >= 0", line=line)
    return value


def _parse_flag(raw: str, column: str, line: int) -> bool:
    if raw in ("0", "1"):
        return raw == "1"
    raise PopulationError(f"line {line}: {column} must be 0 or 1, got {raw!r}", line=line)


def load_population(source: TextIO | str | Path) -> list[Household]:
    """Read a population CSV into validated households.

    Household order follows first appearance; member order follows row order.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as handle:
            return load_population(handle)

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise PopulationError("line 1: missing header row", line=1) from None
    if tuple(header) != CSV_COLUMNS:
        raise PopulationError(
            "line 1: header must be " + ",".join(CSV_COLUMNS), line=1
        )

    rows_by_household: dict[str, list[tuple[int, Member]]] = {}
    household_children: dict[str, tuple[int, int]] = {}
    seen_person_ids: set[str] = set()

    for line, row in enumerate(reader, start=2):
        if len(row) != len(CSV_COLUMNS):
            raise PopulationError(
                f"line {line}: expected {len(CSV_COLUMNS)} fields, got {len(row)}",
                line=line,
            )
        record = dict(zip(CSV_COLUMNS, row))
        person_id = record["person_id"]
        household_id = record["household_id"]
        if not person_id or not household_id:
            raise PopulationError(f"line {line}: empty id", line=line)
        if person_id in seen_person_ids:
            raise PopulationError(
                f"line {line}: duplicate person_id {person_id!r}", line=line
            )
        seen_person_ids.add(person_id)

        role = record["role"]
        if role not in (ADULT, CHILD):
            raise PopulationError(
                f"line {line}: role must be adult or child, got {role!r}", line=line
            )

        income = _parse_money(record["monthly_income_bgn"], "monthly_income_bgn", line)
        children = _parse_int(record["children"], "children", line)
        disabled = _parse_int(record["disabled_children"], "disabled_children", line)
        counts = (children, disabled)
        if household_id in household_children:
            if household_children[household_id] != counts:
                raise PopulationError(
                    f"line {line}: children counts differ within household"
                    f" {household_id!r}",
                    line=line,
                    household_id=household_id,
                )
        else:
            household_children[household_id] = counts

        claims = ReliefClaims(
            voluntary_pension_paid=_parse_money(record["pension_paid"], "pension_paid", line),
            insurance_paid=_parse_money(record["insurance_paid"], "insurance_paid", line),
            service_purchase_paid=_parse_money(
                record["service_purchase_paid"], "service_purchase_paid", line
            ),
            donations=_parse_money(record["donations"], "donations", line),
            mortgage_interest_paid=_parse_money(
                record["mortgage_interest"], "mortgage_interest", line
            ),
            mortgage_principal=_parse_money(
                record["mortgage_principal"], "mortgage_principal", line
            ),
            reduced_capacity_pct=_parse_int(
                record["reduced_capacity_pct"], "reduced_capacity_pct", line
            ),
            young_family_eligible=_parse_flag(record["young_family"], "young_family", line),
        )
        member = Member(id=person_id, role=role, monthly_income=income, claims=claims)
        rows_by_household.setdefault(household_id, []).append((line, member))

    households: list[Household] = []
    for household_id, numbered in rows_by_household.items():
        members = [member for _, member in numbered]
        children, disabled = household_children[household_id]
        first_adult = next((i for i, m in enumerate(members) if m.role == ADULT), None)
        if first_adult is not None and (children or disabled):
            claimant = members[first_adult]
            members[first_adult] = replace(
                claimant,
                claims=replace(
                    claimant.claims, children=children, disabled_children=disabled
                ),
            )
        household = Household(id=household_id, members=tuple(members))
        violations = validate_household(household)
        if violations:
            raise PopulationError(
                f"household {household_id!r}: " + "; ".join(violations),
                line=numbered[0][0],
                household_id=household_id,
            )
        households.append(household)
    return households


def export_population(households: Iterable[Household], dest: TextIO) -> None:
    """Write the canonical CSV: one row per member, household claims summed."""
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for h in households:
        children = sum(m.claims.children for m in h.members)
        disabled = sum(m.claims.disabled_children for m in h.members)
        for m in h.members:
            c = m.claims
            writer.writerow(
                (
                    m.id,
                    h.id,
                    m.role,
                    to_bgn(m.monthly_income),
                    children,
                    disabled,
                    c.reduced_capacity_pct,
                    to_bgn(c.voluntary_pension_paid),
                    to_bgn(c.insurance_paid),
                    to_bgn(c.service_purchase_paid),
                    to_bgn(c.donations),
                    to_bgn(c.mortgage_interest_paid),
                    to_bgn(c.mortgage_principal),
                    int(c.young_family_eligible),
                )
            )


def export_population_text(households: Iterable[Household]) -> str:
    buffer = io.StringIO()
    export_population(households, buffer)
    return buffer.getvalue()


_Weights = tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class SynthesisParams:
    """Knobs for the synthetic population generator.

    ``median_income_bgn`` is the log-normal median (the distribution's
    location is its natural log); ``income_sigma`` is the log-scale spread.
    ``income_floor`` lifts any draw below it to the floor, e.g. the 460 BGN
    minimum wage. ``whole_bgn`` rounds draws to whole levs, the granularity
    of real salary data. ``claim_child_relief`` turns the drawn child count
    into a relief claim on the first adult; ``reduced_capacity_share`` gives
    each adult that probability of a 50% reduced-working-capacity claim.
    """

    household_count: int
    seed: int
    adults_dist: _Weights = ((1, 0.35), (2, 0.65))
    children_dist: _Weights = ((0, 0.50), (1, 0.25), (2, 0.17), (3, 0.08))
    median_income_bgn: float = 900.0
    income_sigma: float = 0.75
    income_floor: int = 0
    whole_bgn: bool = True
    claim_child_relief: bool = True
    reduced_capacity_share: float = 0.0


def _validate_dist(dist: _Weights, what: str) -> None:
    if not dist:
        raise InputError(f"{what} distribution is empty")
    if any(count < 0 or weight < 0 for count, weight in dist):
        raise InputError(f"{what} distribution has negative entries")
    if not math.isclose(sum(w for _, w in dist), 1.0, rel_tol=0, abs_tol=1e-9):
        raise InputError(f"{what} distribution weights must sum to 1")


def synthesize(params: SynthesisParams) -> list[Household]:
    """Draw a deterministic population for the given seed."""
    if params.household_count < 0:
        raise InputError("household_count must be >= 0")
    if params.median_income_bgn <= 0:
        raise InputError("median_income_bgn must be > 0")
    if params.income_sigma < 0:
        raise InputError("income_sigma must be >= 0")
    if params.income_floor < 0:
        raise InputError("income_floor must be >= 0")
    if not 0 <= params.reduced_capacity_share <= 1:
        raise InputError("reduced_capacity_share must be in [0, 1]")
    _validate_dist(params.adults_dist, "adults")
    _validate_dist(params.children_dist, "children")

    rng = random.Random(params.seed)
    adult_counts = [c for c, _ in params.adults_dist]
    adult_weights = [w for _, w in params.adults_dist]
    child_counts = [c for c, _ in params.children_dist]
    child_weights = [w for _, w in params.children_dist]
    mu = math.log(params.median_income_bgn)

    households: list[Household] = []
    for index in range(1, params.household_count + 1):
        household_id = f"h{index:06d}"
        adults = rng.choices(adult_counts, weights=adult_weights)[0]
        children = rng.choices(child_counts, weights=child_weights)[0]
        members: list[Member] = []
        for j in range(1, adults + 1):
            if params.income_sigma == 0:
                income_bgn = params.median_income_bgn
            else:
                income_bgn = rng.lognormvariate(mu, params.income_sigma)
            income = max(
                params.income_floor, _draw_to_stotinki(income_bgn, params.whole_bgn)
            )
            capacity_pct = 0
            if params.reduced_capacity_share and rng.random() < params.reduced_capacity_share:
                capacity_pct = 50
            claim_children = children if j == 1 and params.claim_child_relief else 0
            if claim_children or capacity_pct:
                claims = ReliefClaims(
                    children=claim_children, reduced_capacity_pct=capacity_pct
                )
            else:
                claims = NO_CLAIMS
            members.append(
                Member(
                    id=f"{household_id}p{j}",
                    role=ADULT,
                    monthly_income=income,
                    claims=claims,
                )
            )
        for j in range(adults + 1, adults + children + 1):
            members.append(
                Member(id=f"{household_id}p{j}", role=CHILD, monthly_income=0)
            )
        households.append(Household(id=household_id, members=tuple(members)))
    return households


def _draw_to_stotinki(income_bgn: float, whole_bgn: bool) -> int:
    if not math.isfinite(income_bgn) or income_bgn < 0:
        raise InputError(f"income draw out of range: {income_bgn!r}")
    if whole_bgn:
        return round_half_up(Fraction(income_bgn)) * 100
    return round_half_up(Fraction(income_bgn) * 100)


def scale_population(
    households: list[Household], factor: float | Fraction
) -> list[Household]:
    """Resample to round(factor x n) households by cycling through the list.

    Clones get fresh sequential ids so person ids stay unique.
    """
    if factor < 0:
        raise InputError("population scale factor must be >= 0")
    n = len(households)
    target = round(factor * n)
    if target <= n:
        return households[:target]
    scaled = list(households)
    for index in range(n, target):
        source = households[index % n]
        household_id = f"s{index + 1:06d}"
        members = tuple(
            Member(
                id=f"{household_id}p{j}",
                role=m.role,
                monthly_income=m.monthly_income,
                claims=m.claims,
            )
            for j, m in enumerate(source.members, start=1)
        )
        scaled.append(Household(id=household_id, members=members))
    return scaled
