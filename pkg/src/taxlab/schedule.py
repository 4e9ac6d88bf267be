"""Tax schedules: bracket tables, tax computation, and progressivity classification.

A schedule is an ordered list of brackets, each an inclusive lower income
bound (stotinki, per the schedule's period) and a rate in basis points. It
applies in one of two modes:

- ``marginal``: each bracket's slice of the base is taxed at that bracket's
  rate (the familiar staircase).
- ``slab``: the whole base is taxed at the rate of the bracket containing it.

Tax amounts are exact rationals internally and are rounded half-up to one
stotinka once, at the end.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, UndefinedRateError
from .money import BP_SCALE, from_bgn, round_half_up, to_bgn

MARGINAL = "marginal"
SLAB = "slab"
MONTHLY = "monthly"
ANNUAL = "annual"

_MODES = (MARGINAL, SLAB)
_PERIODS = (MONTHLY, ANNUAL)


@dataclass(frozen=True)
class Bracket:
    """One band: inclusive lower bound in stotinki, rate in basis points."""

    lower: int
    rate_bp: int


@dataclass(frozen=True)
class Schedule:
    brackets: tuple[Bracket, ...]
    mode: str
    period: str

    def annualized(self) -> "Schedule":
        """Monthly schedule with bounds scaled x12, reperiodized to annual."""
        if self.period != MONTHLY:
            raise InputError("annualized() requires a monthly schedule")
        return Schedule(
            brackets=tuple(Bracket(b.lower * 12, b.rate_bp) for b in self.brackets),
            mode=self.mode,
            period=ANNUAL,
        )

    def scaled(self, factor: Fraction) -> "Schedule":
        """Every rate multiplied by ``factor``, rounded to whole basis points
        and clamped at 100%. Bounds, mode and period are unchanged."""
        if factor < 0:
            raise InputError("rate scale factor must be >= 0")
        return Schedule(
            brackets=tuple(
                Bracket(b.lower, min(BP_SCALE, round_half_up(Fraction(b.rate_bp) * factor)))
                for b in self.brackets
            ),
            mode=self.mode,
            period=self.period,
        )

    def max_rate_bp(self) -> int:
        return max(b.rate_bp for b in self.brackets)


class ScheduleClass(enum.Enum):
    PROGRESSIVE = "progressive"
    PROPORTIONAL = "proportional"
    REGRESSIVE = "regressive"
    MIXED = "mixed"


def schedule(brackets: Iterable[tuple[int, int]], mode: str, period: str) -> Schedule:
    """Build a schedule from (lower_stotinki, rate_bp) pairs and validate it."""
    s = Schedule(tuple(Bracket(lo, bp) for lo, bp in brackets), mode, period)
    require_valid(s)
    return s


def validate_schedule(s: Schedule) -> list[str]:
    """Return all invariant violations; an empty list means the schedule is ok.

    Violations are data, not failures: an invalid schedule can be inspected,
    it just cannot be used to compute tax.
    """
    violations: list[str] = []
    if s.mode not in _MODES:
        violations.append(f"unknown mode {s.mode!r}")
    if s.period not in _PERIODS:
        violations.append(f"unknown period {s.period!r}")
    if not s.brackets:
        violations.append("schedule has no brackets")
        return violations
    if s.brackets[0].lower != 0:
        violations.append("first lower must be 0")
    seen: set[int] = set()
    for b in s.brackets:
        if b.lower < 0:
            violations.append(f"negative lower bound {b.lower}")
        if b.lower in seen:
            violations.append(f"duplicate lower bound {to_bgn(b.lower)}")
        seen.add(b.lower)
        if not 0 <= b.rate_bp <= BP_SCALE:
            violations.append(f"rate {b.rate_bp} bp out of range 0..{BP_SCALE}")
    lowers = [b.lower for b in s.brackets]
    if lowers != sorted(lowers):
        violations.append("brackets not sorted by lower bound")
    return violations


def require_valid(s: Schedule) -> None:
    violations = validate_schedule(s)
    if violations:
        raise InputError("invalid schedule: " + "; ".join(violations))


def _bracket_index(s: Schedule, base: int) -> int:
    """Index of the bracket containing ``base``; lower bounds are inclusive."""
    idx = 0
    for i, b in enumerate(s.brackets):
        if base >= b.lower:
            idx = i
        else:
            break
    return idx


def tax_numerator(s: Schedule, base: int) -> int:
    """Tax before dividing by BP_SCALE: the rate-weighted base in bp-stotinki.

    The exact tax is ``numerator / BP_SCALE``; keeping the numerator as an
    integer lets the revenue-neutral solver scale rates rationally with no
    intermediate rounding.
    """
    require_valid(s)
    if base < 0:
        raise InputError(f"tax base must be >= 0, got {base}")
    if s.mode == SLAB:
        return s.brackets[_bracket_index(s, base)].rate_bp * base
    total = 0
    for i, b in enumerate(s.brackets):
        upper = s.brackets[i + 1].lower if i + 1 < len(s.brackets) else None
        portion = (base if upper is None else min(base, upper)) - b.lower
        if portion <= 0:
            continue
        total += b.rate_bp * portion
    return total


def tax_exact(s: Schedule, base: int, rate_scale: Fraction | None = None) -> Fraction:
    """Pre-rounding tax amount as an exact rational (stotinki).

    ``rate_scale`` multiplies every bracket rate without rounding to whole
    basis points; the revenue-neutral solver relies on this to keep tax
    continuous in the scale factor.
    """
    amount = Fraction(tax_numerator(s, base), BP_SCALE)
    return amount if rate_scale is None else amount * rate_scale


def compute_tax(s: Schedule, base: int) -> int:
    """Tax due on ``base`` (stotinki, in the schedule's period), rounded
    half-up to one stotinka."""
    return round_half_up(tax_exact(s, base))


def average_rate(s: Schedule, base: int) -> Fraction:
    """Exact average rate tax/base, using the pre-rounding tax amount."""
    if base == 0:
        raise UndefinedRateError("average rate is undefined at base 0")
    if base < 0:
        raise InputError(f"tax base must be > 0, got {base}")
    return tax_exact(s, base) / base


def marginal_rate(s: Schedule, base: int) -> int:
    """Rate (bp) of the bracket containing ``base``; bounds belong to the
    higher bracket."""
    require_valid(s)
    if base < 0:
        raise InputError(f"tax base must be >= 0, got {base}")
    return s.brackets[_bracket_index(s, base)].rate_bp


def classify(s: Schedule, grid: Sequence[int]) -> ScheduleClass:
    """Classify by the behaviour of the average rate over ``grid``.

    Non-decreasing with at least one increase is progressive, constant is
    proportional, non-increasing with at least one decrease is regressive,
    anything else is mixed.
    """
    if len(grid) < 2:
        raise InputError("classification grid needs at least 2 points")
    if any(g <= 0 for g in grid):
        raise InputError("classification grid points must be positive")
    if any(a >= b for a, b in zip(grid, grid[1:])):
        raise InputError("classification grid must be strictly increasing")
    rates = [average_rate(s, g) for g in grid]
    ups = any(a < b for a, b in zip(rates, rates[1:]))
    downs = any(a > b for a, b in zip(rates, rates[1:]))
    if ups and downs:
        return ScheduleClass.MIXED
    if ups:
        return ScheduleClass.PROGRESSIVE
    if downs:
        return ScheduleClass.REGRESSIVE
    return ScheduleClass.PROPORTIONAL


@dataclass(frozen=True)
class BracketSlice:
    """One bracket's contribution to a tax amount, for itemized displays.

    ``tax`` is rounded per slice, so slice taxes can differ from the rounded
    total by a stotinka; ``compute_tax`` stays authoritative.
    """

    lower: int
    upper: int | None
    rate_bp: int
    amount: int
    tax: int


def bracket_slices(s: Schedule, base: int) -> tuple[BracketSlice, ...]:
    """Bracket-by-bracket amounts for ``base``: the taxed slices in marginal
    mode, the single containing bracket in slab mode."""
    require_valid(s)
    if base < 0:
        raise InputError(f"tax base must be >= 0, got {base}")
    uppers = [b.lower for b in s.brackets[1:]] + [None]
    if s.mode == SLAB:
        i = _bracket_index(s, base)
        b = s.brackets[i]
        return (
            BracketSlice(
                lower=b.lower,
                upper=uppers[i],
                rate_bp=b.rate_bp,
                amount=base,
                tax=round_half_up(Fraction(b.rate_bp * base, BP_SCALE)),
            ),
        )
    slices = []
    for b, upper in zip(s.brackets, uppers):
        portion = (base if upper is None else min(base, upper)) - b.lower
        if portion <= 0:
            continue
        slices.append(
            BracketSlice(
                lower=b.lower,
                upper=upper,
                rate_bp=b.rate_bp,
                amount=portion,
                tax=round_half_up(Fraction(b.rate_bp * portion, BP_SCALE)),
            )
        )
    return tuple(slices)


def schedule_to_record(s: Schedule) -> dict:
    """Serializable record; ``lower_bgn`` is a 2-fraction-digit decimal string."""
    return {
        "period": s.period,
        "mode": s.mode,
        "brackets": [{"lower_bgn": to_bgn(b.lower), "rate_bp": b.rate_bp} for b in s.brackets],
    }


def schedule_from_record(record: dict) -> Schedule:
    try:
        s = Schedule(
            brackets=tuple(
                Bracket(from_bgn(b["lower_bgn"]), int(b["rate_bp"])) for b in record["brackets"]
            ),
            mode=record["mode"],
            period=record["period"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed schedule record: {exc}") from exc
    require_valid(s)
    return s
