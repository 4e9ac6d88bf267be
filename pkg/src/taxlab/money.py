"""Exact money arithmetic in stotinki.

All engine arithmetic uses integer stotinki (1 BGN = 100 stotinki); rates are
integer basis points (1 bp = 0.01%). Fractions of a stotinka appear only as
exact ``fractions.Fraction`` intermediates and are rounded half-up (away from
zero) exactly once, at the final amount of a computation. Floats never enter
tax arithmetic.
"""

from __future__ import annotations

import re
from fractions import Fraction

# One basis point denominator: rate_bp / BP_SCALE is the rate as a fraction.
BP_SCALE = 10_000
STOTINKI_PER_BGN = 100

_BGN_RE = re.compile(r"^-?\d+(\.\d{1,2})?$")


def round_half_up(amount: Fraction | int) -> int:
    """Round to whole stotinki, ties away from zero."""
    if isinstance(amount, int):
        return amount
    n, d = amount.numerator, amount.denominator
    if n >= 0:
        return (2 * n + d) // (2 * d)
    return -((-2 * n + d) // (2 * d))


def from_bgn(text: str) -> int:
    """Parse a decimal BGN string ("460.00", "-3.5") into stotinki."""
    text = text.strip()
    if not _BGN_RE.match(text):
        raise ValueError(f"not a decimal BGN amount: {text!r}")
    negative = text.startswith("-")
    if negative:
        text = text[1:]
    whole, _, frac = text.partition(".")
    frac = (frac + "00")[:2]
    value = int(whole) * STOTINKI_PER_BGN + int(frac)
    return -value if negative else value


def to_bgn(stotinki: int) -> str:
    """Format stotinki as a decimal BGN string with 2 fraction digits."""
    sign = "-" if stotinki < 0 else ""
    whole, frac = divmod(abs(stotinki), STOTINKI_PER_BGN)
    return f"{sign}{whole}.{frac:02d}"


def bgn(amount: int | str) -> int:
    """Convenience constructor: whole BGN int or decimal string -> stotinki."""
    if isinstance(amount, int):
        return amount * STOTINKI_PER_BGN
    return from_bgn(amount)


def fraction_from_decimal(text: str, max_digits: int = 4) -> Fraction:
    """Parse a decimal string like "0.99" into an exact Fraction.

    Used for collection rates and scale factors in policy files; precision is
    capped so round-trips stay exact.
    """
    text = text.strip()
    if not re.match(r"^-?\d+(\.\d+)?$", text):
        raise ValueError(f"not a decimal number: {text!r}")
    whole, _, frac = text.partition(".")
    if len(frac) > max_digits:
        raise ValueError(f"more than {max_digits} fraction digits: {text!r}")
    scale = 10 ** len(frac)
    value = Fraction(abs(int(whole)) * scale + (int(frac) if frac else 0), scale)
    return -value if text.startswith("-") else value


def fraction_to_decimal(value: Fraction, digits: int = 6) -> str:
    """Render an exact fraction as a fixed-point decimal string (half-up)."""
    scale = 10**digits
    scaled = round_half_up(value * scale)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), scale)
    return f"{sign}{whole}.{frac:0{digits}d}"
