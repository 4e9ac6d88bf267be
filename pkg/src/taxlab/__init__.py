"""Tax-policy microsimulation over small households.

Exact integer/rational arithmetic throughout: money in stotinki, rates in
basis points, one half-up rounding at the end of each computed amount.
"""

from .errors import (
    InputError,
    PopulationError,
    SolverError,
    UndefinedMetricError,
    UndefinedRateError,
    UnreachableTargetError,
)
from .household import Household, Member, NitParams
from .money import BP_SCALE, bgn, from_bgn, round_half_up, to_bgn
from .policy import Policy, preset, preset_names
from .schedule import Bracket, Schedule, compute_tax, schedule

__all__ = [
    "BP_SCALE",
    "Bracket",
    "Household",
    "InputError",
    "Member",
    "NitParams",
    "Policy",
    "PopulationError",
    "Schedule",
    "SolverError",
    "UndefinedMetricError",
    "UndefinedRateError",
    "UnreachableTargetError",
    "bgn",
    "compute_tax",
    "from_bgn",
    "preset",
    "preset_names",
    "round_half_up",
    "schedule",
    "to_bgn",
]
