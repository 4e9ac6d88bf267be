"""Exception types shared across the engine."""


class InputError(ValueError):
    """Input rejected: invalid schedule, negative base, mode/period mismatch, bad config."""


class UndefinedRateError(InputError):
    """Average rate requested for a zero base."""


class UndefinedMetricError(InputError):
    """Metric undefined for the given distribution (e.g. zero mean income)."""


class PopulationError(InputError):
    """Population file rejected.

    ``line`` is the 1-based line number for parse errors, None for
    household-level validation errors (which carry ``household_id`` instead).
    """

    def __init__(self, message: str, line: int | None = None, household_id: str | None = None):
        super().__init__(message)
        self.line = line
        self.household_id = household_id


class UnreachableTargetError(Exception):
    """Revenue target lies outside what rate scaling can produce."""


class SolverError(Exception):
    """Solver failed to bracket the target (non-monotone or degenerate configuration)."""
