"""Exception types raised by the billing engine."""


class BillingError(Exception):
    """Base class for invalid input to the billing engine."""


class ScheduleError(BillingError):
    """Tariff schedule description violates the schedule invariants."""


class TraceError(BillingError):
    """Consumption trace file or reading set is malformed."""


class AllocationError(BillingError):
    """Group price cannot be split under the requested policy."""


class SimulationError(BillingError):
    """Billing simulation precondition violated (grid, readings, shifts)."""


class InternalCheckError(Exception):
    """A pricing invariant failed while computing a report.

    This signals a bug in the engine (or a deliberately non-progressive
    schedule slipping past a guard), never bad user input.
    """
